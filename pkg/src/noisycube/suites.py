"""Verification suites behind the CLI subcommands.

Each suite runs a family of numerical certificates and returns a plain
dict ready for JSON serialization: an ordered ``checks`` list (name,
passed, slack) plus suite-specific payload. A suite passes when every
check does; the first failing check's name is what the CLI reports.
"""

from __future__ import annotations

import time

import numpy as np

from .bms import BmsChannel, bms_mutual_information, capacity, check_least_capable, matched_bsc
from .core import VertexSet, is_monotone
from .quantize import (
    Quantizer,
    batch_mutual_information,
    cell_count_identity,
    exhaustive_partition_search,
    projection_quantizer,
    repair_empty_cells,
    size_profile,
)
from .shifting import bias_check, check_entropy_nonincrease, shift_to_monotone
from .subsets import (
    DEFAULT_ALPHA_GRID,
    check_min_entropy_monotonicity,
    check_mixture_lower_bound,
    min_entropy_bruteforce,
    min_entropy_closed_form,
    min_entropy_monotone,
    min_entropy_size3_lower_bound,
    noisy_subset_entropy,
    size3_mixture_margin,
    size3_mixture_margin_derivative,
)

TOL = 1e-9


def _check_entry(name: str, passed: bool, slack: float, **extra) -> dict:
    entry = {"name": name, "passed": bool(passed), "slack": float(slack)}
    entry.update(extra)
    return entry


def _finish(payload: dict) -> dict:
    payload["passed"] = all(c["passed"] for c in payload["checks"])
    return payload


def theorem_suite(
    n: int,
    alphas,
    num_cells: int | None = None,
    *,
    max_partitions: int | None = None,
    workers: int = 1,
    timing: bool = True,
) -> dict:
    """Exhaustive certification of the mutual-information cap: every
    partition into at most M cells respects (n-1)(1-h(alpha)), and the
    projection partition attains the maximum when M = 2^(n-1)."""
    if num_cells is None:
        num_cells = 2 ** (n - 1)
    projection = projection_quantizer(n) if num_cells == 2 ** (n - 1) else None
    checks = []
    results = []
    for alpha in alphas:
        start = time.perf_counter()
        found = exhaustive_partition_search(
            n, alpha, num_cells, max_partitions=max_partitions, workers=workers
        )
        runtime_ms = (time.perf_counter() - start) * 1000.0 if timing else 0.0
        results.append(
            {
                "n": n,
                "alpha": float(alpha),
                "M": num_cells,
                "bound": found.bound,
                "max_mi": found.max_mi,
                "gap": found.gap,
                "argmax": [[list(cell) for cell in part] for part in found.maximizers],
                "partitions_examined": found.partitions_examined,
                "runtime_ms": runtime_ms,
            }
        )
        checks.append(
            _check_entry(
                "partition-bound",
                found.bound_violations == 0,
                found.gap,
                alpha=float(alpha),
                violations=found.bound_violations,
            )
        )
        if projection is not None:
            proj_mi = float(
                batch_mutual_information(
                    np.array([projection.labels]), n, alpha, num_cells
                )[0]
            )
            proj_partition = tuple(
                tuple(cell) for cell in projection.cells()
            )
            attained = abs(found.max_mi - proj_mi) <= TOL and any(
                part == proj_partition for part in found.maximizers
            )
            checks.append(
                _check_entry(
                    "projection-optimal",
                    attained,
                    -abs(found.max_mi - proj_mi),
                    alpha=float(alpha),
                )
            )
    return _finish({"results": results, "checks": checks})


def hmn_table(
    n: int,
    sizes,
    alphas,
    *,
    include_bruteforce: bool = True,
    max_subsets: int | None = None,
    max_monotone: int | None = None,
) -> dict:
    """Tabulate the size-m minima: monotone-restricted search, full search,
    and closed forms side by side, with their gaps."""
    rows = []
    checks = []
    worst_mono = 0.0
    worst_closed = 0.0
    for m in sizes:
        for alpha in alphas:
            mono = min_entropy_monotone(n, m, alpha, max_sets=max_monotone)
            row = {
                "n": n,
                "m": m,
                "alpha": float(alpha),
                "min_entropy_monotone": mono.value,
                "min_entropy_bruteforce": None,
                "min_entropy_closed_form": None,
                "minimizers": len(mono.minimizers),
            }
            if include_bruteforce:
                brute = min_entropy_bruteforce(n, m, alpha, max_subsets=max_subsets)
                row["min_entropy_bruteforce"] = brute.value
                worst_mono = max(worst_mono, abs(mono.value - brute.value))
            if m <= 4 and (m <= 2 or n >= 2):
                closed = min_entropy_closed_form(n, m, alpha)
                row["min_entropy_closed_form"] = closed
                worst_closed = max(worst_closed, abs(mono.value - closed))
            rows.append(row)
    if include_bruteforce:
        checks.append(
            _check_entry("monotone-sufficiency", worst_mono <= TOL, -worst_mono)
        )
    checks.append(_check_entry("closed-forms", worst_closed <= TOL, -worst_closed))
    return _finish({"rows": rows, "checks": checks})


def shift_suite(n: int, members, alpha: float) -> dict:
    """Trace the compression of one set to its downward closure, certifying
    cardinality preservation, per-step entropy descent, and the per-word
    bias certificates along the way."""
    initial = VertexSet(n, tuple(members))
    final, steps = shift_to_monotone(initial)
    entropies = [noisy_subset_entropy(initial, alpha)]
    trace = []
    bias_ok = True
    worst_drop = 0.0
    for step in steps:
        before_entropy = entropies[-1]
        after_entropy = noisy_subset_entropy(step.after, alpha)
        entropies.append(after_entropy)
        worst_drop = min(worst_drop, before_entropy - after_entropy)
        try:
            bias_check(step.before, step.coordinate, alpha)
        except RuntimeError:
            bias_ok = False
        trace.append(
            {
                "coordinate": step.coordinate,
                "moved": list(step.moved.members),
                "before": list(step.before.members),
                "after": list(step.after.members),
                "entropy_before": before_entropy,
                "entropy_after": after_entropy,
            }
        )
    checks = [
        _check_entry("size-preserved", len(final) == len(initial), 0.0),
        _check_entry("final-monotone", is_monotone(final), 0.0),
        _check_entry("entropy-descent", worst_drop >= -TOL, worst_drop),
        _check_entry("bias-domination", bias_ok, 0.0),
    ]
    return _finish(
        {
            "n": n,
            "alpha": float(alpha),
            "initial": list(initial.members),
            "final": list(final.members),
            "entropies": entropies,
            "steps": trace,
            "checks": checks,
        }
    )


def _perturbed_table(n: int, alphas, perturb_hm, max_monotone) -> dict:
    table: dict[tuple[int, float], float] = {}
    for m in range(1, 2**n + 1):
        for alpha in alphas:
            value = min_entropy_monotone(n, m, alpha, max_sets=max_monotone).value
            if perturb_hm == m:
                value += 1e-3
            table[(m, float(alpha))] = value
    return table


def lemma_suite(
    n: int,
    alphas=None,
    *,
    seed: int = 0,
    samples: int = 200,
    perturb_hm: int | None = None,
    max_subsets: int | None = None,
    max_monotone: int | None = None,
) -> dict:
    """Run every inequality certificate at one dimension: search agreement,
    closed forms, monotonicity in m, the mixture bound, the size-3 bound
    and margin, bias domination and entropy descent along compressions, and
    the cell-count identity on repaired random quantizers.

    ``perturb_hm`` is a fault-injection hook: it adds 1e-3 to the size-m
    minimum before the checks run, which must flip the suite to failing.
    """
    if alphas is None:
        alphas = DEFAULT_ALPHA_GRID
    alphas = [float(a) for a in alphas]
    checks = []
    table = _perturbed_table(n, alphas, perturb_hm, max_monotone)

    # Agreement of the monotone-restricted search with the full search.
    worst = 0.0
    for m in range(1, 2**n + 1):
        for alpha in alphas:
            brute = min_entropy_bruteforce(n, m, alpha, max_subsets=max_subsets)
            worst = max(worst, abs(table[(m, alpha)] - brute.value))
    checks.append(_check_entry("monotone-sufficiency", worst <= TOL, -worst))

    # Closed forms against the (possibly perturbed) table.
    worst = 0.0
    for m in (1, 2, 3, 4):
        if m > 2**n or (m >= 3 and n < 2):
            continue
        for alpha in alphas:
            worst = max(
                worst, abs(table[(m, alpha)] - min_entropy_closed_form(n, m, alpha))
            )
    checks.append(_check_entry("closed-forms", worst <= TOL, -worst))

    # Monotonicity of the minimum in the subset size.
    worst = np.inf
    for alpha in alphas:
        values = {m: table[(m, alpha)] for m in range(1, 2**n + 1)}
        report = check_min_entropy_monotonicity(n, alpha, 2**n, values=values)
        worst = min(worst, report.slack)
    checks.append(_check_entry("min-entropy-monotonicity", worst >= -TOL, worst))

    # Two-point mixture bound for every admissible size.
    worst = np.inf
    for m in range(3, 2**n):
        for alpha in alphas:
            report = check_mixture_lower_bound(n, alpha, m, value_m=table[(m, alpha)])
            worst = min(worst, report.slack)
    if not np.isinf(worst):
        checks.append(_check_entry("mixture-lower-bound", worst >= -TOL, worst))

    # Size-3 lower bound never exceeds the exact size-3 value.
    if n >= 2:
        worst = min(
            min_entropy_closed_form(n, 3, alpha) - min_entropy_size3_lower_bound(n, alpha)
            for alpha in alphas
        )
        checks.append(_check_entry("size3-lower-bound", worst >= -TOL, worst))

    # The size-3 margin: zero at 1/2, positive inside, decreasing.
    end = abs(size3_mixture_margin(0.5))
    interior = [a for a in alphas if 0.0 < a < 0.5]
    interior_min = min(size3_mixture_margin(a) for a in interior) if interior else 1.0
    checks.append(
        _check_entry(
            "size3-margin",
            end <= 1e-12 and interior_min > 0.0,
            min(interior_min, 1e-12 - end),
        )
    )
    fd_worst = 0.0
    deriv_max = -np.inf
    for a in interior:
        step = 1e-6
        fd = (size3_mixture_margin(a + step) - size3_mixture_margin(a - step)) / (2 * step)
        exact = size3_mixture_margin_derivative(a)
        fd_worst = max(fd_worst, abs(fd - exact))
        deriv_max = max(deriv_max, exact)
    checks.append(
        _check_entry(
            "size3-margin-derivative",
            fd_worst <= 1e-6 and deriv_max < 0.0,
            -fd_worst,
        )
    )

    # Randomized compression certificates.
    rng = np.random.default_rng(seed)
    bias_ok = True
    descent_worst = np.inf
    optimality_worst = np.inf
    for _ in range(samples):
        m = int(rng.integers(1, 2**n + 1))
        members = tuple(int(v) for v in rng.choice(2**n, size=m, replace=False))
        alpha = float(rng.uniform(0.0, 0.5))
        subset = VertexSet(n, members)
        coordinate = int(rng.integers(1, n + 1))
        try:
            bias_check(subset, coordinate, alpha)
        except RuntimeError:
            bias_ok = False
        report = check_entropy_nonincrease(subset, alpha)
        descent_worst = min(descent_worst, report.slack)
        final, _ = shift_to_monotone(subset)
        optimality_worst = min(
            optimality_worst,
            noisy_subset_entropy(final, alpha)
            - min_entropy_monotone(n, m, alpha, max_sets=max_monotone).value,
        )
    checks.append(_check_entry("bias-domination", bias_ok, 0.0))
    checks.append(_check_entry("entropy-descent", descent_worst >= -TOL, descent_worst))
    checks.append(
        _check_entry("shifted-set-optimality", optimality_worst >= -TOL, optimality_worst)
    )

    # Cell-count identity on repaired random quantizers.
    num_cells = 2 ** (n - 1)
    identity_ok = True
    for _ in range(samples):
        labels = tuple(int(x) for x in rng.integers(0, num_cells, size=2**n))
        repaired = repair_empty_cells(Quantizer(n=n, labels=labels, num_cells=num_cells))
        singles, surplus = cell_count_identity(size_profile(repaired))
        identity_ok = identity_ok and singles == surplus
    checks.append(_check_entry("cell-count-identity", identity_ok, 0.0))

    return _finish({"n": n, "alphas": list(alphas), "checks": checks})


def search_suite(
    n: int,
    alpha: float,
    num_cells: int,
    samples: int,
    seed: int,
) -> dict:
    """Seeded random quantizer search with the projection injected; checks
    that no sample violates the cap and the best found reaches it."""
    from .quantize import random_quantizer_search

    found = random_quantizer_search(n, alpha, num_cells, samples, seed)
    checks = [
        _check_entry(
            "sampled-bound",
            found.bound_violations == 0,
            found.gap,
            violations=found.bound_violations,
        )
    ]
    if found.projection_mi is not None:
        checks.append(
            _check_entry(
                "projection-attains-bound",
                abs(found.projection_mi - found.bound) <= TOL,
                -abs(found.projection_mi - found.bound),
            )
        )
    return _finish(
        {
            "n": n,
            "alpha": float(alpha),
            "M": num_cells,
            "samples": samples,
            "seed": seed,
            "bound": found.bound,
            "best_mi": found.best_mi,
            "gap": found.gap,
            "projection_mi": found.projection_mi,
            "best_labels": list(found.best_labels),
            "checks": checks,
        }
    )


def bms_suite(
    channel: BmsChannel,
    n: int,
    samples: int,
    seed: int,
    *,
    per_cell: bool = False,
    max_states: int | None = None,
) -> dict:
    """Certify the mixture-channel cap (n-1)*C and the matched-channel
    ordering on seeded random quantizers, plus equality for the projection."""
    cap = capacity(channel)
    matched = matched_bsc(channel)
    num_cells = 2 ** (n - 1)
    projection = projection_quantizer(n)
    proj_mi = bms_mutual_information(projection, channel, max_states=max_states)
    checks = [
        _check_entry(
            "projection-attains-cap",
            abs(proj_mi - (n - 1) * cap) <= TOL,
            -abs(proj_mi - (n - 1) * cap),
        )
    ]
    rng = np.random.default_rng(seed)
    worst = np.inf
    violations = 0
    for _ in range(samples):
        labels = tuple(int(x) for x in rng.integers(0, num_cells, size=2**n))
        f = Quantizer(n=n, labels=labels, num_cells=num_cells)
        report = check_least_capable(
            f, channel, max_states=max_states, per_cell=per_cell
        )
        worst = min(worst, report.slack)
        if not report.passed:
            violations += 1
    checks.append(
        _check_entry(
            "least-capable",
            violations == 0,
            float(worst) if not np.isinf(worst) else 0.0,
            violations=violations,
        )
    )
    return _finish(
        {
            "n": n,
            "channel": channel.to_dict(),
            "capacity": cap,
            "matched_alpha": matched.alpha,
            "samples": samples,
            "seed": seed,
            "projection_mi": proj_mi,
            "checks": checks,
        }
    )
