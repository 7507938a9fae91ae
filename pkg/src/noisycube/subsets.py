"""Minimal output entropy of noisy subsets.

For a subset S of the n-cube, the quantity of interest is the entropy of a
uniform sample from S corrupted by independent Bernoulli(alpha) coordinate
flips. Minimizing it over all size-m subsets defines a function of (n, m,
alpha) with known closed forms for m <= 4; this module computes the minimum
three independent ways (exhaustive search, search restricted to downward
closed sets, closed forms) and certifies the inequalities relating them.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .core import (
    BudgetExceededError,
    CheckReport,
    VertexSet,
    _canonical_members,
    _coordinate_maps,
    binary_entropy,
    canonical_form,
    check_dimension,
    crossover_vector,
    enumeration_budget,
    entropy_of_rows,
    star,
    transform_rows,
    uniform_pmf_on,
)

# Interior points catch strict-inequality regressions; 0 and 1/2 anchor the
# degenerate cases.
DEFAULT_ALPHA_GRID = (
    0.0, 0.01, 0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45, 0.49, 0.5,
)

DEFAULT_SUBSET_BUDGET = 200_000
DEFAULT_MONOTONE_BUDGET = 1_000_000


def noisy_subset_entropy(s: VertexSet, alpha) -> float:
    """Entropy in bits of (uniform sample from s) xor (independent flips)."""
    if not s.members:
        raise ValueError("empty vertex set")
    noise = crossover_vector(alpha, s.n)
    mass = uniform_pmf_on(s).mass
    return float(entropy_of_rows(transform_rows(mass[None, :], s.n, noise))[0])


def _subset_entropies(n: int, subsets: np.ndarray, alpha: float) -> np.ndarray:
    """Entropies of the noisy uniform distributions on each row of a
    (batch, m) index array."""
    count, m = subsets.shape
    mass = np.zeros((count, 2**n))
    np.add.at(mass, (np.arange(count)[:, None], subsets), 1.0 / m)
    noise = crossover_vector(alpha, n)
    return entropy_of_rows(transform_rows(mass, n, noise))


@dataclass(frozen=True)
class MinEntropyResult:
    """Minimum noisy-subset entropy over size-m subsets, with all argmins
    found (reported as canonical orbit representatives)."""

    n: int
    m: int
    alpha: float
    value: float
    minimizers: tuple[VertexSet, ...]


def _check_size(n: int, m: int) -> None:
    if not 1 <= m <= 2**n:
        raise ValueError(f"subset size must be in [1, 2^{n}], got {m}")


_CANDIDATE_CACHE: dict[tuple[int, int], np.ndarray] = {}


def _canonical_mask(subsets: np.ndarray, n: int) -> np.ndarray:
    """For each row (a subset containing vertex 0), whether it equals its
    canonical form.

    Builds every image of each subset under translations by members
    composed with coordinate permutations, then extracts the lexicographic
    minimum image column by column (restrict to rows attaining the running
    minimum, read off the next column's minimum).
    """
    maps = _coordinate_maps(n)
    count, m = subsets.shape
    translated = subsets[:, :, None] ^ subsets[:, None, :]
    candidates = maps[:, translated].transpose(1, 0, 2, 3).reshape(count, -1, m)
    candidates.sort(axis=2)
    active = np.ones(candidates.shape[:2], dtype=bool)
    is_canonical = np.ones(count, dtype=bool)
    sentinel = np.iinfo(np.int64).max
    for k in range(m):
        column = np.where(active, candidates[:, :, k], sentinel)
        column_min = column.min(axis=1)
        is_canonical &= column_min == subsets[:, k]
        active = column == column_min[:, None]
    return is_canonical


_CANONICAL_CHUNK = 256


def _canonical_candidates(n: int, m: int, budget: int) -> np.ndarray:
    """All canonical representatives of size-m subset orbits, shape (count, m).

    Every orbit representative contains vertex 0, so enumeration runs over
    subsets containing 0 and keeps the ones equal to their canonical form.
    """
    total = math.comb(2**n - 1, m - 1)
    if total > budget:
        raise BudgetExceededError(
            f"{total} subsets of size {m} to canonicalize exceeds budget {budget}"
        )
    key = (n, m)
    cached = _CANDIDATE_CACHE.get(key)
    if cached is not None:
        return cached
    rows = np.fromiter(
        itertools.chain.from_iterable(
            (0,) + rest for rest in itertools.combinations(range(1, 2**n), m - 1)
        ),
        dtype=np.int64,
        count=total * m,
    ).reshape(total, m)
    if m >= 2:
        # A canonical form's smallest nonzero member is a packed run of ones
        # (translate one endpoint of a minimum-distance pair to 0, permute
        # the difference into the low bits), so anything else drops early.
        packed = np.array([(1 << k) - 1 for k in range(1, n + 1)])
        rows = rows[np.isin(rows[:, 1], packed)]
    keep = []
    for start in range(0, len(rows), _CANONICAL_CHUNK):
        chunk = rows[start : start + _CANONICAL_CHUNK]
        keep.append(chunk[_canonical_mask(chunk, n)])
    result = np.concatenate(keep) if keep else rows
    _CANDIDATE_CACHE[key] = result
    return result


def _minimize_over(
    n: int, m: int, alpha: float, subsets: np.ndarray, already_canonical: bool
) -> MinEntropyResult:
    values = _subset_entropies(n, subsets, alpha)
    best = float(values.min())
    argmins = subsets[values <= best + 1e-9]
    if already_canonical:
        sets = [VertexSet(n, tuple(int(v) for v in row)) for row in argmins]
    else:
        sets = list(
            {canonical_form(VertexSet(n, tuple(int(v) for v in row))) for row in argmins}
        )
    sets.sort(key=lambda s: s.members)
    return MinEntropyResult(n=n, m=m, alpha=float(alpha), value=best, minimizers=tuple(sets))


def min_entropy_bruteforce(
    n: int, m: int, alpha: float, *, prune: bool = True, max_subsets: int | None = None
) -> MinEntropyResult:
    """Exact minimum of noisy_subset_entropy over every size-m subset.

    With ``prune`` the search runs over canonical forms under coordinate
    permutations and XOR translations (one representative per orbit, cached
    across calls); pruning never changes the value. Raises
    BudgetExceededError when the enumeration would exceed ``max_subsets``.
    """
    check_dimension(n)
    _check_size(n, m)
    budget = max_subsets if max_subsets is not None else enumeration_budget(DEFAULT_SUBSET_BUDGET)
    if prune:
        subsets = _canonical_candidates(n, m, budget)
        return _minimize_over(n, m, alpha, subsets, already_canonical=True)
    total = math.comb(2**n, m)
    if total > budget:
        raise BudgetExceededError(
            f"{total} subsets of size {m} exceeds budget {budget}"
        )
    subsets = np.fromiter(
        itertools.chain.from_iterable(itertools.combinations(range(2**n), m)),
        dtype=np.int64,
        count=total * m,
    ).reshape(total, m)
    return _minimize_over(n, m, alpha, subsets, already_canonical=False)


@dataclass(frozen=True)
class MonotoneSetFamily:
    """All downward closed size-m subsets of the n-cube (complete family,
    not deduplicated under symmetry)."""

    n: int
    m: int
    sets: tuple[VertexSet, ...]


_MONOTONE_CACHE: dict[tuple[int, int], np.ndarray] = {}


def _monotone_members(n: int, m: int, budget: int) -> np.ndarray:
    key = (n, m)
    cached = _MONOTONE_CACHE.get(key)
    if cached is not None:
        if len(cached) > budget:
            raise BudgetExceededError(
                f"{len(cached)} down-sets of size {m} exceeds budget {budget}"
            )
        return cached
    size = 2**n
    order = sorted(range(size), key=lambda v: (bin(v).count("1"), v))
    preds = [
        [v ^ (1 << i) for i in range(n) if v & (1 << i)] for v in order
    ]
    node_budget = max(1_000_000, 100 * budget)
    found: list[tuple[int, ...]] = []
    included = [False] * size
    chosen: list[int] = []
    nodes = 0

    def dfs(pos: int, count: int) -> None:
        nonlocal nodes
        nodes += 1
        if nodes > node_budget:
            raise BudgetExceededError(
                f"down-set search explored over {node_budget} states"
            )
        if count == m:
            if len(found) >= budget:
                raise BudgetExceededError(
                    f"more than {budget} down-sets of size {m}"
                )
            found.append(tuple(sorted(chosen)))
            return
        if pos == size or count + (size - pos) < m:
            return
        v = order[pos]
        if all(included[u] for u in preds[pos]):
            included[v] = True
            chosen.append(v)
            dfs(pos + 1, count + 1)
            chosen.pop()
            included[v] = False
        dfs(pos + 1, count)

    dfs(0, 0)
    result = np.array(found, dtype=np.int64).reshape(len(found), m)
    _MONOTONE_CACHE[key] = result
    return result


def enumerate_monotone_sets(
    n: int, m: int, *, max_sets: int | None = None
) -> MonotoneSetFamily:
    """Every downward closed subset of size m, generated by DFS over a
    popcount-compatible linear order of the cube."""
    check_dimension(n)
    if not 0 <= m <= 2**n:
        raise ValueError(f"size must be in [0, 2^{n}], got {m}")
    budget = max_sets if max_sets is not None else enumeration_budget(DEFAULT_MONOTONE_BUDGET)
    rows = _monotone_members(n, m, budget)
    sets = tuple(VertexSet(n, tuple(int(v) for v in row)) for row in rows)
    return MonotoneSetFamily(n=n, m=m, sets=sets)


def min_entropy_monotone(
    n: int, m: int, alpha: float, *, max_sets: int | None = None
) -> MinEntropyResult:
    """Minimum of noisy_subset_entropy over downward closed size-m sets.

    Agrees with min_entropy_bruteforce everywhere (restricting to monotone
    sets loses nothing); the monotone family is far smaller, extending the
    feasible range.
    """
    check_dimension(n)
    _check_size(n, m)
    budget = max_sets if max_sets is not None else enumeration_budget(DEFAULT_MONOTONE_BUDGET)
    subsets = _monotone_members(n, m, budget)
    return _minimize_over(n, m, alpha, subsets, already_canonical=False)


def min_entropy_closed_form(n: int, m: int, alpha: float) -> float:
    """Closed-form minimum noisy-subset entropy for sizes 1 through 4.

    The size-3 expression is the exact entropy of the (unique up to
    symmetry) optimal set {0, e1, e2}; sizes 1, 2 and 4 reduce to affine
    functions of the binary entropy of alpha.
    """
    check_dimension(n)
    h = binary_entropy(alpha)
    if m == 1:
        return n * h
    if m == 2:
        return 1.0 + (n - 1) * h
    if m not in (3, 4):
        raise ValueError(f"no closed form for size {m}")
    if n < 2:
        raise ValueError(f"size {m} requires dimension >= 2")
    if m == 4:
        return 2.0 + (n - 2) * h
    first = binary_entropy(star(1.0 / 3.0, alpha))
    cond0 = star(2.0 / 3.0, alpha) * binary_entropy((1.0 - alpha**2) / (2.0 - alpha))
    cond1 = star(1.0 / 3.0, alpha) * binary_entropy(
        (1.0 - alpha + alpha**2) / (1.0 + alpha)
    )
    return first + cond0 + cond1 + (n - 2) * h


def min_entropy_size3_lower_bound(n: int, alpha: float) -> float:
    """Lower bound on the size-3 minimum obtained by dropping one
    conditioning step; never exceeds min_entropy_closed_form(n, 3, alpha)."""
    if n < 2:
        raise ValueError("requires dimension >= 2")
    h = binary_entropy(alpha)
    return binary_entropy(star(1.0 / 3.0, alpha)) + h / 3.0 + 2.0 / 3.0 + (n - 2) * h


def size3_mixture_margin(alpha: float) -> float:
    """Margin whose non-negativity settles the size-3 case of the mixture
    bound: 3*h(1/3 * alpha) - 2 - h(alpha).

    Zero at alpha = 1/2, positive elsewhere on [0, 1/2).
    """
    if not 0.0 <= alpha <= 0.5:
        raise ValueError(f"crossover out of [0, 1/2]: {alpha}")
    return 3.0 * binary_entropy(star(1.0 / 3.0, alpha)) - 2.0 - binary_entropy(alpha)


def size3_mixture_margin_derivative(alpha: float) -> float:
    """Analytic derivative of size3_mixture_margin; strictly negative on
    (0, 1/2)."""
    if not 0.0 < alpha <= 0.5:
        raise ValueError(f"derivative defined on (0, 1/2]: {alpha}")
    return math.log2((2.0 * alpha - alpha**2) / (1.0 - alpha**2))


def check_min_entropy_monotonicity(
    n: int,
    alpha: float,
    m_max: int,
    *,
    tol: float = 1e-9,
    values: dict[int, float] | None = None,
) -> CheckReport:
    """Certify that the size-m minimum entropy is non-decreasing in m up to
    m_max. ``values`` may supply precomputed minima keyed by m."""
    _check_size(n, m_max)
    if values is None:
        values = {m: min_entropy_monotone(n, m, alpha).value for m in range(1, m_max + 1)}
    seq = [values[m] for m in range(1, m_max + 1)]
    slacks = [b - a for a, b in zip(seq, seq[1:])]
    worst = min(slacks) if slacks else 0.0
    return CheckReport(
        name="min-entropy-monotonicity",
        passed=worst >= -tol,
        slack=worst,
        details={"n": n, "alpha": alpha, "values": seq},
    )


def check_mixture_lower_bound(
    n: int,
    alpha: float,
    m: int,
    *,
    tol: float = 1e-9,
    value_m: float | None = None,
) -> CheckReport:
    """Certify the two-point mixture bound: a (m-2)/(2m-2), m/(2m-2) blend
    of the size-1 and size-m minima dominates the size-2 minimum."""
    if not 2 < m < 2**n:
        raise ValueError(f"size must satisfy 2 < m < 2^{n}, got {m}")
    h1 = min_entropy_closed_form(n, 1, alpha)
    h2 = min_entropy_closed_form(n, 2, alpha)
    hm = value_m if value_m is not None else min_entropy_monotone(n, m, alpha).value
    lhs = (m - 2) / (2 * m - 2) * h1 + m / (2 * m - 2) * hm
    slack = lhs - h2
    return CheckReport(
        name="mixture-lower-bound",
        passed=slack >= -tol,
        slack=slack,
        details={"n": n, "alpha": alpha, "m": m, "lhs": lhs, "rhs": h2},
    )
