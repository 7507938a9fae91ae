"""Quantizers of the n-cube and their mutual information through the
binary symmetric channel.

A quantizer assigns one of M cell labels to every vertex. With a uniform
input, the channel output is uniform, so the mutual information between
the cell label and the output is n minus the cell-size-weighted average of
noisy cell entropies. The searches here certify the (n-1)(1-h(alpha)) cap
over all partitions at desk scale, and the chain trace decomposes the
bound's derivation into individually checkable inequalities.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import (
    BudgetExceededError,
    VertexSet,
    binary_entropy,
    channel_kernel,
    check_dimension,
    enumeration_budget,
    entropy_of_rows,
)
from .subsets import (
    min_entropy_closed_form,
    min_entropy_monotone,
    noisy_subset_entropy,
)

DEFAULT_PARTITION_BUDGET = 10_000_000

_EVAL_CHUNK = 4096


@dataclass(frozen=True)
class Quantizer:
    """A labeling of all 2^n vertices into cells 0..num_cells-1."""

    n: int
    labels: tuple[int, ...]
    num_cells: int

    def __post_init__(self) -> None:
        check_dimension(self.n)
        labels = tuple(int(v) for v in self.labels)
        if len(labels) != 2**self.n:
            raise ValueError(f"need {2**self.n} labels, got {len(labels)}")
        if self.num_cells < 1:
            raise ValueError("need at least one cell")
        if labels and not 0 <= min(labels) <= max(labels) < self.num_cells:
            raise ValueError(f"labels out of [0, {self.num_cells})")
        object.__setattr__(self, "labels", labels)

    def cells(self) -> list[tuple[int, ...]]:
        out: list[list[int]] = [[] for _ in range(self.num_cells)]
        for v, label in enumerate(self.labels):
            out[label].append(v)
        return [tuple(cell) for cell in out]

    def cell_sizes(self) -> np.ndarray:
        return np.bincount(np.array(self.labels, dtype=np.int64), minlength=self.num_cells)


def projection_quantizer(n: int) -> Quantizer:
    """Drop the last coordinate: the label of a vertex is its first n-1
    coordinates. Every cell is a pair differing only in coordinate n."""
    check_dimension(n)
    half = 2 ** (n - 1)
    return Quantizer(n=n, labels=tuple(v & (half - 1) for v in range(2**n)), num_cells=half)


def conditional_output_entropy(f: Quantizer, alpha) -> float:
    """H(output | cell label): the cell-size-weighted average of noisy cell
    entropies. Empty cells carry zero weight."""
    total = 0.0
    volume = 2**f.n
    for cell in f.cells():
        if cell:
            total += len(cell) / volume * noisy_subset_entropy(VertexSet(f.n, cell), alpha)
    return total


def mutual_information(f: Quantizer, alpha) -> float:
    """I(cell label; channel output) in bits; the output is uniform, so
    this is n minus the conditional output entropy."""
    return f.n - conditional_output_entropy(f, alpha)


def quantizer_mi_bound(n: int, alpha: float) -> float:
    """The cap (n-1) * (1 - h(alpha)) on quantizer mutual information at
    2^(n-1) cells, met with equality by the projection quantizer."""
    check_dimension(n)
    return (n - 1) * (1.0 - binary_entropy(alpha))


@dataclass(frozen=True)
class SizeProfile:
    """Cell-size histogram of a quantizer: counts[m] = number of cells of
    size m (only sizes with nonzero count are stored)."""

    num_cells: int
    num_vertices: int
    counts: tuple[tuple[int, int], ...]

    def count(self, m: int) -> int:
        return dict(self.counts).get(m, 0)

    def as_dict(self) -> dict[int, int]:
        return dict(self.counts)


def cell_count_identity(profile: SizeProfile) -> tuple[int, int]:
    """Both sides of the counting identity for full profiles at half as
    many cells as vertices: the number of singleton cells equals the total
    size surplus of cells larger than two."""
    singletons = profile.count(1)
    surplus = sum((m - 2) * lam for m, lam in profile.counts if m >= 3)
    return singletons, surplus


def size_profile(f: Quantizer) -> SizeProfile:
    sizes = f.cell_sizes()
    histogram = np.bincount(sizes)
    counts = tuple((int(m), int(c)) for m, c in enumerate(histogram) if c > 0)
    profile = SizeProfile(num_cells=f.num_cells, num_vertices=2**f.n, counts=counts)
    if profile.count(0) == 0 and f.num_cells == 2 ** (f.n - 1):
        singletons, surplus = cell_count_identity(profile)
        if singletons != surplus:
            raise RuntimeError(
                f"cell-count identity violated: {singletons} singletons vs surplus {surplus}"
            )
    return profile


def _repair_labels(labels: list[int], num_cells: int) -> list[int]:
    sizes = [0] * num_cells
    for label in labels:
        sizes[label] += 1
    by_cell: list[list[int]] = [[] for _ in range(num_cells)]
    for v, label in enumerate(labels):
        by_cell[label].append(v)
    while True:
        empties = [j for j, size in enumerate(sizes) if size == 0]
        if not empties:
            return labels
        target = empties[0]
        donor = max(range(num_cells), key=lambda j: (sizes[j], -j))
        if sizes[donor] < 2:
            raise ValueError("cannot fill all cells: more cells than vertices")
        v = by_cell[donor].pop()
        labels[v] = target
        by_cell[target].append(v)
        sizes[donor] -= 1
        sizes[target] += 1


def repair_empty_cells(f: Quantizer) -> Quantizer:
    """Fill every empty cell by moving the largest-index vertex out of the
    currently largest cell (ties broken toward the smallest label).

    Refining cells this way never decreases mutual information, at any
    crossover. Fails when there are more cells than vertices.
    """
    if f.num_cells > 2**f.n:
        raise ValueError("more cells than vertices")
    labels = _repair_labels(list(f.labels), f.num_cells)
    return Quantizer(n=f.n, labels=tuple(labels), num_cells=f.num_cells)


def batch_mutual_information(
    labels: np.ndarray, n: int, alpha, num_cells: int
) -> np.ndarray:
    """Mutual information of each row of a (batch, 2^n) label matrix.

    Same quantity as mutual_information, computed through the dense channel
    kernel so that whole search batches amortize the per-call overhead.
    """
    kernel = channel_kernel(n, alpha)
    volume = 2**n
    out = np.empty(len(labels))
    rows = np.arange(volume)
    for start in range(0, len(labels), _EVAL_CHUNK):
        block = np.asarray(labels[start : start + _EVAL_CHUNK], dtype=np.int64)
        b = len(block)
        onehot = np.zeros((b, num_cells, volume))
        onehot[np.arange(b)[:, None], block, rows[None, :]] = 1.0
        cell_mass = onehot @ kernel
        sizes = onehot.sum(axis=2)
        np.divide(cell_mass, sizes[..., None], out=cell_mass, where=sizes[..., None] > 0)
        cell_entropy = entropy_of_rows(cell_mass)
        out[start : start + b] = n - np.sum(sizes / volume * cell_entropy, axis=1)
    return out


@lru_cache(maxsize=None)
def _stirling2(n: int, k: int) -> int:
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    return k * _stirling2(n - 1, k) + _stirling2(n - 1, k - 1)


def partition_count(num_elements: int, max_blocks: int) -> int:
    """Number of set partitions of num_elements items into at most
    max_blocks nonempty blocks."""
    return sum(_stirling2(num_elements, k) for k in range(1, min(max_blocks, num_elements) + 1))


def _rgs_batches(num: int, max_blocks: int, batch_size: int):
    """Yield restricted-growth label vectors in lexicographic order, batched
    as (<=batch_size, num) arrays. One vector per unordered partition into
    at most max_blocks blocks."""
    a = np.zeros(num, dtype=np.int64)
    b = np.ones(num, dtype=np.int64)
    buf = []
    while True:
        buf.append(a.copy())
        if len(buf) == batch_size:
            yield np.array(buf)
            buf = []
        j = num - 1
        while j >= 1 and a[j] >= min(b[j], max_blocks - 1):
            j -= 1
        if j == 0:
            break
        a[j] += 1
        prefix_max = max(b[j], a[j] + 1)
        a[j + 1 :] = 0
        b[j + 1 :] = prefix_max
    if buf:
        yield np.array(buf)


def _labels_to_partition(labels) -> tuple[tuple[int, ...], ...]:
    cells: dict[int, list[int]] = {}
    for v, label in enumerate(labels):
        cells.setdefault(int(label), []).append(v)
    return tuple(tuple(cell) for cell in sorted(cells.values()))


@dataclass(frozen=True)
class PartitionSearchResult:
    n: int
    alpha: float
    num_cells: int
    bound: float
    max_mi: float
    gap: float
    maximizers: tuple[tuple[tuple[int, ...], ...], ...]
    partitions_examined: int
    bound_violations: int


def exhaustive_partition_search(
    n: int,
    alpha: float,
    num_cells: int | None = None,
    *,
    max_partitions: int | None = None,
    workers: int = 1,
    tie_tol: float = 1e-9,
) -> PartitionSearchResult:
    """Evaluate every partition of the cube into at most num_cells blocks
    and report the exact maximum mutual information with all maximizers.

    Cell labels are immaterial to mutual information, so unordered
    partitions (restricted-growth strings) are enumerated instead of label
    vectors. Violations of the (n-1)(1-h) cap are counted whenever
    num_cells <= 2^(n-1), where the cap applies.
    """
    check_dimension(n)
    volume = 2**n
    if num_cells is None:
        num_cells = 2 ** (n - 1)
    if num_cells < 1:
        raise ValueError("need at least one cell")
    budget = (
        max_partitions
        if max_partitions is not None
        else enumeration_budget(DEFAULT_PARTITION_BUDGET)
    )
    total = partition_count(volume, num_cells)
    if total > budget:
        raise BudgetExceededError(f"{total} partitions exceeds budget {budget}")

    bound = quantizer_mi_bound(n, alpha)
    bound_applies = num_cells <= 2 ** (n - 1)
    best = -np.inf
    keep: list[tuple[float, tuple[int, ...]]] = []
    violations = 0
    examined = 0

    def evaluate(block: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return block, batch_mutual_information(block, n, alpha, num_cells)

    def consume(block: np.ndarray, values: np.ndarray) -> None:
        nonlocal best, keep, violations, examined
        examined += len(block)
        if bound_applies:
            violations += int(np.count_nonzero(values > bound + tie_tol))
        block_best = float(values.max())
        if block_best > best:
            best = block_best
            keep = [item for item in keep if item[0] >= best - tie_tol]
        for idx in np.nonzero(values >= best - tie_tol)[0]:
            keep.append((float(values[idx]), tuple(int(x) for x in block[idx])))

    batches = _rgs_batches(volume, num_cells, _EVAL_CHUNK)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            while True:
                wave = list(itertools.islice(batches, workers))
                if not wave:
                    break
                for block, values in pool.map(evaluate, wave):
                    consume(block, values)
    else:
        for block in batches:
            consume(*evaluate(block))

    maximizers = tuple(
        _labels_to_partition(labels) for value, labels in keep if value >= best - tie_tol
    )
    return PartitionSearchResult(
        n=n,
        alpha=float(alpha),
        num_cells=num_cells,
        bound=bound,
        max_mi=best,
        gap=bound - best,
        maximizers=maximizers,
        partitions_examined=examined,
        bound_violations=violations,
    )


@dataclass(frozen=True)
class RandomSearchResult:
    n: int
    alpha: float
    num_cells: int
    samples: int
    seed: int
    bound: float
    best_mi: float
    gap: float
    best_labels: tuple[int, ...]
    bound_violations: int
    projection_mi: float | None


def random_quantizer_search(
    n: int,
    alpha: float,
    num_cells: int,
    samples: int,
    seed: int,
    *,
    repair: bool = True,
    tol: float = 1e-9,
) -> RandomSearchResult:
    """Sample label vectors uniformly, optionally repair empty cells, and
    report the best mutual information found along with any violations of
    the cap.

    Deterministic for a fixed seed. When num_cells is 2^(n-1) the
    projection quantizer is evaluated as well, so the reported best never
    falls below the known optimum.
    """
    check_dimension(n)
    volume = 2**n
    rng = np.random.default_rng(seed)
    labels = rng.integers(0, num_cells, size=(samples, volume), dtype=np.int64)
    if repair and num_cells <= volume:
        sizes = np.apply_along_axis(np.bincount, 1, labels, minlength=num_cells)
        needs_repair = np.nonzero((sizes == 0).any(axis=1))[0]
        for idx in needs_repair:
            labels[idx] = _repair_labels(list(labels[idx]), num_cells)

    values = batch_mutual_information(labels, n, alpha, num_cells)
    bound = quantizer_mi_bound(n, alpha)
    violations = (
        int(np.count_nonzero(values > bound + tol))
        if num_cells <= 2 ** (n - 1)
        else 0
    )
    best_idx = int(np.argmax(values))
    best_mi = float(values[best_idx])
    best_labels = tuple(int(x) for x in labels[best_idx])

    projection_mi = None
    if num_cells == 2 ** (n - 1):
        proj = projection_quantizer(n)
        projection_mi = float(
            batch_mutual_information(
                np.array([proj.labels], dtype=np.int64), n, alpha, num_cells
            )[0]
        )
        if projection_mi > best_mi:
            best_mi = projection_mi
            best_labels = proj.labels

    return RandomSearchResult(
        n=n,
        alpha=float(alpha),
        num_cells=num_cells,
        samples=samples,
        seed=seed,
        bound=bound,
        best_mi=best_mi,
        gap=bound - best_mi,
        best_labels=best_labels,
        bound_violations=violations,
        projection_mi=projection_mi,
    )


@lru_cache(maxsize=None)
def _min_entropy_value(n: int, m: int, alpha: float) -> float:
    if m == 1:
        return min_entropy_closed_form(n, 1, alpha)
    if m == 2:
        return min_entropy_closed_form(n, 2, alpha)
    return min_entropy_monotone(n, m, alpha).value


@dataclass(frozen=True)
class ChainTrace:
    """The lower-bounding chain from the conditional output entropy down to
    the size-2 minimum, with the slack at every link.

    conditional_entropy >= size_weighted_minimum (each cell replaced by the
    minimum at its size), which regroups exactly into the two-point mixture
    form, which the mixture bound pushes down to the size-2 minimum.
    """

    n: int
    alpha: float
    conditional_entropy: float
    size_weighted_minimum: float
    regrouped_mixture: float
    pair_minimum: float
    slack_cells: float
    regroup_residual: float
    slack_mixture: float
    passed: bool


def entropy_chain_trace(f: Quantizer, alpha: float, *, tol: float = 1e-9) -> ChainTrace:
    """Evaluate every displayed quantity in the bound's derivation for one
    quantizer and certify each consecutive inequality.

    Requires all cells nonempty and 2^(n-1) cells. For the projection
    quantizer the whole chain is tight.
    """
    n = f.n
    volume = 2**n
    if f.num_cells != 2 ** (n - 1):
        raise ValueError(f"chain trace requires {2 ** (n - 1)} cells, got {f.num_cells}")
    profile = size_profile(f)
    if profile.count(0) > 0:
        raise ValueError("chain trace requires all cells nonempty")

    coefficient_total = sum((2 * m - 2) * lam for m, lam in profile.counts)
    if coefficient_total != volume:
        raise RuntimeError("size histogram is inconsistent with the cube volume")

    h1 = min_entropy_closed_form(n, 1, alpha)
    h2 = min_entropy_closed_form(n, 2, alpha)
    table = {m: _min_entropy_value(n, m, float(alpha)) for m, _ in profile.counts}

    q0 = conditional_output_entropy(f, alpha)
    q1 = sum(m * lam * table[m] for m, lam in profile.counts) / volume
    q2 = (
        2 * profile.count(2) * h2
        + sum(
            (2 * m - 2) * lam * ((m - 2) / (2 * m - 2) * h1 + m / (2 * m - 2) * table[m])
            for m, lam in profile.counts
            if m >= 3
        )
    ) / volume
    q3 = h2

    slack_cells = q0 - q1
    regroup_residual = abs(q1 - q2)
    slack_mixture = q2 - q3
    passed = slack_cells >= -tol and regroup_residual <= tol and slack_mixture >= -tol
    return ChainTrace(
        n=n,
        alpha=float(alpha),
        conditional_entropy=q0,
        size_weighted_minimum=q1,
        regrouped_mixture=q2,
        pair_minimum=q3,
        slack_cells=slack_cells,
        regroup_residual=regroup_residual,
        slack_mixture=slack_mixture,
        passed=passed,
    )
