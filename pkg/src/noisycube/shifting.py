"""Single-coordinate compression of vertex sets.

One compression step at coordinate i moves every member with the i-th bit
set whose bit-cleared copy is absent down to that copy. Iterating at the
smallest applicable coordinate terminates in a downward closed set of the
same size. The certificates here verify, step by step, that compression
never decreases the conditional bias of the compressed bit given the other
output coordinates, and consequently never increases the noisy output
entropy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    CheckReport,
    VertexSet,
    crossover_vector,
    is_monotone,
    transform_rows,
)
from .subsets import noisy_subset_entropy


@dataclass(frozen=True)
class ShiftStep:
    """One compression step; ``moved`` holds the vertices whose bit was
    cleared. A step with nothing to move is trivial (after == before)."""

    coordinate: int
    moved: VertexSet
    before: VertexSet
    after: VertexSet

    @property
    def trivial(self) -> bool:
        return not self.moved.members


def shift_coordinate(s: VertexSet, i: int) -> ShiftStep:
    """Compress ``s`` at coordinate i (1-based)."""
    if not s.members:
        raise ValueError("empty vertex set")
    if not 1 <= i <= s.n:
        raise ValueError(f"coordinate must be in [1, {s.n}], got {i}")
    bit = 1 << (i - 1)
    members = set(s.members)
    moved = [v for v in s.members if v & bit and (v ^ bit) not in members]
    after = (members - set(moved)) | {v ^ bit for v in moved}
    return ShiftStep(
        coordinate=i,
        moved=VertexSet(s.n, tuple(moved)),
        before=s,
        after=VertexSet(s.n, tuple(after)),
    )


def shift_to_monotone(s: VertexSet) -> tuple[VertexSet, list[ShiftStep]]:
    """Repeatedly compress at the smallest nontrivial coordinate until the
    set is downward closed. Cardinality is preserved; the total bit weight
    strictly decreases each step, so the loop terminates."""
    current = s
    steps: list[ShiftStep] = []
    while True:
        step = None
        for i in range(1, s.n + 1):
            candidate = shift_coordinate(current, i)
            if not candidate.trivial:
                step = candidate
                break
        if step is None:
            break
        steps.append(step)
        current = step.after
    if not is_monotone(current):
        raise RuntimeError("compression terminated on a non-monotone set")
    return current, steps


@dataclass(frozen=True)
class BiasDecomposition:
    """Conditional structure at one tail output word.

    ``omega`` indexes the n-1 coordinates other than the compressed one
    (bit k of omega is the k-th remaining coordinate in increasing order).
    a, b, c partition the conditional probability of the tail projection by
    whether both, only the upper, or only the lower copy of the compressed
    bit belongs to the set. The bias fields are |P(bit = 1 | tail output) -
    1/2| before and after compression.
    """

    omega: int
    tail_prob: float
    a: float
    b: float
    c: float
    bias_before: float
    bias_after: float


def _tail_index(v: int, bit: int) -> int:
    low = v & (bit - 1)
    high = (v >> 1) & ~(bit - 1)
    return low | high


def _conditional_bit_stats(
    s: VertexSet, i: int, tail_noise: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Tail output distribution and conditional P(bit_i = 1 | tail output).

    Returns (tail_probs, p_one) over all 2^(n-1) tail words; p_one is
    meaningful only where tail_probs > 0.
    """
    n = s.n
    bit = 1 << (i - 1)
    size = 2 ** (n - 1)
    mass_one = np.zeros(size)
    mass_zero = np.zeros(size)
    for v in s.members:
        t = _tail_index(v, bit)
        if v & bit:
            mass_one[t] += 1.0 / len(s.members)
        else:
            mass_zero[t] += 1.0 / len(s.members)
    noisy = transform_rows(np.vstack([mass_one, mass_zero]), n - 1, tail_noise)
    tail_probs = noisy[0] + noisy[1]
    with np.errstate(invalid="ignore", divide="ignore"):
        p_one = np.where(tail_probs > 0.0, noisy[0] / tail_probs, 0.0)
    return tail_probs, p_one


def bias_check(
    s: VertexSet, i: int, alpha, *, tol: float = 1e-12
) -> list[BiasDecomposition]:
    """Per-tail-word certificate that compressing coordinate i can only
    increase the conditional bias of that bit.

    For every tail output word of positive probability, verifies that the
    tail output distribution is unchanged by compression, that the bias
    after dominates the bias before, and that the bias-square gain equals
    b*c exactly. Zero-probability words (possible only at alpha = 0) are
    skipped. Raises on any violation; the returned list carries one entry
    per surviving word for inspection.
    """
    n = s.n
    noise = crossover_vector(alpha, n)
    bit = 1 << (i - 1)
    tail_noise = np.delete(noise, i - 1)
    step = shift_coordinate(s, i)

    tail_probs, p_one_before = _conditional_bit_stats(s, i, tail_noise)
    tail_probs_after, p_one_after = _conditional_bit_stats(step.after, i, tail_noise)
    if np.max(np.abs(tail_probs - tail_probs_after)) > tol:
        raise RuntimeError("tail output distribution changed under compression")

    # Classify tail projections by which copies of the compressed bit are
    # present, then push each class through the tail channel.
    size = 2 ** (n - 1)
    members = set(s.members)
    both = np.zeros(size)
    upper_only = np.zeros(size)
    lower_only = np.zeros(size)
    seen_tails = set()
    for v in s.members:
        t = _tail_index(v, bit)
        if t in seen_tails:
            continue
        seen_tails.add(t)
        has_upper = (v | bit) in members
        has_lower = (v & ~bit) in members
        if has_upper and has_lower:
            both[t] = 2.0 / len(s.members)
        elif has_upper:
            upper_only[t] = 1.0 / len(s.members)
        else:
            lower_only[t] = 1.0 / len(s.members)
    noisy_classes = transform_rows(
        np.vstack([both, upper_only, lower_only]), n - 1, tail_noise
    )

    result = []
    for omega in range(size):
        prob = float(tail_probs[omega])
        if prob <= 0.0:
            continue
        a = float(noisy_classes[0, omega]) / prob
        b = float(noisy_classes[1, omega]) / prob
        c = float(noisy_classes[2, omega]) / prob
        if abs(a + b + c - 1.0) > tol:
            raise RuntimeError(f"class probabilities sum to {a + b + c} at word {omega}")
        bias_before = abs(float(p_one_before[omega]) - 0.5)
        bias_after = abs(float(p_one_after[omega]) - 0.5)
        if bias_after < bias_before - tol:
            raise RuntimeError(f"bias decreased under compression at word {omega}")
        gain = bias_after**2 - bias_before**2
        if abs(gain - b * c) > tol:
            raise RuntimeError(
                f"bias-square gain {gain} differs from b*c = {b * c} at word {omega}"
            )
        result.append(
            BiasDecomposition(
                omega=omega,
                tail_prob=prob,
                a=a,
                b=b,
                c=c,
                bias_before=bias_before,
                bias_after=bias_after,
            )
        )
    return result


def check_entropy_nonincrease(
    s: VertexSet, alpha, *, tol: float = 1e-9
) -> CheckReport:
    """Certify that every compression step on the way to a downward closed
    set leaves the noisy output entropy non-increasing."""
    final, steps = shift_to_monotone(s)
    entropies = [noisy_subset_entropy(s, alpha)]
    for step in steps:
        entropies.append(noisy_subset_entropy(step.after, alpha))
    drops = [a - b for a, b in zip(entropies, entropies[1:])]
    worst = min(drops) if drops else 0.0
    return CheckReport(
        name="entropy-descent",
        passed=worst >= -tol and len(final) == len(s),
        slack=worst,
        details={
            "initial": list(s.members),
            "final": list(final.members),
            "entropies": entropies,
            "steps": len(steps),
        },
    )
