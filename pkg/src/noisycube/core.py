"""Bit-indexed hypercube primitives.

Vertices of the n-cube are integers in [0, 2^n); bit i of the index is
coordinate i+1 (coordinates are 1-based, bit 0 holds the first coordinate).
All distributions live on the full vertex set as dense length-2^n vectors.
Every object is immutable after construction and safe to share across
threads.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass, field
from functools import lru_cache, reduce
from typing import Sequence

import numpy as np

MAX_DIMENSION = 24

PMF_TOL = 1e-12


class BudgetExceededError(RuntimeError):
    """An enumeration would exceed its configured budget.

    Raised eagerly, before any work is discarded; results are never
    silently truncated.
    """


def enumeration_budget(fallback: int) -> int:
    """Default budget for an enumeration, honoring the env override.

    ``NOISYCUBE_MAX_ENUM``, when set, replaces the built-in default for
    every enumeration cap (explicit function arguments still win).
    """
    value = os.environ.get("NOISYCUBE_MAX_ENUM")
    return int(value) if value else fallback


def check_dimension(n: int) -> int:
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise ValueError(f"dimension must be an integer, got {n!r}")
    if not 1 <= n <= MAX_DIMENSION:
        raise ValueError(f"dimension must be in [1, {MAX_DIMENSION}], got {n}")
    return int(n)


def binary_entropy(p: float) -> float:
    """Entropy in bits of a Bernoulli(p) variable, with 0*log(0) = 0."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability out of [0, 1]: {p}")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def star(a: float, b: float) -> float:
    """Crossover probability of two cascaded binary symmetric channels."""
    if not 0.0 <= a <= 1.0:
        raise ValueError(f"probability out of [0, 1]: {a}")
    if not 0.0 <= b <= 1.0:
        raise ValueError(f"probability out of [0, 1]: {b}")
    return a * (1.0 - b) + (1.0 - a) * b


@dataclass(frozen=True)
class BscChannel:
    """Binary symmetric channel with crossover probability in [0, 1/2]."""

    alpha: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.alpha <= 0.5:
            raise ValueError(f"crossover out of [0, 1/2]: {self.alpha}")


def crossover_vector(noise, n: int) -> np.ndarray:
    """Normalize a scalar or length-n sequence of crossovers to an array.

    Each entry must lie in [0, 1/2].
    """
    if isinstance(noise, BscChannel):
        noise = noise.alpha
    arr = np.asarray(noise, dtype=np.float64)
    if arr.ndim == 0:
        arr = np.full(n, float(arr))
    if arr.shape != (n,):
        raise ValueError(f"noise vector has shape {arr.shape}, expected ({n},)")
    if np.any(arr < 0.0) or np.any(arr > 0.5):
        raise ValueError("crossover out of [0, 1/2]")
    return arr


@dataclass(frozen=True)
class VertexSet:
    """A subset of the n-cube, stored as a strictly increasing index tuple."""

    n: int
    members: tuple[int, ...]

    def __post_init__(self) -> None:
        check_dimension(self.n)
        members = tuple(int(v) for v in self.members)
        if sorted(members) != list(members):
            members = tuple(sorted(members))
        if len(set(members)) != len(members):
            raise ValueError("duplicate vertices in set")
        if members and not 0 <= members[0] <= members[-1] < 2**self.n:
            raise ValueError(f"vertex index out of [0, 2^{self.n})")
        object.__setattr__(self, "members", members)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, vertex: int) -> bool:
        return vertex in set(self.members)


def xor_translate(s: VertexSet, t: int) -> VertexSet:
    if not 0 <= t < 2**s.n:
        raise ValueError(f"translation out of [0, 2^{s.n})")
    return VertexSet(s.n, tuple(v ^ t for v in s.members))


def permute_coordinates(s: VertexSet, perm: Sequence[int]) -> VertexSet:
    """Relabel coordinates: bit k of each output index is bit perm[k] of the input."""
    if sorted(perm) != list(range(s.n)):
        raise ValueError(f"not a permutation of 0..{s.n - 1}: {perm}")
    mapped = []
    for v in s.members:
        w = 0
        for k, src in enumerate(perm):
            w |= ((v >> src) & 1) << k
        mapped.append(w)
    return VertexSet(s.n, tuple(mapped))


def is_monotone(s: VertexSet) -> bool:
    """True when the set is downward closed under the bitwise partial order."""
    members = set(s.members)
    for v in s.members:
        for i in range(s.n):
            if v & (1 << i) and (v ^ (1 << i)) not in members:
                return False
    return True


_CANONICAL_MAX_N = 8


@lru_cache(maxsize=None)
def _coordinate_maps(n: int) -> np.ndarray:
    """Vertex relabeling maps for all n! coordinate permutations, shape (n!, 2^n)."""
    verts = np.arange(2**n, dtype=np.int64)
    rows = []
    for perm in itertools.permutations(range(n)):
        out = np.zeros_like(verts)
        for k, src in enumerate(perm):
            out |= ((verts >> src) & 1) << k
        rows.append(out)
    return np.array(rows)


def canonical_form(s: VertexSet) -> VertexSet:
    """Lexicographically least image of the set under coordinate permutations
    composed with XOR translations.

    Equal canonical forms characterize the orbit; the representative of a
    nonempty set always contains vertex 0.
    """
    if s.n > _CANONICAL_MAX_N:
        raise ValueError(f"canonicalization supported up to n={_CANONICAL_MAX_N}")
    if not s.members:
        return s
    best = _canonical_members(np.array(s.members, dtype=np.int64), s.n)
    return VertexSet(s.n, tuple(int(v) for v in best))


def _canonical_members(members: np.ndarray, n: int) -> np.ndarray:
    # The least sorted image starts with 0, so only translations by members
    # need be considered.
    maps = _coordinate_maps(n)
    translated = members[None, :] ^ members[:, None]
    candidates = maps[:, translated].transpose(1, 0, 2).reshape(-1, len(members))
    candidates.sort(axis=1)
    order = np.lexsort(candidates.T[::-1])
    return candidates[order[0]]


@dataclass(frozen=True, eq=False)
class Pmf:
    """Probability mass function over all 2^n vertices."""

    n: int
    mass: np.ndarray

    def __post_init__(self) -> None:
        check_dimension(self.n)
        mass = np.asarray(self.mass, dtype=np.float64).copy()
        if mass.shape != (2**self.n,):
            raise ValueError(f"mass has shape {mass.shape}, expected ({2**self.n},)")
        if np.any(mass < 0.0):
            raise ValueError("negative probability mass")
        total = float(np.sum(mass))
        if abs(total - 1.0) > PMF_TOL:
            raise ValueError(f"mass sums to {total}, not 1 within {PMF_TOL}")
        mass.setflags(write=False)
        object.__setattr__(self, "mass", mass)


def uniform_pmf_on(s: VertexSet) -> Pmf:
    if not s.members:
        raise ValueError("cannot place a uniform distribution on an empty set")
    mass = np.zeros(2**s.n)
    mass[list(s.members)] = 1.0 / len(s.members)
    return Pmf(s.n, mass)


def transform_rows(rows: np.ndarray, n: int, noise: np.ndarray) -> np.ndarray:
    """Apply the per-coordinate symmetric flip kernel to each row of a
    (batch, 2^n) array.

    Rows need not be normalized; the kernel is linear and doubly stochastic
    in every coordinate. O(n * 2^n) per row.
    """
    out = rows.reshape(rows.shape[:-1] + (2,) * n).copy()
    offset = out.ndim - n
    for i, a in enumerate(noise):
        if a == 0.0:
            continue
        axis = offset + (n - 1 - i)  # bit i of the index = coordinate i+1
        flipped = np.flip(out, axis=axis)
        out = (1.0 - a) * out + a * flipped
    return out.reshape(rows.shape)


def noise_transform(p: Pmf, noise) -> Pmf:
    """Distribution of V xor Z where V ~ p and Z has independent
    Bernoulli(noise_i) coordinates."""
    vec = crossover_vector(noise, p.n)
    return Pmf(p.n, transform_rows(p.mass[None, :], p.n, vec)[0])


def entropy_of_rows(rows: np.ndarray) -> np.ndarray:
    """Shannon entropy in bits of each row (rows may be sub-normalized)."""
    safe = np.where(rows > 0.0, rows, 1.0)
    contrib = -rows * np.log2(safe)
    return np.maximum(np.sum(contrib, axis=-1), 0.0)


def entropy(p: Pmf) -> float:
    """Shannon entropy in bits; always in [0, n]."""
    return float(entropy_of_rows(p.mass[None, :])[0])


@lru_cache(maxsize=None)
def _kernel_cached(n: int, noise_key: tuple[float, ...]) -> np.ndarray:
    base = [
        np.array([[1.0 - a, a], [a, 1.0 - a]]) for a in reversed(noise_key)
    ]
    kernel = reduce(np.kron, base)
    kernel.setflags(write=False)
    return kernel


def channel_kernel(n: int, noise) -> np.ndarray:
    """Dense 2^n x 2^n transition matrix of the product flip channel.

    Row v is the output distribution for the point mass at vertex v;
    equals noise_transform applied to each point mass.
    """
    vec = crossover_vector(noise, n)
    return _kernel_cached(n, tuple(float(a) for a in vec))


@dataclass(frozen=True)
class CheckReport:
    """Outcome of one numerical certification.

    ``slack`` is the smallest margin observed across all inequalities the
    check covers (non-negative means the inequality held with room).
    """

    name: str
    passed: bool
    slack: float
    details: dict = field(default_factory=dict)
