"""Binary-input memoryless output-symmetric channels as finite mixtures of
symmetric flip channels.

A channel here is a finite set of (weight, crossover) components; the
channel draws a component independently per use and reveals which one it
drew. Erasure channels arise as {(1-e, 0), (e, 1/2)}. Capacity is
1 - sum(w * h(t)), and the equal-capacity symmetric channel is the least
informative one for every input, which is what check_least_capable
certifies numerically.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import (
    BscChannel,
    BudgetExceededError,
    CheckReport,
    binary_entropy,
    enumeration_budget,
    entropy_of_rows,
    transform_rows,
)
from .quantize import Quantizer, mutual_information

DEFAULT_STATE_BUDGET = 256

_WEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class BmsChannel:
    """Finite mixture of symmetric flip channels with revealed component.

    Crossovers above 1/2 are folded to 1 - t at construction (relabeling
    the output), so every stored component satisfies t in [0, 1/2].
    """

    components: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        if not self.components:
            raise ValueError("channel needs at least one component")
        folded = []
        total = 0.0
        for w, t in self.components:
            w = float(w)
            t = float(t)
            if w < 0.0:
                raise ValueError(f"negative component weight: {w}")
            if not 0.0 <= t <= 1.0:
                raise ValueError(f"crossover out of [0, 1]: {t}")
            total += w
            folded.append((w, min(t, 1.0 - t)))
        if abs(total - 1.0) > _WEIGHT_TOL:
            raise ValueError(f"component weights sum to {total}, not 1")
        object.__setattr__(self, "components", tuple(folded))

    @classmethod
    def bsc(cls, alpha: float) -> "BmsChannel":
        return cls(components=((1.0, alpha),))

    @classmethod
    def bec(cls, erasure_prob: float) -> "BmsChannel":
        """Binary erasure channel: a clean use with probability 1-e, a
        completely noisy (revealed) use with probability e."""
        if not 0.0 <= erasure_prob <= 1.0:
            raise ValueError(f"erasure probability out of [0, 1]: {erasure_prob}")
        return cls(components=((1.0 - erasure_prob, 0.0), (erasure_prob, 0.5)))

    @classmethod
    def from_dict(cls, data: dict) -> "BmsChannel":
        try:
            comps = tuple((item["w"], item["t"]) for item in data["components"])
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed channel spec: {exc}") from exc
        return cls(components=comps)

    def to_dict(self) -> dict:
        return {"components": [{"w": w, "t": t} for w, t in self.components]}


def load_channel(path) -> BmsChannel:
    """Read a channel spec file: {"components": [{"w": ..., "t": ...}, ...]}."""
    return BmsChannel.from_dict(json.loads(Path(path).read_text()))


def capacity(channel: BmsChannel) -> float:
    """Capacity in bits per use: 1 - sum(w * h(t))."""
    return 1.0 - sum(w * binary_entropy(t) for w, t in channel.components)


def matched_bsc(channel: BmsChannel, *, tol: float = 1e-12) -> BscChannel:
    """The symmetric flip channel with the same capacity, found by bisecting
    the strictly decreasing map alpha -> 1 - h(alpha) to within ``tol`` in
    capacity."""
    target = capacity(channel)
    if abs(target - 1.0) <= tol:
        return BscChannel(0.0)
    if abs(target) <= tol:
        return BscChannel(0.5)
    lo, hi = 0.0, 0.5
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        value = 1.0 - binary_entropy(mid)
        if abs(value - target) <= tol:
            return BscChannel(mid)
        if value > target:
            lo = mid
        else:
            hi = mid
    return BscChannel(0.5 * (lo + hi))


def _component_states(channel: BmsChannel, n: int, budget: int):
    count = len(channel.components) ** n
    if count > budget:
        raise BudgetExceededError(
            f"{count} component tuples exceeds budget {budget}"
        )
    return itertools.product(channel.components, repeat=n)


def bms_mutual_information(
    f: Quantizer, channel: BmsChannel, *, max_states: int | None = None
) -> float:
    """I(cell label; channel output with revealed components).

    The revealed component tuple is independent of the input, so the
    information is the component-weighted average of the per-tuple values,
    each computed with the per-coordinate flip kernel. Reduces exactly to
    the single-channel mutual information when the mixture has one
    component.
    """
    n = f.n
    budget = max_states if max_states is not None else enumeration_budget(DEFAULT_STATE_BUDGET)
    volume = 2**n
    cells = [cell for cell in f.cells() if cell]
    cell_mass = np.zeros((len(cells), volume))
    weights = np.empty(len(cells))
    for row, cell in enumerate(cells):
        cell_mass[row, list(cell)] = 1.0 / len(cell)
        weights[row] = len(cell) / volume

    total = 0.0
    for state in _component_states(channel, n, budget):
        state_weight = math.prod(w for w, _ in state)
        if state_weight == 0.0:
            continue
        noise = np.array([t for _, t in state])
        cond = float(np.sum(weights * entropy_of_rows(transform_rows(cell_mass, n, noise))))
        total += state_weight * (n - cond)
    return total


def _per_cell_information(
    f: Quantizer, channel: BmsChannel, budget: int
) -> list[tuple[int, float, float]]:
    """For each nonempty cell: (size, info through the mixture, info through
    the matched flip channel), where info is I(cell input; output)."""
    n = f.n
    matched = matched_bsc(channel)
    base_noise = sum(w * binary_entropy(t) for w, t in channel.components)
    cells = [cell for cell in f.cells() if cell]
    out = []
    for cell in cells:
        mass = np.zeros((1, 2**n))
        mass[0, list(cell)] = 1.0 / len(cell)
        mix_entropy = 0.0
        for state in _component_states(channel, n, budget):
            state_weight = math.prod(w for w, _ in state)
            if state_weight == 0.0:
                continue
            noise = np.array([t for _, t in state])
            mix_entropy += state_weight * float(
                entropy_of_rows(transform_rows(mass, n, noise))[0]
            )
        info_mix = mix_entropy - n * base_noise
        bsc_entropy = float(
            entropy_of_rows(transform_rows(mass, n, np.full(n, matched.alpha)))[0]
        )
        info_bsc = bsc_entropy - n * binary_entropy(matched.alpha)
        out.append((len(cell), info_mix, info_bsc))
    return out


def check_least_capable(
    f: Quantizer,
    channel: BmsChannel,
    *,
    tol: float = 1e-9,
    max_states: int | None = None,
    per_cell: bool = False,
) -> CheckReport:
    """Certify that the mixture channel is at least as informative about
    the cell label as the equal-capacity flip channel, and that the
    (n-1) * capacity cap holds when the quantizer has 2^(n-1) cells.

    With ``per_cell`` the report also carries the per-cell comparison
    (mixture info >= matched-channel info for each cell input), which is
    the stronger statement the aggregate follows from.
    """
    n = f.n
    budget = max_states if max_states is not None else enumeration_budget(DEFAULT_STATE_BUDGET)
    cap = capacity(channel)
    matched = matched_bsc(channel)
    info_mix = bms_mutual_information(f, channel, max_states=budget)
    info_bsc = mutual_information(f, matched.alpha)

    slacks = [info_bsc - info_mix]
    details: dict = {
        "capacity": cap,
        "matched_alpha": matched.alpha,
        "mi_mixture": info_mix,
        "mi_matched_bsc": info_bsc,
    }
    if f.num_cells == 2 ** (n - 1):
        cap_slack = (n - 1) * cap - info_mix
        slacks.append(cap_slack)
        details["cap"] = (n - 1) * cap
        details["cap_slack"] = cap_slack
    if per_cell:
        cell_rows = _per_cell_information(f, channel, budget)
        details["per_cell"] = cell_rows
        slacks.extend(info_m - info_b for _, info_m, info_b in cell_rows)

    worst = min(slacks)
    return CheckReport(
        name="least-capable",
        passed=worst >= -tol,
        slack=worst,
        details=details,
    )
