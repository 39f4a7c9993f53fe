"""Weak (t, r)-designs: construction at the prescribed seed length and verification."""

import math
from dataclasses import dataclass
from typing import Any, Optional, Sequence

import numpy as np

from ..qcore.errors import LabError
from ..utils.logging import get_logger

logger = get_logger("extractors.design")


class DesignConstructionError(LabError):
    """No verified design could be produced."""

    def __init__(self, message: str, index: Optional[int] = None):
        self.index = index
        super().__init__(message if index is None else f"{message} (set {index})")


@dataclass(frozen=True)
class WeakDesign:
    """Sets S_1..S_m ⊆ [d] of size t with Σ_{j<i} 2^{|S_i ∩ S_j|} ≤ r·m."""

    sets: tuple[tuple[int, ...], ...]
    t: int
    r: float
    d: int

    @property
    def m(self) -> int:
        return len(self.sets)

    def seed_bits(self, y: Sequence[int], i: int) -> tuple[int, ...]:
        """y restricted to S_i, in increasing index order."""
        if len(y) != self.d:
            raise ValueError(f"seed has {len(y)} bits, design needs {self.d}")
        return tuple(y[k] for k in self.sets[i])

    def to_dict(self) -> dict[str, Any]:
        return {"t": self.t, "r": self.r, "d": self.d, "sets": [list(s) for s in self.sets]}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "WeakDesign":
        sets = tuple(tuple(sorted(int(k) for k in s)) for s in data["sets"])
        return cls(sets, int(data["t"]), float(data["r"]), int(data["d"]))


@dataclass(frozen=True)
class DesignCheck:
    """Verifier outcome; worst_index is the set with the largest overlap sum."""

    valid: bool
    worst_index: int
    worst_sum: float
    bound: float
    message: str = ""


def verify_weak_design(design: WeakDesign) -> DesignCheck:
    """Check set sizes, range and the overlap condition directly on Python sets."""
    universe = set(range(design.d))
    as_sets = [set(s) for s in design.sets]
    for i, s in enumerate(as_sets):
        if len(s) != design.t or len(design.sets[i]) != design.t:
            return DesignCheck(False, i, math.inf, design.r * design.m, f"set {i} does not have {design.t} elements")
        if not s <= universe:
            return DesignCheck(False, i, math.inf, design.r * design.m, f"set {i} leaves [0, {design.d})")
    bound = design.r * design.m
    worst_index, worst_sum = 0, 0.0
    for i, s in enumerate(as_sets):
        total = sum(2 ** len(s & as_sets[j]) for j in range(i))
        if total > worst_sum:
            worst_index, worst_sum = i, float(total)
    valid = worst_sum <= bound + 1e-12
    message = "" if valid else f"overlap sum {worst_sum} exceeds r*m = {bound}"
    return DesignCheck(valid, worst_index, worst_sum, bound, message)


def overlap_parameter(sets: Sequence[Sequence[int]]) -> float:
    """Smallest r ≥ 1 for which the sets form a weak design."""
    as_sets = [set(s) for s in sets]
    m = len(as_sets)
    worst = max((sum(2 ** len(s & as_sets[j]) for j in range(i)) for i, s in enumerate(as_sets)), default=0)
    return max(1.0, worst / m) if m else 1.0


def raz_seed_length(t: int, m: int) -> int:
    """d = t·⌈t/ln 2⌉·⌈log₂ 4m⌉."""
    if t < 1 or m < 1:
        raise ValueError("t and m must be >= 1")
    return t * math.ceil(t / math.log(2)) * math.ceil(math.log2(4 * m))


def _group_sizes(m: int, groups: int) -> list[int]:
    sizes, rem = [], m
    for _ in range(groups):
        size = math.ceil(rem / 2) if rem > 1 else rem
        sizes.append(size)
        rem -= size
    if rem:
        raise DesignConstructionError(f"{groups} groups cannot hold {m} sets")
    return sizes


def _place_group(size: int, t: int, block: int, offset: int, rng: np.random.Generator) -> list[tuple[int, ...]]:
    """Greedy placement inside one group by conditional expectation.

    Each set takes one element from each of t blocks of length ``block``.
    Choosing the element that minimises Σ_j 2^{matches_j} over earlier sets
    never raises the conditional expectation, which starts at most
    2·(size − 1).
    """
    chosen: list[list[int]] = []
    for _ in range(size):
        matches = np.zeros(len(chosen))
        picks: list[int] = []
        for b in range(t):
            weights = np.full(block, float(np.sum(2.0 ** matches)))
            for j, other in enumerate(chosen):
                weights[other[b]] += 2.0 ** matches[j]
            candidates = np.flatnonzero(weights <= weights.min() + 1e-12)
            e = int(rng.choice(candidates))
            picks.append(e)
            for j, other in enumerate(chosen):
                if other[b] == e:
                    matches[j] += 1
        chosen.append(picks)
    return [tuple(offset + b * block + e for b, e in enumerate(p)) for p in chosen]


def build_weak_design(t: int, m: int, seed: int = 0, restarts: int = 8) -> WeakDesign:
    """Weak (t, 1)-design on exactly raz_seed_length(t, m) seed bits.

    Sets are split into ⌈log₂ 4m⌉ groups on disjoint sub-universes of size
    t·⌈t/ln 2⌉, group g taking half of the sets not yet placed.
    """
    d = raz_seed_length(t, m)
    block = math.ceil(t / math.log(2))
    groups = math.ceil(math.log2(4 * m))
    sizes = _group_sizes(m, groups)

    last: Optional[DesignCheck] = None
    for attempt in range(restarts):
        rng = np.random.default_rng([seed, attempt])
        sets: list[tuple[int, ...]] = []
        for g, size in enumerate(sizes):
            sets.extend(_place_group(size, t, block, g * t * block, rng))
        design = WeakDesign(tuple(sets), t, 1.0, d)
        last = verify_weak_design(design)
        if last.valid:
            logger.debug(f"Weak design t={t}, m={m}, d={d} built on attempt {attempt + 1}")
            return design
        logger.debug(f"Design attempt {attempt + 1} rejected: {last.message}")
    assert last is not None
    raise DesignConstructionError(f"no weak ({t}, 1)-design with m={m} found at d={d}", last.worst_index)


def cyclic_design(t: int, m: int) -> WeakDesign:
    """S_i = {i, …, i+t−1} mod m on d = m seed bits; r is measured, not assumed."""
    if not 1 <= t <= m:
        raise DesignConstructionError(f"cyclic design needs 1 <= t <= m, got t={t}, m={m}")
    sets = tuple(tuple(sorted((i + k) % m for k in range(t))) for i in range(m))
    design = WeakDesign(sets, t, overlap_parameter(sets), m)
    check = verify_weak_design(design)
    if not check.valid:
        raise DesignConstructionError(check.message, check.worst_index)
    return design
