"""Computational distance between two operators against a bounded adversary family."""

from dataclasses import dataclass
from typing import Any

from ..qcore.states import OperatorLike
from .adversary import AdversaryFamily
from .distances import _pair, trace_distance


@dataclass(frozen=True)
class DistanceInterval:
    """Certified interval [lower, upper] for the s-bounded distance."""

    lower: float
    upper: float
    best_strategy: str
    family_size: int

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def to_dict(self) -> dict[str, Any]:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "best_strategy": self.best_strategy,
            "family_size": self.family_size,
        }


def computational_distance(a: OperatorLike, b: OperatorLike, family: AdversaryFamily) -> DistanceInterval:
    """Distance of a and b as seen by the family.

    The lower endpoint is achieved by a concrete family member; the upper
    endpoint is the trace distance. An unbounded family collapses both to
    the trace distance.
    """
    ma, mb = _pair(a, b)
    td = trace_distance(ma, mb)
    if family.unbounded:
        return DistanceInterval(td, td, "helstrom", len(family))
    best, name = family.best_advantage(ma, mb)
    return DistanceInterval(min(best, td), td, name, len(family))
