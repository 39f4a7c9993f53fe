"""State distances and bounded-adversary distinguishing."""

from .distances import (
    trace_distance,
    fidelity,
    root_fidelity,
    generalized_fidelity,
    purified_distance,
    block_purified_distance,
    operator_leq,
    OrderCheck,
)
from .adversary import (
    AdversaryFamily,
    Strategy,
    StrategyKind,
    InvalidFamilyError,
    constant_family,
    named_family,
    unbounded_family,
    enumerated_family,
    family_from_dict,
)
from .computational import DistanceInterval, computational_distance

__all__ = [
    "trace_distance",
    "fidelity",
    "root_fidelity",
    "generalized_fidelity",
    "purified_distance",
    "block_purified_distance",
    "operator_leq",
    "OrderCheck",
    "AdversaryFamily",
    "Strategy",
    "StrategyKind",
    "InvalidFamilyError",
    "constant_family",
    "named_family",
    "unbounded_family",
    "enumerated_family",
    "family_from_dict",
    "DistanceInterval",
    "computational_distance",
]
