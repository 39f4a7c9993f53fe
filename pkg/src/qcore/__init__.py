"""Finite-dimensional quantum state algebra."""

from .errors import LabError, InvalidStateError, DimensionMismatchError, SizeCapError
from .states import (
    DensityOperator,
    PureVector,
    CqState,
    TraceNorm,
    tensor,
    partial_trace,
    purify,
    maximally_mixed,
    maximally_entangled,
    random_density,
    random_cq_state,
)
from .channels import KrausChannel, Povm, ClassicallyControlledChannel, apply_channel, povm_guess_probability
from .measurements import helstrom_measurement, pretty_good_measurement

__all__ = [
    "LabError",
    "InvalidStateError",
    "DimensionMismatchError",
    "SizeCapError",
    "DensityOperator",
    "PureVector",
    "CqState",
    "TraceNorm",
    "tensor",
    "partial_trace",
    "purify",
    "maximally_mixed",
    "maximally_entangled",
    "random_density",
    "random_cq_state",
    "KrausChannel",
    "Povm",
    "ClassicallyControlledChannel",
    "apply_channel",
    "povm_guess_probability",
    "helstrom_measurement",
    "pretty_good_measurement",
]
