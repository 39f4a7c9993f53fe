"""Bounded quantum leakage channels, dilation and chain-rule degradation."""

from .channels import (
    LeakageChannel,
    LeakageValidationError,
    ValidationReport,
    validate_leakage_channel,
    apply_leakage,
    apply_leakage_cq,
    append_zero,
    classical_bit_leak,
    dense_bit_copy,
    superdense_leak,
    superdense_state,
    cnot_copy_attack,
    cnot_copy_state,
    random_leakage_channel,
)
from .dilation import DilationResult, stinespring_dilate, dilation_round_trip
from .degradation import DegradationReport, measure_chain_degradation

__all__ = [
    "LeakageChannel",
    "LeakageValidationError",
    "ValidationReport",
    "validate_leakage_channel",
    "apply_leakage",
    "apply_leakage_cq",
    "append_zero",
    "classical_bit_leak",
    "dense_bit_copy",
    "superdense_leak",
    "superdense_state",
    "cnot_copy_attack",
    "cnot_copy_state",
    "random_leakage_channel",
    "DilationResult",
    "stinespring_dilate",
    "dilation_round_trip",
    "DegradationReport",
    "measure_chain_degradation",
]
