"""Statevector reconstruction of a source from an inner-product predictor."""

from .oracle import PredictorOracle, make_ideal_ip_predictor, make_biased_predictor
from .circuit import (
    ReconstructionCircuit,
    ReconstructionRow,
    build_reconstructor,
    run_reconstruction,
    basis_side_info,
    reconstruction_sweep,
)

__all__ = [
    "PredictorOracle",
    "make_ideal_ip_predictor",
    "make_biased_predictor",
    "ReconstructionCircuit",
    "ReconstructionRow",
    "build_reconstructor",
    "run_reconstruction",
    "basis_side_info",
    "reconstruction_sweep",
]
