"""Centralized numeric constants for the unpredictability lab.

This module consolidates the tolerances, solver limits and size caps used
throughout the codebase so every check compares against the same numbers.
"""

from dataclasses import dataclass


# =============================================================================
# Tolerances
# =============================================================================

@dataclass(frozen=True)
class ToleranceConstants:
    """Absolute tolerances for validity and property checks."""

    # State validity
    HERMITIAN: float = 1e-10
    PSD: float = 1e-10
    TRACE: float = 1e-10

    # Round trips (purification, dilation, serialization checks)
    ROUND_TRIP: float = 1e-9

    # Eigenvalues below this are dropped from entropy sums
    ENTROPY_CUTOFF: float = 1e-14

    # Property checks
    INEQUALITY: float = 1e-7
    EXTENSION: float = 1e-8
    MARKOV: float = 1e-8
    INVARIANCE: float = 1e-9
    SUBADDITIVITY: float = 1e-9


TOLERANCE = ToleranceConstants()


# =============================================================================
# Guessing-probability solver
# =============================================================================

@dataclass(frozen=True)
class SolverConstants:
    """Fixed-point solver limits."""

    GAP: float = 1e-7
    DUAL_FEASIBILITY: float = 1e-8
    MAX_ITERATIONS: int = 10_000

    # Inverse square roots treat eigenvalues below this as zero
    PINV_CUTOFF: float = 1e-13

    # Commutation test for the exact classical fast path
    COMMUTE: float = 1e-12


SOLVER = SolverConstants()


# =============================================================================
# Size limits
# =============================================================================

@dataclass(frozen=True)
class LimitConstants:
    """Caps keeping every computation desk-scale."""

    MAX_DIMENSION: int = 256
    STATEVECTOR_MAX_QUBITS: int = 22
    MAX_SEED_BITS: int = 16
    IP_MAX_SOURCE_BITS: int = 12
    MAX_AUX_DIMENSION: int = 64
    PROTOCOL_MAX_TOTAL_DIMENSION: int = 1024

    # Circuit enumeration
    ENUMERATE_MAX_QUBITS: int = 3
    ENUMERATE_MAX_GATES: int = 6


LIMITS = LimitConstants()


# =============================================================================
# Circuit cost model
# =============================================================================

@dataclass(frozen=True)
class CircuitConstants:
    """Gate costs in the {H, T, CNOT} model; measurement is free."""

    GATE_SET: tuple[str, ...] = ("H", "T", "CNOT")
    MEASUREMENT_COST: int = 0
    # X on the phase qubit when preparing |1>
    PREPARE_COST: int = 1
    PHASE_CNOT_COST: int = 1

    # Declared costs for named strategies (per measured qubit)
    BASIS_MEASUREMENT_COST: int = 0
    HELSTROM_COST_PER_QUBIT: int = 4
    PRETTY_GOOD_COST_PER_QUBIT: int = 6

    # Reversible oracle bookkeeping
    TOFFOLI_COST: int = 15
    BIAS_STAGE_COST: int = 8
    LEAK_COST_PER_QUBIT: int = 1


CIRCUIT = CircuitConstants()
