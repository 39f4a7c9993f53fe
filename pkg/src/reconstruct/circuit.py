"""Reconstruction circuit: turns an inner-product predictor into a guesser for the whole source.

Register layout of the statevector is (phase a, seed y, work, side e).
Stages: prepare |1⟩|0ⁿ⟩, Hadamard on (a, y), predictor, CNOT from the
output qubit to a, inverse predictor, Hadamard on (a, y), measure (a, y).
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Iterable, Optional, Sequence

import numpy as np
from scipy.linalg import hadamard

from ..config import max_dimension
from ..constants import CIRCUIT
from ..qcore.errors import DimensionMismatchError, SizeCapError
from ..qcore.states import PureVector
from ..utils.logging import PerformanceLogger, get_logger
from .oracle import PredictorOracle, make_biased_predictor, make_ideal_ip_predictor

logger = get_logger("reconstruct.circuit")

STAGES = (
    "prepare",
    "hadamard",
    "predictor",
    "phase-cnot",
    "predictor-inverse",
    "hadamard",
    "measure",
)


@dataclass(frozen=True, eq=False)
class ReconstructionCircuit:
    """The guessing circuit around one predictor oracle."""

    oracle: PredictorOracle
    stages: tuple[str, ...] = STAGES

    @property
    def n(self) -> int:
        return self.oracle.n

    @property
    def gate_count(self) -> int:
        """2s + 2(n+1) Hadamards + phase CNOT + preparation X."""
        s = self.oracle.declared_gate_cost
        return 2 * s + 2 * (self.n + 1) + CIRCUIT.PHASE_CNOT_COST + CIRCUIT.PREPARE_COST

    # Stages ------------------------------------------------------------

    def _prepare(self, side: np.ndarray) -> np.ndarray:
        psi = np.zeros((2, 1 << self.n, self.oracle.work_dim, self.oracle.side_dim), dtype=complex)
        psi[1, 0, 0, :] = side
        return psi

    def _hadamard(self, psi: np.ndarray) -> np.ndarray:
        shape = psi.shape
        h = hadamard(2 * shape[1]).astype(complex) / np.sqrt(2 * shape[1])
        flat = psi.reshape(2 * shape[1], -1)
        return (h @ flat).reshape(shape)

    def _predictor(self, psi: np.ndarray, inverse: bool = False) -> np.ndarray:
        blocks = self.oracle.blocks
        if inverse:
            return np.einsum("eyji,ayje->ayie", blocks.conj(), psi, optimize=True)
        return np.einsum("eyij,ayje->ayie", blocks, psi, optimize=True)

    def _phase_cnot(self, psi: np.ndarray) -> np.ndarray:
        out = psi.copy()
        half = self.oracle.work_dim // 2
        out[:, :, half:, :] = psi[::-1, :, half:, :]
        return out

    def final_state(self, side_info: PureVector) -> np.ndarray:
        """Pre-measurement statevector with shape (2, 2^n, work, side)."""
        if side_info.dim != self.oracle.side_dim:
            raise DimensionMismatchError(
                f"side information has dimension {side_info.dim}, oracle expects {self.oracle.side_dim}"
            )
        psi = self._prepare(side_info.amplitudes)
        psi = self._hadamard(psi)
        psi = self._predictor(psi)
        psi = self._phase_cnot(psi)
        psi = self._predictor(psi, inverse=True)
        return self._hadamard(psi)

    def outcome_distribution(self, side_info: PureVector) -> np.ndarray:
        """Pr[a, y] of the final computational-basis measurement, shape (2, 2^n)."""
        psi = self.final_state(side_info)
        return np.sum(np.abs(psi) ** 2, axis=(2, 3))

    def to_matrix(self) -> np.ndarray:
        """Dense pre-measurement unitary on (a, y, work, side), built column by column."""
        shape = (2, 1 << self.n, self.oracle.work_dim, self.oracle.side_dim)
        size = int(np.prod(shape))
        if size > max_dimension():
            raise SizeCapError("circuit matrix dimension", size, max_dimension())
        columns = []
        for k in range(size):
            psi = np.zeros(size, dtype=complex)
            psi[k] = 1.0
            psi = psi.reshape(shape)
            psi = self._hadamard(psi)
            psi = self._predictor(psi)
            psi = self._phase_cnot(psi)
            psi = self._predictor(psi, inverse=True)
            columns.append(self._hadamard(psi).reshape(-1))
        return np.stack(columns, axis=1)

    def to_dict(self) -> dict[str, Any]:
        return {"oracle": self.oracle.to_dict(), "stages": list(self.stages), "gate_count": self.gate_count}


def build_reconstructor(oracle: PredictorOracle) -> ReconstructionCircuit:
    return ReconstructionCircuit(oracle)


def basis_side_info(x: int, n: int) -> PureVector:
    """|x⟩ on n qubits, the side register the synthetic oracles expect."""
    amps = np.zeros(1 << n, dtype=complex)
    amps[x] = 1.0
    return PureVector(amps, (1 << n,))


def run_reconstruction(circuit: ReconstructionCircuit, x: int, side_info: Optional[PureVector] = None) -> float:
    """Exact probability of measuring a = 1 and y = x."""
    if not 0 <= x < (1 << circuit.n):
        raise DimensionMismatchError(f"x = {x} is not an {circuit.n}-bit value")
    side_info = side_info if side_info is not None else basis_side_info(x, circuit.n)
    return float(circuit.outcome_distribution(side_info)[1, x])


@dataclass(frozen=True)
class ReconstructionRow:
    """One (n, ε, x) cell of a reconstruction sweep."""

    n: int
    epsilon: float
    x: int
    success: float
    bound: float
    gate_count: int

    @property
    def meets_bound(self) -> bool:
        return self.success >= self.bound - 1e-6


def _sweep_cell(n: int, epsilon: float, xs: Optional[Sequence[int]]) -> list[ReconstructionRow]:
    oracle = make_ideal_ip_predictor(n) if epsilon >= 0.5 else make_biased_predictor(n, epsilon)
    circuit = build_reconstructor(oracle)
    values = range(1 << n) if xs is None else xs
    bound = 4 * epsilon ** 2
    return [ReconstructionRow(n, epsilon, x, run_reconstruction(circuit, x), bound, circuit.gate_count) for x in values]


def reconstruction_sweep(
    ns: Iterable[int],
    epsilons: Iterable[float],
    xs: Optional[Sequence[int]] = None,
    workers: int = 4,
) -> list[ReconstructionRow]:
    """Success for every (n, ε, x); rows sorted by (n, ε, x) regardless of completion order."""
    cells = [(n, eps) for n in ns for eps in epsilons]
    with PerformanceLogger(logger, f"reconstruction sweep ({len(cells)} cells)"):
        with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
            futures = [pool.submit(_sweep_cell, n, eps, xs) for n, eps in cells]
            rows = [row for f in futures for row in f.result()]
    rows.sort(key=lambda r: (r.n, r.epsilon, r.x))
    short = [r for r in rows if not r.meets_bound]
    if short:
        logger.warning(f"{len(short)} reconstruction cells fell below 4*eps^2")
    return rows
