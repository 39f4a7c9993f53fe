"""Inner-product predictor oracles acting on (seed, work, side information).

An oracle is stored as unitary blocks U[e, y] on the work register,
controlled by the seed y and by the computational basis state e of the side
register. The most significant work qubit is the output qubit.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from ..config import max_dimension
from ..constants import CIRCUIT, LIMITS, TOLERANCE
from ..qcore.errors import InvalidStateError, SizeCapError
from ..utils.logging import get_logger

logger = get_logger("reconstruct.oracle")

_X = np.array([[0, 1], [1, 0]], dtype=complex)


def _ip_table(n: int) -> np.ndarray:
    """ip(e, y) for all e, y as an int array indexed [e, y]."""
    values = np.arange(1 << n)
    masked = values[:, None] & values[None, :]
    table = np.zeros_like(masked)
    while np.any(masked):
        table ^= masked & 1
        masked >>= 1
    return table


@dataclass(frozen=True, eq=False)
class PredictorOracle:
    """Controlled predictor blocks with shape (side_dim, 2^n, 2^w, 2^w)."""

    n: int
    blocks: np.ndarray
    work_qubits: int
    declared_gate_cost: int
    epsilon: Optional[float] = None
    name: str = "oracle"
    side_dim: int = field(init=False)

    def __post_init__(self) -> None:
        blocks = np.array(self.blocks, dtype=complex)
        w = 1 << self.work_qubits
        if blocks.ndim != 4 or blocks.shape[1:] != (1 << self.n, w, w):
            raise InvalidStateError(f"oracle blocks have shape {blocks.shape}, expected (E, {1 << self.n}, {w}, {w})")
        qubits = 1 + self.n + self.work_qubits + math.ceil(math.log2(max(blocks.shape[0], 1)))
        if qubits > LIMITS.STATEVECTOR_MAX_QUBITS:
            raise SizeCapError("statevector qubits", qubits, LIMITS.STATEVECTOR_MAX_QUBITS)
        residual = self.unitarity_error(blocks)
        if residual > TOLERANCE.HERMITIAN:
            raise InvalidStateError(f"oracle '{self.name}' is not unitary (residual {residual:.3e})")
        blocks.setflags(write=False)
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "side_dim", blocks.shape[0])

    @staticmethod
    def unitarity_error(blocks: np.ndarray) -> float:
        products = np.einsum("eyki,eykj->eyij", blocks.conj(), blocks, optimize=True)
        return float(np.max(np.abs(products - np.eye(blocks.shape[-1]))))

    @property
    def work_dim(self) -> int:
        return 1 << self.work_qubits

    def unitary(self) -> np.ndarray:
        """Dense matrix on (seed, work, side) in that kron order."""
        seeds, w, e = 1 << self.n, self.work_dim, self.side_dim
        size = seeds * w * e
        if size > max_dimension():
            raise SizeCapError("oracle matrix dimension", size, max_dimension())
        full = np.zeros((seeds, w, e, seeds, w, e), dtype=complex)
        for y in range(seeds):
            for k in range(e):
                full[y, :, k, y, :, k] = self.blocks[k, y]
        return full.reshape(size, size)

    def output_bias(self, x: int) -> float:
        """Average over y of Pr[output qubit = ip(x, y)] on side state |x⟩ and work |0⟩."""
        table = _ip_table(self.n)
        first_column = self.blocks[x, :, :, 0]
        half = self.work_dim // 2
        p_one = np.sum(np.abs(first_column[:, half:]) ** 2, axis=1)
        correct = np.where(table[x] == 1, p_one, 1.0 - p_one)
        return float(np.mean(correct))

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "n": self.n,
            "work_qubits": self.work_qubits,
            "side_dim": self.side_dim,
            "declared_gate_cost": self.declared_gate_cost,
            "epsilon": self.epsilon,
        }


def make_ideal_ip_predictor(n: int) -> PredictorOracle:
    """XOR ip(x, y) into the output qubit, reading x from a basis-encoded side register."""
    if n < 1:
        raise ValueError("n must be >= 1")
    table = _ip_table(n)
    eye = np.eye(2, dtype=complex)
    blocks = np.where(table[:, :, None, None] == 1, _X, eye)
    return PredictorOracle(n, blocks, 1, CIRCUIT.TOFFOLI_COST * n, 0.5, "ideal-ip")


def biased_work_unitary(epsilon: float, y0: int) -> np.ndarray:
    """Two-qubit (output, garbage) rotation putting weight 1/2 + ε on the correct output."""
    alpha = math.sqrt(0.5 + epsilon)
    beta = math.sqrt(0.5 - epsilon)
    sign = -1.0 if y0 else 1.0
    w = np.zeros((4, 4), dtype=complex)
    w[:, 0] = [alpha, 0, 0, beta]
    w[:, 1] = [sign * beta, 0, 0, -sign * alpha]
    w[1, 2] = 1.0
    w[2, 3] = 1.0
    return w


def make_biased_predictor(n: int, epsilon: float) -> PredictorOracle:
    """Synthetic predictor answering ip(x, y) with probability exactly 1/2 + ε for every y.

    ε = 1/2 reproduces the ideal predictor on the output qubit, with an
    extra garbage qubit that stays |0⟩.
    """
    if not 0 <= epsilon <= 0.5:
        raise ValueError(f"epsilon must be in [0, 1/2], got {epsilon}")
    if n < 1:
        raise ValueError("n must be >= 1")
    table = _ip_table(n)
    flip = np.kron(_X, np.eye(2, dtype=complex))
    rotations = {y0: biased_work_unitary(epsilon, y0) for y0 in (0, 1)}
    seeds = 1 << n
    blocks = np.empty((seeds, seeds, 4, 4), dtype=complex)
    for y in range(seeds):
        # y0 is the most significant seed bit
        w = rotations[(y >> (n - 1)) & 1]
        flipped = flip @ w
        for e in range(seeds):
            blocks[e, y] = flipped if table[e, y] else w
    cost = CIRCUIT.TOFFOLI_COST * n + CIRCUIT.BIAS_STAGE_COST
    logger.debug(f"Biased predictor n={n}, epsilon={epsilon}, declared cost {cost}")
    return PredictorOracle(n, blocks, 2, cost, epsilon, f"biased-ip(eps={epsilon})")
