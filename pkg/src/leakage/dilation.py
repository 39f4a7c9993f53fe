"""Stinespring dilation of Kraus channels."""

from dataclasses import dataclass
from typing import Any, Optional

import numpy as np
from scipy import linalg as sla

from ..constants import TOLERANCE
from ..qcore import linalg as la
from ..qcore.channels import KrausChannel
from ..qcore.states import random_density
from ..utils.logging import get_logger

logger = get_logger("leakage.dilation")


@dataclass(frozen=True, eq=False)
class DilationResult:
    """Isometry V: E → E′ ⊗ R with φ(ρ) = Tr_R VρV†."""

    isometry: np.ndarray
    aux_dim: int
    in_dims: tuple[int, ...]
    out_dims: tuple[int, ...]

    @property
    def isometry_error(self) -> float:
        v = self.isometry
        return float(np.max(np.abs(v.conj().T @ v - np.eye(v.shape[1]))))

    def dilate(self, matrix: np.ndarray) -> np.ndarray:
        """VρV† on (E′, R)."""
        return self.isometry @ matrix @ self.isometry.conj().T

    def reduce(self, matrix: np.ndarray) -> np.ndarray:
        """Tr_R VρV†."""
        d_out = int(np.prod(self.out_dims, dtype=np.int64))
        return la.partial_trace_matrix(self.dilate(matrix), (d_out, self.aux_dim), [0])

    def to_dict(self) -> dict[str, Any]:
        return {
            "aux_dim": self.aux_dim,
            "in_dims": list(self.in_dims),
            "out_dims": list(self.out_dims),
            "isometry_error": self.isometry_error,
        }


def minimal_kraus(channel: KrausChannel) -> tuple[np.ndarray, ...]:
    """Kraus operators of the same channel, as few as its Choi rank."""
    ks = channel.stacked
    k, d_out, d_in = ks.shape
    flat = ks.reshape(k, d_out * d_in)
    _, s, vh = sla.svd(flat, full_matrices=False)
    scale = max(float(s[0]) if s.size else 0.0, 1.0)
    rank = max(1, int(np.sum(s > TOLERANCE.PSD * scale)))
    return tuple((s[j] * vh[j]).reshape(d_out, d_in) for j in range(rank))


def stinespring_dilate(channel: KrausChannel, minimal: bool = True) -> DilationResult:
    """V = Σ_k K_k ⊗ |k⟩_R, with R after E′ in kron order."""
    ops = minimal_kraus(channel) if minimal else channel.kraus_ops
    stacked = np.stack(ops)
    r, d_out, d_in = stacked.shape
    isometry = stacked.transpose(1, 0, 2).reshape(d_out * r, d_in)
    result = DilationResult(isometry, r, channel.in_dims, channel.out_dims)
    logger.debug(f"Dilated '{channel.name}' with aux dimension {r} (isometry error {result.isometry_error:.2e})")
    return result


def dilation_round_trip(
    channel: KrausChannel,
    dilation: DilationResult,
    rng: Optional[np.random.Generator] = None,
    trials: int = 8,
) -> float:
    """Largest trace-norm gap between Tr_R VρV† and φ(ρ) over random states."""
    rng = rng if rng is not None else np.random.default_rng(0)
    worst = 0.0
    for _ in range(trials):
        rho = random_density(channel.in_dims, rng).matrix
        gap = la.trace_norm(dilation.reduce(rho) - channel.apply_matrix(rho))
        worst = max(worst, gap)
    return worst
