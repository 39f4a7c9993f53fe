"""Von Neumann entropy, conditional entropy and conditional mutual information (bits)."""

from typing import Sequence

import numpy as np

from ..constants import TOLERANCE
from ..qcore import linalg as la
from ..qcore.errors import InvalidStateError
from ..qcore.states import DensityOperator


def entropy_of_spectrum(eigvals: np.ndarray) -> float:
    """−Σ λ log₂ λ over eigenvalues above the cutoff."""
    lam = np.asarray(eigvals, dtype=float)
    lam = lam[lam > TOLERANCE.ENTROPY_CUTOFF]
    value = float(-np.sum(lam * np.log2(lam)))
    # avoid returning -0.0
    return abs(value) if value == 0.0 else value


def shannon_entropy(probs: Sequence[float]) -> float:
    """H(p) in bits."""
    return entropy_of_spectrum(np.asarray(probs, dtype=float))


def _require_normalized(rho: DensityOperator) -> None:
    if not rho.is_normalized:
        raise InvalidStateError(f"entropy expects a normalized state, trace is {rho.trace:.6g}")


def von_neumann_entropy(rho: DensityOperator) -> float:
    """H(ρ) = −tr ρ log₂ ρ."""
    _require_normalized(rho)
    return entropy_of_spectrum(la.spectrum(rho.matrix))


def _marginal_entropy(rho: DensityOperator, keep: Sequence[int]) -> float:
    keep = sorted(set(keep))
    if not keep:
        return 0.0
    if len(keep) == len(rho.dims):
        return entropy_of_spectrum(la.spectrum(rho.matrix))
    return entropy_of_spectrum(la.spectrum(la.partial_trace_matrix(rho.matrix, rho.dims, keep)))


def conditional_entropy(rho: DensityOperator, cond_subsystems: Sequence[int]) -> float:
    """H(A|B) = H(AB) − H(B), with B the listed subsystems and A the rest."""
    _require_normalized(rho)
    la._check_indices(cond_subsystems, len(rho.dims))
    return _marginal_entropy(rho, range(len(rho.dims))) - _marginal_entropy(rho, cond_subsystems)


def cmi(rho: DensityOperator, a: Sequence[int], b: Sequence[int], c: Sequence[int] = ()) -> float:
    """I(A:B|C) = H(AC) + H(BC) − H(ABC) − H(C); other subsystems are traced out."""
    _require_normalized(rho)
    la._check_indices(list(a) + list(b) + list(c), len(rho.dims))
    a, b, c = list(a), list(b), list(c)
    return (
        _marginal_entropy(rho, a + c)
        + _marginal_entropy(rho, b + c)
        - _marginal_entropy(rho, a + b + c)
        - _marginal_entropy(rho, c)
    )
