"""Trace distance, fidelities, purified distance and operator order."""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..constants import TOLERANCE
from ..qcore import linalg as la
from ..qcore.errors import DimensionMismatchError
from ..qcore.states import OperatorLike, as_matrix


def _pair(a: OperatorLike, b: OperatorLike) -> tuple[np.ndarray, np.ndarray]:
    ma, mb = as_matrix(a), as_matrix(b)
    if ma.shape != mb.shape:
        raise DimensionMismatchError(f"operator shapes {ma.shape} and {mb.shape} differ")
    dims_a = getattr(a, "dims", None)
    dims_b = getattr(b, "dims", None)
    if dims_a is not None and dims_b is not None and dims_a != dims_b:
        raise DimensionMismatchError(f"dims {dims_a} and {dims_b} differ")
    return ma, mb


def trace_distance(a: OperatorLike, b: OperatorLike) -> float:
    """(1/2)‖a − b‖₁."""
    ma, mb = _pair(a, b)
    return 0.5 * la.trace_norm(ma - mb)


def root_fidelity(a: OperatorLike, b: OperatorLike) -> float:
    """tr√(√a b √a)."""
    ma, mb = _pair(a, b)
    sa = la.psd_sqrt(ma)
    eigvals = la.spectrum(sa @ mb @ sa)
    return float(np.sum(np.sqrt(np.clip(eigvals, 0.0, None))))


def fidelity(a: OperatorLike, b: OperatorLike) -> float:
    """Squared Uhlmann fidelity (tr√(√a b √a))²."""
    return min(1.0, root_fidelity(a, b) ** 2)


def _trace(m: np.ndarray) -> float:
    return float(np.real(np.trace(m)))


def generalized_fidelity(a: OperatorLike, b: OperatorLike) -> float:
    """(√F + √((1 − tr a)(1 − tr b)))² for subnormalized operators."""
    ma, mb = _pair(a, b)
    slack = max(0.0, (1 - _trace(ma)) * (1 - _trace(mb)))
    return min(1.0, (root_fidelity(ma, mb) + np.sqrt(slack)) ** 2)


def purified_distance(a: OperatorLike, b: OperatorLike) -> float:
    """√(1 − F_*)."""
    return float(np.sqrt(max(0.0, 1.0 - generalized_fidelity(a, b))))


def block_purified_distance(blocks_a: Sequence[np.ndarray], blocks_b: Sequence[np.ndarray]) -> float:
    """Purified distance between block-diagonal operators ⊕_x a_x and ⊕_x b_x.

    Root fidelity is additive over orthogonal blocks, so cq states never need
    to be assembled densely.
    """
    if len(blocks_a) != len(blocks_b):
        raise DimensionMismatchError("block counts differ")
    root = sum(root_fidelity(x, y) for x, y in zip(blocks_a, blocks_b))
    tr_a = sum(_trace(x) for x in blocks_a)
    tr_b = sum(_trace(y) for y in blocks_b)
    slack = max(0.0, (1 - tr_a) * (1 - tr_b))
    f_star = min(1.0, (root + np.sqrt(slack)) ** 2)
    return float(np.sqrt(max(0.0, 1.0 - f_star)))


def block_trace_distance(blocks_a: Sequence[np.ndarray], blocks_b: Sequence[np.ndarray]) -> float:
    """Trace distance between block-diagonal operators."""
    if len(blocks_a) != len(blocks_b):
        raise DimensionMismatchError("block counts differ")
    return 0.5 * sum(la.trace_norm(x - y) for x, y in zip(blocks_a, blocks_b))


@dataclass(frozen=True)
class OrderCheck:
    """Result of an operator-order test a ≤ b."""

    holds: bool
    min_eigenvalue: float

    def __bool__(self) -> bool:
        return self.holds


def operator_leq(a: OperatorLike, b: OperatorLike, tol: float = TOLERANCE.PSD) -> OrderCheck:
    """a ≤ b iff λ_min(b − a) ≥ −tol; the eigenvalue is the certificate."""
    ma, mb = _pair(a, b)
    la.require_hermitian(ma, "left operand")
    la.require_hermitian(mb, "right operand")
    lam = la.min_eigenvalue(mb - ma)
    return OrderCheck(lam >= -tol, lam)
