"""Dense linear-algebra kernels on raw numpy operators.

Everything here works on plain arrays so the solvers can avoid re-validating
intermediate operators. Subsystem layouts follow numpy.kron ordering: the
first entry of ``dims`` is the most significant index.
"""

from typing import Sequence

import numpy as np
from scipy import linalg as sla

from ..constants import SOLVER, TOLERANCE
from .errors import DimensionMismatchError, InvalidStateError


def hermitize(matrix: np.ndarray) -> np.ndarray:
    """Return (M + M†)/2."""
    return 0.5 * (matrix + matrix.conj().T)


def hermiticity_error(matrix: np.ndarray) -> float:
    """Largest entry of |M − M†|."""
    if matrix.size == 0:
        return 0.0
    return float(np.max(np.abs(matrix - matrix.conj().T)))


def require_hermitian(matrix: np.ndarray, name: str = "operator", tol: float = TOLERANCE.HERMITIAN) -> None:
    """Raise InvalidStateError if the matrix is not square and Hermitian."""
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise InvalidStateError(f"{name} must be a square matrix, got shape {matrix.shape}")
    err = hermiticity_error(matrix)
    if err > tol:
        raise InvalidStateError(f"{name} is not Hermitian (max |M - M^dag| = {err:.3e})")


def eigh_psd(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a PSD operator with tiny negative eigenvalues clipped to 0."""
    eigvals, eigvecs = sla.eigh(hermitize(matrix))
    eigvals = np.where(eigvals < TOLERANCE.PSD, np.maximum(eigvals, 0.0), eigvals)
    return np.clip(eigvals, 0.0, None), eigvecs


def spectrum(matrix: np.ndarray) -> np.ndarray:
    """Eigenvalues of a Hermitian operator (ascending)."""
    if matrix.size == 0:
        return np.zeros(0)
    return sla.eigvalsh(hermitize(matrix))


def min_eigenvalue(matrix: np.ndarray) -> float:
    """Smallest eigenvalue of a Hermitian operator."""
    return float(spectrum(matrix)[0])


def max_eigenvalue(matrix: np.ndarray) -> float:
    """Largest eigenvalue of a Hermitian operator."""
    return float(spectrum(matrix)[-1])


def trace_norm(matrix: np.ndarray) -> float:
    """‖M‖₁ of a Hermitian operator via its eigenvalues."""
    return float(np.sum(np.abs(spectrum(matrix))))


def psd_power(matrix: np.ndarray, power: float, cutoff: float = SOLVER.PINV_CUTOFF) -> np.ndarray:
    """M^power for PSD M; negative powers act on the support only."""
    eigvals, eigvecs = eigh_psd(matrix)
    if power < 0:
        keep = eigvals > cutoff
        scaled = np.zeros_like(eigvals)
        scaled[keep] = eigvals[keep] ** power
    else:
        scaled = eigvals ** power
    return (eigvecs * scaled) @ eigvecs.conj().T


def psd_sqrt(matrix: np.ndarray) -> np.ndarray:
    """Principal square root of a PSD operator."""
    return psd_power(matrix, 0.5)


def support_basis(matrix: np.ndarray, cutoff: float = SOLVER.PINV_CUTOFF) -> np.ndarray:
    """Orthonormal columns spanning the support of a PSD operator."""
    eigvals, eigvecs = eigh_psd(matrix)
    scale = max(float(eigvals[-1]) if eigvals.size else 0.0, 1.0)
    return eigvecs[:, eigvals > cutoff * scale]


def check_dims(dims: Sequence[int], side: int) -> tuple[int, ...]:
    """Validate a subsystem dimension list against a matrix side length."""
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims):
        raise DimensionMismatchError(f"subsystem dimensions must be >= 1, got {dims}")
    if int(np.prod(dims, dtype=np.int64)) != side:
        raise DimensionMismatchError(f"dims {dims} do not multiply to side length {side}")
    return dims


def _check_indices(indices: Sequence[int], count: int) -> list[int]:
    indices = [int(i) for i in indices]
    for i in indices:
        if i < 0 or i >= count:
            raise DimensionMismatchError(f"subsystem index {i} out of range for {count} subsystems")
    if len(set(indices)) != len(indices):
        raise DimensionMismatchError(f"repeated subsystem index in {indices}")
    return indices


def partial_trace_matrix(matrix: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``.

    Kept subsystems appear in ascending index order in the result.
    """
    dims = list(dims)
    n = len(dims)
    keep = sorted(_check_indices(keep, n))
    drop = [i for i in range(n) if i not in keep]
    tensor = matrix.reshape(dims + dims)
    # Move kept axes to the front on both sides, dropped axes behind them
    order = keep + drop + [n + i for i in keep] + [n + i for i in drop]
    tensor = tensor.transpose(order)
    dk = int(np.prod([dims[i] for i in keep], dtype=np.int64))
    dd = int(np.prod([dims[i] for i in drop], dtype=np.int64))
    tensor = tensor.reshape(dk, dd, dk, dd)
    return np.einsum("ajbj->ab", tensor)


def permute_subsystems(matrix: np.ndarray, dims: Sequence[int], order: Sequence[int]) -> np.ndarray:
    """Reorder subsystems so that new subsystem k is old subsystem order[k]."""
    dims = list(dims)
    n = len(dims)
    order = _check_indices(order, n)
    if len(order) != n:
        raise DimensionMismatchError(f"permutation {order} does not cover {n} subsystems")
    side = matrix.shape[0]
    tensor = matrix.reshape(dims + dims).transpose(order + [n + i for i in order])
    return tensor.reshape(side, side)


def apply_kraus_matrix(
    kraus: np.ndarray,
    matrix: np.ndarray,
    dims: Sequence[int],
    targets: Sequence[int],
    out_dims: Sequence[int],
) -> tuple[np.ndarray, tuple[int, ...]]:
    """Apply stacked Kraus operators (k, d_out, d_in) to the target subsystems.

    The output block replaces the targets at the position of the first target
    index; untouched subsystems keep their relative order.

    Returns:
        (matrix, dims) of the result
    """
    dims = list(dims)
    n = len(dims)
    targets = _check_indices(targets, n)
    rest = [i for i in range(n) if i not in targets]
    d_in = int(np.prod([dims[i] for i in targets], dtype=np.int64))
    d_rest = int(np.prod([dims[i] for i in rest], dtype=np.int64))
    if kraus.shape[2] != d_in:
        raise DimensionMismatchError(
            f"channel input dimension {kraus.shape[2]} does not match targeted dimension {d_in}"
        )
    d_out = kraus.shape[1]

    tensor = matrix.reshape(dims + dims)
    tensor = tensor.transpose(targets + rest + [n + i for i in targets] + [n + i for i in rest])
    tensor = tensor.reshape(d_in, d_rest, d_in, d_rest)
    out = np.einsum("kai,irjs,kbj->arbs", kraus, tensor, kraus.conj(), optimize=True)

    out_dims = list(out_dims)
    rest_dims = [dims[i] for i in rest]
    before = [j for j, i in enumerate(rest) if i < targets[0]]
    after = [j for j, i in enumerate(rest) if i > targets[0]]
    m = len(out_dims)
    r = len(rest)
    # Current layout: out subsystems (0..m-1), rest subsystems (m..m+r-1)
    order = [m + j for j in before] + list(range(m)) + [m + j for j in after]
    full = out.reshape(out_dims + rest_dims + out_dims + rest_dims)
    full = full.transpose(order + [m + r + i for i in order])
    new_dims = tuple([rest_dims[j] for j in before] + out_dims + [rest_dims[j] for j in after])
    side = int(np.prod(new_dims, dtype=np.int64))
    return full.reshape(side, side), new_dims


def embed_operator(op: np.ndarray, dims: Sequence[int], targets: Sequence[int]) -> np.ndarray:
    """Lift an operator on the target subsystems to the full space (identity elsewhere)."""
    dims = list(dims)
    n = len(dims)
    targets = _check_indices(targets, n)
    rest = [i for i in range(n) if i not in targets]
    d_rest = int(np.prod([dims[i] for i in rest], dtype=np.int64))
    full = np.kron(op, np.eye(d_rest))
    current = [dims[i] for i in targets] + [dims[i] for i in rest]
    inverse = [0] * n
    for pos, idx in enumerate(targets + rest):
        inverse[idx] = pos
    return permute_subsystems(full, current, inverse)


def eigh_hermitian(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian (not necessarily PSD) operator."""
    return sla.eigh(hermitize(matrix))
