"""Density operators, pure vectors and classical-quantum states."""

from dataclasses import InitVar, dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Optional, Sequence, Union

import numpy as np
from scipy import linalg as sla

from ..config import max_dimension
from ..constants import TOLERANCE
from ..utils.helpers import Bits, bits_to_int, int_to_bits
from ..utils.logging import get_logger
from . import linalg as la
from .errors import DimensionMismatchError, InvalidStateError, SizeCapError

logger = get_logger("qcore.states")


class TraceNorm(Enum):
    """Whether an operator has unit trace."""

    NORMALIZED = "normalized"
    SUBNORMALIZED = "subnormalized"


def _enforce_cap(side: int) -> None:
    cap = max_dimension()
    if side > cap:
        raise SizeCapError("Hilbert-space dimension", side, cap)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Hermitian PSD matrix with trace at most one.

    The stored matrix is a read-only copy. ``dims`` lists subsystem
    dimensions in kron order.
    """

    matrix: np.ndarray
    dims: tuple[int, ...]
    trace_norm: TraceNorm = TraceNorm.NORMALIZED
    check: InitVar[bool] = True

    def __post_init__(self, check: bool) -> None:
        matrix = np.array(self.matrix, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise InvalidStateError(f"density operator must be square, got shape {matrix.shape}")
        dims = la.check_dims(self.dims, matrix.shape[0])
        _enforce_cap(matrix.shape[0])
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "dims", dims)
        if check:
            self._validate()

    def _validate(self) -> None:
        la.require_hermitian(self.matrix, "density operator", TOLERANCE.HERMITIAN)
        lam_min = la.min_eigenvalue(self.matrix)
        if lam_min < -TOLERANCE.PSD:
            raise InvalidStateError(f"density operator has negative eigenvalue {lam_min:.3e}")
        tr = self.trace
        if tr <= 0 or tr > 1 + TOLERANCE.TRACE:
            raise InvalidStateError(f"trace {tr!r} outside (0, 1]")
        if self.trace_norm is TraceNorm.NORMALIZED and abs(tr - 1) > TOLERANCE.TRACE:
            raise InvalidStateError(f"normalized state has trace {tr!r}")

    @classmethod
    def from_matrix(
        cls,
        matrix: np.ndarray,
        dims: Optional[Sequence[int]] = None,
        check: bool = True,
    ) -> "DensityOperator":
        """Build a state, inferring the trace flag from the trace."""
        matrix = np.asarray(matrix, dtype=complex)
        dims = tuple(dims) if dims is not None else (matrix.shape[0],)
        tr = float(np.real(np.trace(matrix)))
        flag = TraceNorm.NORMALIZED if abs(tr - 1) <= TOLERANCE.TRACE else TraceNorm.SUBNORMALIZED
        return cls(matrix, dims, flag, check)

    @classmethod
    def from_pure(cls, amplitudes: np.ndarray, dims: Optional[Sequence[int]] = None) -> "DensityOperator":
        """|ψ⟩⟨ψ| for a state vector."""
        psi = np.asarray(amplitudes, dtype=complex).reshape(-1)
        return cls.from_matrix(np.outer(psi, psi.conj()), dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    @property
    def is_normalized(self) -> bool:
        return self.trace_norm is TraceNorm.NORMALIZED

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues with values above −1e-10 clipped at 0."""
        return la.eigh_psd(self.matrix)[0]

    def rank(self, tol: float = TOLERANCE.PSD) -> int:
        return int(np.sum(self.eigenvalues() > tol))

    def scaled(self, factor: float) -> "DensityOperator":
        """factor·ρ as a subnormalized operator (factor in (0, 1])."""
        return DensityOperator.from_matrix(self.matrix * factor, self.dims)

    def to_dict(self) -> dict:
        from .serialization import state_to_dict

        return state_to_dict(self)

    def __repr__(self) -> str:
        return f"DensityOperator(dims={self.dims}, trace={self.trace:.6g})"


@dataclass(frozen=True, eq=False)
class PureVector:
    """State vector with subsystem dimensions."""

    amplitudes: np.ndarray
    dims: tuple[int, ...]
    subnormalized: bool = False

    def __post_init__(self) -> None:
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        dims = la.check_dims(self.dims, amps.shape[0])
        norm = float(np.linalg.norm(amps))
        if not self.subnormalized and abs(norm - 1) > TOLERANCE.TRACE:
            raise InvalidStateError(f"pure vector has norm {norm!r}")
        if self.subnormalized and norm > 1 + TOLERANCE.TRACE:
            raise InvalidStateError(f"subnormalized vector has norm {norm!r} > 1")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def density(self) -> DensityOperator:
        """Projector |ψ⟩⟨ψ| with the same dims."""
        return DensityOperator.from_matrix(np.outer(self.amplitudes, self.amplitudes.conj()), self.dims)


OperatorLike = Union[DensityOperator, np.ndarray]


def as_matrix(op: OperatorLike) -> np.ndarray:
    """Raw matrix of a DensityOperator or array."""
    if isinstance(op, DensityOperator):
        return op.matrix
    return np.asarray(op, dtype=complex)


# =============================================================================
# Constructors and structural operations
# =============================================================================

def basis_state(index: int, dim: int) -> DensityOperator:
    """|index⟩⟨index| in dimension dim."""
    if not 0 <= index < dim:
        raise DimensionMismatchError(f"basis index {index} out of range for dimension {dim}")
    m = np.zeros((dim, dim), dtype=complex)
    m[index, index] = 1.0
    return DensityOperator(m, (dim,))


def maximally_mixed(dim: int) -> DensityOperator:
    """ω = I/dim."""
    if dim < 1:
        raise InvalidStateError("dimension must be >= 1")
    return DensityOperator(np.eye(dim, dtype=complex) / dim, (dim,))


def maximally_entangled(dim: int) -> PureVector:
    """|Φ⟩ = Σ_i |ii⟩/√dim on dims (dim, dim)."""
    if dim < 1:
        raise InvalidStateError("dimension must be >= 1")
    amps = np.eye(dim, dtype=complex).reshape(-1) / np.sqrt(dim)
    return PureVector(amps, (dim, dim))


def tensor(a: DensityOperator, b: DensityOperator) -> DensityOperator:
    """a ⊗ b with concatenated dims."""
    return DensityOperator.from_matrix(np.kron(a.matrix, b.matrix), a.dims + b.dims, check=False)


def tensor_all(states: Iterable[DensityOperator]) -> DensityOperator:
    states = list(states)
    if not states:
        raise DimensionMismatchError("tensor of an empty list")
    out = states[0]
    for s in states[1:]:
        out = tensor(out, s)
    return out


def partial_trace(rho: DensityOperator, keep: Iterable[int]) -> DensityOperator:
    """Reduced state on the kept subsystems (ascending order)."""
    keep = sorted(set(keep))
    reduced = la.partial_trace_matrix(rho.matrix, rho.dims, keep)
    dims = tuple(rho.dims[i] for i in keep)
    return DensityOperator.from_matrix(reduced, dims, check=False)


def permute(rho: DensityOperator, order: Sequence[int]) -> DensityOperator:
    """Reorder subsystems; new subsystem k is old subsystem order[k]."""
    matrix = la.permute_subsystems(rho.matrix, rho.dims, order)
    return DensityOperator.from_matrix(matrix, tuple(rho.dims[i] for i in order), check=False)


def purification_matrix(matrix: np.ndarray, min_reference: int = 1) -> np.ndarray:
    """Columns √λ_i v_i over the support, zero-padded to at least min_reference.

    Reading the result as a (d × r) coefficient matrix gives a purification
    Σ_{a,i} Ψ[a,i] |a⟩|i⟩ of any PSD operator, subnormalized ones included.
    """
    eigvals, eigvecs = la.eigh_psd(matrix)
    keep = eigvals > TOLERANCE.PSD
    cols = eigvecs[:, keep] * np.sqrt(eigvals[keep])
    cols = cols[:, ::-1]
    if cols.shape[1] < min_reference:
        pad = np.zeros((matrix.shape[0], min_reference - cols.shape[1]), dtype=complex)
        cols = np.hstack([cols, pad])
    return cols


def purify(rho: DensityOperator) -> PureVector:
    """Purification with reference dimension rank(ρ), reference appended last."""
    if not rho.is_normalized:
        raise InvalidStateError("purify expects a normalized state")
    cols = purification_matrix(rho.matrix)
    rank = cols.shape[1]
    amps = cols.reshape(-1)
    amps = amps / np.linalg.norm(amps)
    return PureVector(amps, rho.dims + (rank,))


# =============================================================================
# Random instances
# =============================================================================

def random_pure_amplitudes(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_density(
    dims: Sequence[int],
    rng: np.random.Generator,
    rank: Optional[int] = None,
) -> DensityOperator:
    """Random state from a Ginibre matrix G: ρ = G G† / tr."""
    dims = tuple(dims)
    d = int(np.prod(dims, dtype=np.int64))
    rank = d if rank is None else rank
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    m = g @ g.conj().T
    return DensityOperator.from_matrix(la.hermitize(m / np.real(np.trace(m))), dims)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR with phase correction."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = sla.qr(z)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


# =============================================================================
# Classical-quantum states
# =============================================================================

@dataclass(frozen=True, eq=False)
class CqState:
    """Σ_x p_x |x⟩⟨x| ⊗ ρ_E^x with bit-string symbols.

    Symbols with zero probability may be present; their conditionals are
    kept but carry no weight.
    """

    probs: Mapping[Bits, float]
    conditionals: Mapping[Bits, DensityOperator]
    alphabet_bits: int
    side_dims: tuple[int, ...] = field(init=False)

    def __post_init__(self) -> None:
        probs = {tuple(int(b) for b in x): float(p) for x, p in self.probs.items()}
        conditionals = {tuple(int(b) for b in x): rho for x, rho in self.conditionals.items()}
        if set(probs) != set(conditionals):
            raise InvalidStateError("probs and conditionals must share the same symbols")
        if not probs:
            raise InvalidStateError("empty alphabet")
        for x in probs:
            if len(x) != self.alphabet_bits or any(b not in (0, 1) for b in x):
                raise InvalidStateError(f"symbol {x} is not a {self.alphabet_bits}-bit string")
        if any(p < 0 for p in probs.values()):
            raise InvalidStateError("negative probability")
        total = sum(probs.values())
        if total <= 0 or total > 1 + TOLERANCE.TRACE:
            raise InvalidStateError(f"total probability {total!r} outside (0, 1]")
        dims = {rho.dims for rho in conditionals.values()}
        if len(dims) != 1:
            raise DimensionMismatchError(f"conditionals have differing dims {sorted(dims)}")
        for x, rho in conditionals.items():
            if not rho.is_normalized:
                raise InvalidStateError(f"conditional state for {x} is not normalized")
        ordered = sorted(probs)
        object.__setattr__(self, "probs", {x: probs[x] for x in ordered})
        object.__setattr__(self, "conditionals", {x: conditionals[x] for x in ordered})
        object.__setattr__(self, "side_dims", dims.pop())

    @classmethod
    def from_weighted(
        cls,
        weighted: Mapping[Bits, np.ndarray],
        alphabet_bits: int,
        side_dims: Sequence[int],
    ) -> "CqState":
        """Build from σ_x = p_x ρ_x; zero blocks get a maximally mixed conditional."""
        side_dims = tuple(side_dims)
        d = int(np.prod(side_dims, dtype=np.int64))
        probs: dict[Bits, float] = {}
        conds: dict[Bits, DensityOperator] = {}
        for x, sigma in weighted.items():
            sigma = np.asarray(sigma, dtype=complex)
            p = float(np.real(np.trace(sigma)))
            if p > TOLERANCE.TRACE:
                probs[x] = p
                conds[x] = DensityOperator.from_matrix(la.hermitize(sigma / p), side_dims, check=False)
            else:
                probs[x] = 0.0
                conds[x] = DensityOperator(np.eye(d, dtype=complex) / d, side_dims, check=False)
        return cls(probs, conds, alphabet_bits)

    @property
    def symbols(self) -> list[Bits]:
        return list(self.probs)

    @property
    def side_dim(self) -> int:
        return int(np.prod(self.side_dims, dtype=np.int64))

    @property
    def total_probability(self) -> float:
        return float(sum(self.probs.values()))

    def weighted_blocks(self) -> list[np.ndarray]:
        """σ_x = p_x ρ_x in symbol order."""
        return [p * self.conditionals[x].matrix for x, p in self.probs.items()]

    def side_marginal(self) -> np.ndarray:
        """ρ_E = Σ_x p_x ρ_x."""
        return np.sum(self.weighted_blocks(), axis=0)

    def joint(self) -> DensityOperator:
        """Dense Σ_x p_x |x⟩⟨x| ⊗ ρ_x on dims (2^n, *side_dims)."""
        dx = 1 << self.alphabet_bits
        d = self.side_dim
        _enforce_cap(dx * d)
        m = np.zeros((dx * d, dx * d), dtype=complex)
        for x, sigma in zip(self.probs, self.weighted_blocks()):
            i = bits_to_int(x)
            m[i * d:(i + 1) * d, i * d:(i + 1) * d] = sigma
        return DensityOperator.from_matrix(m, (dx,) + self.side_dims, check=False)

    def trace_side(self, keep: Iterable[int]) -> "CqState":
        """Trace out side subsystems not listed in keep."""
        keep = sorted(set(keep))
        conds = {x: partial_trace(rho, keep) for x, rho in self.conditionals.items()}
        return CqState(dict(self.probs), conds, self.alphabet_bits)

    def map_side_information(self, channel, targets: Optional[Sequence[int]] = None) -> "CqState":
        """Apply a channel to the side information of every conditional."""
        from .channels import apply_channel

        targets = list(range(len(self.side_dims))) if targets is None else list(targets)
        conds = {x: apply_channel(channel, rho, targets) for x, rho in self.conditionals.items()}
        return CqState(dict(self.probs), conds, self.alphabet_bits)

    def to_dict(self) -> dict:
        from .serialization import cq_to_dict

        return cq_to_dict(self)

    def __repr__(self) -> str:
        return f"CqState(bits={self.alphabet_bits}, symbols={len(self.probs)}, side_dims={self.side_dims})"


def uniform_cq_state(n: int, conditional: Optional[DensityOperator] = None) -> CqState:
    """Uniform n-bit X with product side information (trivial if None)."""
    conditional = conditional if conditional is not None else DensityOperator(np.ones((1, 1)), (1,))
    probs = {int_to_bits(i, n): 1.0 / (1 << n) for i in range(1 << n)}
    return CqState(probs, {x: conditional for x in probs}, n)


def classical_copy_state(n: int) -> CqState:
    """Uniform n-bit X with a perfect basis-encoded copy in n qubits."""
    d = 1 << n
    probs = {int_to_bits(i, n): 1.0 / d for i in range(d)}
    conds = {int_to_bits(i, n): basis_state(i, d) for i in range(d)}
    return CqState(probs, conds, n)


def random_cq_state(
    n: int,
    side_dims: Sequence[int],
    rng: np.random.Generator,
    probs: Optional[Sequence[float]] = None,
    rank: Optional[int] = None,
) -> CqState:
    """Random distribution over n-bit symbols with random conditionals."""
    k = 1 << n
    if probs is None:
        probs = rng.dirichlet(np.ones(k))
    probs = np.asarray(probs, dtype=float)
    symbols = [int_to_bits(i, n) for i in range(k)]
    conds = {x: random_density(side_dims, rng, rank) for x in symbols}
    return CqState({x: float(p) for x, p in zip(symbols, probs)}, conds, n)
