"""Quantum channels in Kraus form, POVMs and the standard channel library."""

from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Optional, Sequence

import numpy as np
from scipy import linalg as sla

from ..constants import TOLERANCE
from ..utils.helpers import Bits
from ..utils.logging import get_logger
from . import linalg as la
from .errors import DimensionMismatchError, InvalidStateError
from .states import CqState, DensityOperator

logger = get_logger("qcore.channels")


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """CPTP map given by Kraus operators (d_out × d_in)."""

    kraus_ops: tuple[np.ndarray, ...]
    in_dims: tuple[int, ...]
    out_dims: tuple[int, ...]
    name: str = "channel"

    def __post_init__(self) -> None:
        ops = tuple(np.array(k, dtype=complex) for k in self.kraus_ops)
        if not ops:
            raise InvalidStateError(f"channel '{self.name}' has no Kraus operators")
        in_dims = tuple(int(d) for d in self.in_dims)
        out_dims = tuple(int(d) for d in self.out_dims)
        d_in = int(np.prod(in_dims, dtype=np.int64))
        d_out = int(np.prod(out_dims, dtype=np.int64))
        for k in ops:
            if k.shape != (d_out, d_in):
                raise DimensionMismatchError(
                    f"Kraus operator shape {k.shape} does not match ({d_out}, {d_in}) in '{self.name}'"
                )
            k.setflags(write=False)
        object.__setattr__(self, "kraus_ops", ops)
        object.__setattr__(self, "in_dims", in_dims)
        object.__setattr__(self, "out_dims", out_dims)
        residual = self.trace_preservation_error()
        if residual > TOLERANCE.TRACE:
            raise InvalidStateError(
                f"channel '{self.name}' is not trace preserving (max |ΣK†K − I| = {residual:.3e})"
            )

    @property
    def d_in(self) -> int:
        return self.kraus_ops[0].shape[1]

    @property
    def d_out(self) -> int:
        return self.kraus_ops[0].shape[0]

    @property
    def stacked(self) -> np.ndarray:
        """Kraus operators as one (k, d_out, d_in) array."""
        return np.stack(self.kraus_ops)

    def trace_preservation_error(self) -> float:
        total = sum(k.conj().T @ k for k in self.kraus_ops)
        return float(np.max(np.abs(total - np.eye(total.shape[0]))))

    def apply_matrix(self, matrix: np.ndarray) -> np.ndarray:
        """Σ K ρ K† on a raw matrix of the full input space."""
        ks = self.stacked
        return np.einsum("kai,ij,kbj->ab", ks, matrix, ks.conj(), optimize=True)

    def compose(self, other: "KrausChannel") -> "KrausChannel":
        """self ∘ other."""
        if other.out_dims != self.in_dims:
            raise DimensionMismatchError(f"cannot compose {self.name} after {other.name}")
        ops = tuple(a @ b for a in self.kraus_ops for b in other.kraus_ops)
        return KrausChannel(ops, other.in_dims, self.out_dims, f"{self.name}∘{other.name}")

    def to_dict(self) -> dict:
        from .serialization import channel_to_dict

        return channel_to_dict(self)


@dataclass(frozen=True, eq=False)
class Povm:
    """Measurement with PSD elements summing to the identity."""

    elements: Mapping[Any, np.ndarray]
    dim: int = field(init=False)

    def __post_init__(self) -> None:
        elements = {}
        for outcome, e in self.elements.items():
            e = np.array(e, dtype=complex)
            la.require_hermitian(e, f"POVM element {outcome!r}")
            lam = la.min_eigenvalue(e)
            if lam < -TOLERANCE.PSD:
                raise InvalidStateError(f"POVM element {outcome!r} has negative eigenvalue {lam:.3e}")
            e.setflags(write=False)
            elements[outcome] = e
        if not elements:
            raise InvalidStateError("POVM has no elements")
        shapes = {e.shape for e in elements.values()}
        if len(shapes) != 1:
            raise DimensionMismatchError(f"POVM elements have differing shapes {shapes}")
        dim = shapes.pop()[0]
        residual = float(np.max(np.abs(sum(elements.values()) - np.eye(dim))))
        if residual > TOLERANCE.PSD:
            raise InvalidStateError(f"POVM elements do not sum to identity (residual {residual:.3e})")
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "dim", dim)

    def probability(self, outcome: Any, rho: np.ndarray) -> float:
        e = self.elements.get(outcome)
        if e is None:
            return 0.0
        return float(np.real(np.trace(e @ rho)))

    def to_dict(self) -> dict:
        from .serialization import povm_to_dict

        return povm_to_dict(self)


def apply_channel(phi: KrausChannel, rho: DensityOperator, target: Optional[Sequence[int]] = None) -> DensityOperator:
    """(φ_target ⊗ id)(ρ).

    Output subsystems replace the targets at the position of the first target.
    """
    target = list(range(len(rho.dims))) if target is None else list(target)
    targeted = tuple(rho.dims[i] for i in target) if all(0 <= i < len(rho.dims) for i in target) else None
    if targeted is None:
        raise DimensionMismatchError(f"target {target} out of range for dims {rho.dims}")
    if int(np.prod(targeted, dtype=np.int64)) != phi.d_in:
        raise DimensionMismatchError(
            f"channel '{phi.name}' expects input dims {phi.in_dims}, targeted subsystems have {targeted}"
        )
    matrix, dims = la.apply_kraus_matrix(phi.stacked, rho.matrix, rho.dims, target, phi.out_dims)
    return DensityOperator.from_matrix(la.hermitize(matrix), dims, check=False)


def povm_guess_probability(povm: Povm, state: CqState) -> float:
    """Σ_x p_x tr(E_x ρ_x); outcomes missing from the POVM contribute 0."""
    if povm.dim != state.side_dim:
        raise DimensionMismatchError(f"POVM dimension {povm.dim} does not match side dimension {state.side_dim}")
    return float(sum(p * povm.probability(x, state.conditionals[x].matrix) for x, p in state.probs.items()))


# =============================================================================
# Classically controlled channels
# =============================================================================

@dataclass(frozen=True, eq=False)
class ClassicallyControlledChannel:
    """One channel on the quantum register per classical control symbol.

    Acts as Σ_a |a⟩⟨a| ⊗ φ_a on (A, Q). The dense Kraus form is available
    for small alphabets via ``to_kraus``.
    """

    control_bits: int
    branches: Mapping[Bits, KrausChannel]
    name: str = "controlled"

    def __post_init__(self) -> None:
        if len(self.branches) != (1 << self.control_bits):
            raise DimensionMismatchError(
                f"controlled channel '{self.name}' needs {1 << self.control_bits} branches, got {len(self.branches)}"
            )
        dims = {(b.in_dims, b.out_dims) for b in self.branches.values()}
        if len(dims) != 1:
            raise DimensionMismatchError(f"branches of '{self.name}' have differing dims")
        object.__setattr__(self, "branches", dict(sorted(self.branches.items())))

    @property
    def in_dims(self) -> tuple[int, ...]:
        return next(iter(self.branches.values())).in_dims

    @property
    def out_dims(self) -> tuple[int, ...]:
        return next(iter(self.branches.values())).out_dims

    def branch(self, a: Bits) -> KrausChannel:
        return self.branches[tuple(a)]

    def apply_to_cq(self, state: CqState) -> CqState:
        """Apply branch x to every conditional ρ_x."""
        conds = {x: apply_channel(self.branch(x), rho) for x, rho in state.conditionals.items()}
        return CqState(dict(state.probs), conds, state.alphabet_bits)

    def to_kraus(self) -> KrausChannel:
        """Dense form on (A, Q) with branches padded by zero operators."""
        da = 1 << self.control_bits
        count = max(len(b.kraus_ops) for b in self.branches.values())
        first = next(iter(self.branches.values()))
        zero = np.zeros((first.d_out, first.d_in), dtype=complex)
        ops = []
        for j in range(count):
            op = np.zeros((da * first.d_out, da * first.d_in), dtype=complex)
            for i, branch in enumerate(self.branches.values()):
                k = branch.kraus_ops[j] if j < len(branch.kraus_ops) else zero
                op[i * first.d_out:(i + 1) * first.d_out, i * first.d_in:(i + 1) * first.d_in] = k
            ops.append(op)
        return KrausChannel(tuple(ops), (da,) + self.in_dims, (da,) + self.out_dims, self.name)


# =============================================================================
# Standard channels
# =============================================================================

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def identity_channel(dims: Sequence[int]) -> KrausChannel:
    d = int(np.prod(dims, dtype=np.int64))
    return KrausChannel((np.eye(d, dtype=complex),), tuple(dims), tuple(dims), "identity")


def unitary_channel(unitary: np.ndarray, dims: Optional[Sequence[int]] = None, name: str = "unitary") -> KrausChannel:
    unitary = np.asarray(unitary, dtype=complex)
    dims = tuple(dims) if dims is not None else (unitary.shape[0],)
    return KrausChannel((unitary,), dims, dims, name)


def weyl_operators(d: int) -> list[np.ndarray]:
    """Generalized Paulis X^a Z^b, a, b < d."""
    shift = np.roll(np.eye(d, dtype=complex), 1, axis=0)
    omega = np.exp(2j * np.pi / d)
    clock = np.diag(omega ** np.arange(d))
    return [np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b) for a in range(d) for b in range(d)]


def depolarizing_channel(d: int, p: float = 1.0) -> KrausChannel:
    """ρ ↦ (1 − p)ρ + p·tr(ρ)·I/d."""
    if not 0 <= p <= 1:
        raise InvalidStateError(f"depolarizing parameter {p} outside [0, 1]")
    weyl = weyl_operators(d)
    ops = [np.sqrt(1 - p + p / d**2) * weyl[0]]
    ops += [np.sqrt(p) / d * w for w in weyl[1:]]
    return KrausChannel(tuple(ops), (d,), (d,), f"depolarizing(p={p:g})")


def dephasing_channel(d: int) -> KrausChannel:
    """Computational-basis measurement channel."""
    ops = []
    for i in range(d):
        k = np.zeros((d, d), dtype=complex)
        k[i, i] = 1.0
        ops.append(k)
    return KrausChannel(tuple(ops), (d,), (d,), "dephasing")


def append_state_channel(dims: Sequence[int], ancilla: np.ndarray, name: str = "append") -> KrausChannel:
    """Q ↦ |a⟩ ⊗ Q for a pure ancilla vector |a⟩."""
    a = np.asarray(ancilla, dtype=complex).reshape(-1, 1)
    d = int(np.prod(dims, dtype=np.int64))
    op = np.kron(a, np.eye(d, dtype=complex))
    return KrausChannel((op,), tuple(dims), (a.shape[0],) + tuple(dims), name)


def cnot_copy_unitary(k: int) -> np.ndarray:
    """Bitwise CNOT from k control qubits onto k target qubits, on (A, E)."""
    d = 1 << k
    u = np.zeros((d * d, d * d), dtype=complex)
    for a in range(d):
        for e in range(d):
            u[a * d + (a ^ e), a * d + e] = 1.0
    return u


def cnot_copy_channel(k: int) -> KrausChannel:
    """Dense CNOT-copy of a k-bit register A into a k-qubit register E."""
    d = 1 << k
    return unitary_channel(cnot_copy_unitary(k), (d, d), f"cnot-copy({k})")


def xor_branches(k: int, e_qubits: int) -> dict[Bits, KrausChannel]:
    """Branches X^a on E for each k-bit control value a (copy into the first k qubits)."""
    from ..utils.helpers import int_to_bits

    d = 1 << e_qubits
    branches = {}
    for a in range(1 << k):
        shift = a << (e_qubits - k)
        perm = np.zeros((d, d), dtype=complex)
        for e in range(d):
            perm[e ^ shift, e] = 1.0
        branches[int_to_bits(a, k)] = unitary_channel(perm, (d,), f"xor({a})")
    return branches


def random_channel(
    d_in: int,
    d_out: int,
    rng: np.random.Generator,
    n_kraus: int = 2,
) -> KrausChannel:
    """Random CPTP map from an isometry obtained by QR of a Ginibre matrix."""
    n_kraus = max(n_kraus, -(-d_in // d_out))
    g = rng.standard_normal((n_kraus * d_out, d_in)) + 1j * rng.standard_normal((n_kraus * d_out, d_in))
    q, _ = sla.qr(g, mode="economic")
    ops = tuple(q[j * d_out:(j + 1) * d_out, :] for j in range(n_kraus))
    return KrausChannel(ops, (d_in,), (d_out,), f"random({d_in}->{d_out})")


def basis_povm(dim: int, label: Callable[[int], Any] = lambda z: z) -> Povm:
    """Computational-basis measurement with outcomes label(z)."""
    elements: dict[Any, np.ndarray] = {}
    for z in range(dim):
        e = np.zeros((dim, dim), dtype=complex)
        e[z, z] = 1.0
        key = label(z)
        elements[key] = elements[key] + e if key in elements else e
    return Povm(elements)
