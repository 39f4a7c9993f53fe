"""λ-bounded leakage channels: a side-information map ψ followed by a leak Λ.

Λ acts on (A, E′) and appends a register L of dimension at most 2^λ while
leaving the (A, E′) marginal of the state under test unchanged. Output
register order is always (A, L, E′).
"""

import math
from dataclasses import dataclass, field
from typing import Any, Optional, Union

import numpy as np

from ..constants import TOLERANCE
from ..entropy.chain import cq_from_density
from ..qcore import linalg as la
from ..qcore.channels import (
    ClassicallyControlledChannel,
    KrausChannel,
    append_state_channel,
    identity_channel,
    random_channel,
    xor_branches,
)
from ..qcore.errors import DimensionMismatchError, LabError
from ..qcore.serialization import bits_key, channel_from_dict, channel_to_dict, parse_bits_key
from ..qcore.states import CqState, DensityOperator, basis_state, purification_matrix
from ..utils.helpers import Bits, int_to_bits
from ..utils.logging import get_logger

logger = get_logger("leakage.channels")

LeakMap = Union[KrausChannel, ClassicallyControlledChannel]

CLAUSES = ("dimension", "trace-preserving", "leakage-bound", "marginal-invariant")


class LeakageValidationError(LabError):
    """A leakage channel failed one of its defining clauses."""

    def __init__(self, clause: str, residual: float, message: str = ""):
        self.clause = clause
        self.residual = residual
        text = f"leakage channel violates '{clause}' (residual {residual:.3e})"
        super().__init__(f"{text}: {message}" if message else text)


@dataclass(frozen=True, eq=False)
class LeakageChannel:
    """φ = Λ ∘ ψ with declared leakage bound λ and cost t of ψ (None = unbounded)."""

    pre_process: KrausChannel
    leak_map: LeakMap
    lam: float
    psi_gate_cost: Optional[int] = None
    name: str = "leakage"
    controlled: bool = field(init=False)

    def __post_init__(self) -> None:
        if self.lam < 0:
            raise ValueError(f"leakage bound must be >= 0, got {self.lam}")
        object.__setattr__(self, "controlled", isinstance(self.leak_map, ClassicallyControlledChannel))

    @property
    def l_dim(self) -> int:
        out = self.leak_map.out_dims
        if self.controlled:
            return int(out[0])
        if len(out) < 2:
            raise DimensionMismatchError(f"leak map '{self.leak_map.name}' has no L register in {out}")
        return int(out[1])

    @property
    def e_out_dims(self) -> tuple[int, ...]:
        return tuple(self.pre_process.out_dims)

    @property
    def leaked_bits(self) -> float:
        """log₂ dim L, the amount used in every bound."""
        return math.log2(self.l_dim)

    def to_dict(self) -> dict[str, Any]:
        if self.controlled:
            leak: dict[str, Any] = {
                "control_bits": self.leak_map.control_bits,
                "branches": {bits_key(a): channel_to_dict(b) for a, b in self.leak_map.branches.items()},
            }
        else:
            leak = channel_to_dict(self.leak_map)
        return {
            "name": self.name,
            "lambda": self.lam,
            "psi_gate_cost": self.psi_gate_cost,
            "l_dim": self.l_dim,
            "pre_process": channel_to_dict(self.pre_process),
            "leak_map": leak,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "LeakageChannel":
        leak_data = data["leak_map"]
        if "branches" in leak_data:
            branches = {parse_bits_key(k): channel_from_dict(v) for k, v in leak_data["branches"].items()}
            leak: LeakMap = ClassicallyControlledChannel(int(leak_data["control_bits"]), branches)
        else:
            leak = channel_from_dict(leak_data)
        cost = data.get("psi_gate_cost")
        return cls(
            channel_from_dict(data["pre_process"]),
            leak,
            float(data["lambda"]),
            None if cost is None else int(cost),
            data.get("name", "leakage"),
        )


@dataclass(frozen=True)
class ValidationReport:
    """Per-clause outcome of a validation against one state."""

    valid: bool
    residual: float
    clauses: dict[str, bool]
    failed_clause: Optional[str] = None
    message: str = ""

    def __bool__(self) -> bool:
        return self.valid

    def raise_if_invalid(self) -> None:
        if not self.valid:
            raise LeakageValidationError(self.failed_clause or "unknown", self.residual, self.message)

    def to_dict(self) -> dict[str, Any]:
        return {
            "valid": self.valid,
            "residual": self.residual,
            "clauses": dict(self.clauses),
            "failed_clause": self.failed_clause,
            "message": self.message,
        }


def _as_cq(state: Union[CqState, DensityOperator]) -> CqState:
    if isinstance(state, CqState):
        return state
    bits = int(math.log2(state.dims[0]))
    return cq_from_density(state, bits)


def _size(dims) -> int:
    return int(np.prod(tuple(dims), dtype=np.int64))


def _dimension_problem(chan: LeakageChannel, state: CqState) -> Optional[str]:
    pre, leak = chan.pre_process, chan.leak_map
    e_out = _size(pre.out_dims)
    if pre.d_in != state.side_dim:
        return f"ψ expects side dimension {pre.d_in}, state has {state.side_dim}"
    if chan.controlled:
        if leak.control_bits != state.alphabet_bits:
            return f"Λ is controlled by {leak.control_bits} bits, A has {state.alphabet_bits}"
        if _size(leak.in_dims) != e_out:
            return f"Λ branches read dimension {_size(leak.in_dims)}, ψ outputs {e_out}"
        if len(leak.out_dims) < 2 or _size(leak.out_dims[1:]) != e_out:
            return f"Λ branches output {leak.out_dims}, expected (L, {e_out})"
        return None
    da = 1 << state.alphabet_bits
    if leak.in_dims[0] != da or _size(leak.in_dims[1:]) != e_out:
        return f"Λ reads {leak.in_dims}, expected ({da}, {e_out})"
    if len(leak.out_dims) < 2 or leak.out_dims[0] != da or _size(leak.out_dims[2:]) != e_out:
        return f"Λ outputs {leak.out_dims}, expected ({da}, L, {e_out})"
    return None


def _dense_leak(chan: LeakageChannel, mid: CqState) -> tuple[np.ndarray, tuple[int, ...]]:
    """Λ applied to the dense (A, E′) state; result on (A, L, E′)."""
    joint = mid.joint()
    out_dims = (joint.dims[0], chan.l_dim) + mid.side_dims
    matrix, _ = la.apply_kraus_matrix(
        chan.leak_map.stacked, joint.matrix, joint.dims, list(range(len(joint.dims))), [_size(out_dims)]
    )
    return la.hermitize(matrix), out_dims


def _controlled_blocks(chan: LeakageChannel, mid: CqState) -> dict[Bits, np.ndarray]:
    """Weighted blocks on (L, E′) after each branch."""
    out = {}
    for x, sigma in zip(mid.symbols, mid.weighted_blocks()):
        out[x] = chan.leak_map.branch(x).apply_matrix(sigma)
    return out


def marginal_residual(chan: LeakageChannel, mid: CqState) -> float:
    """‖Tr_L Λ(ρ_{AE′}) − ρ_{AE′}‖₁ on the post-ψ state."""
    if chan.controlled:
        dl = chan.l_dim
        d = mid.side_dim
        total = 0.0
        for sigma, leaked in zip(mid.weighted_blocks(), _controlled_blocks(chan, mid).values()):
            reduced = la.partial_trace_matrix(leaked, (dl, d), [1])
            total += la.trace_norm(reduced - sigma)
        return total
    matrix, dims = _dense_leak(chan, mid)
    keep = [0] + list(range(2, len(dims)))
    reduced = la.partial_trace_matrix(matrix, dims, keep)
    return la.trace_norm(reduced - mid.joint().matrix)


def validate_leakage_channel(
    chan: LeakageChannel,
    state: Union[CqState, DensityOperator],
) -> ValidationReport:
    """Check every clause on the given state; the first failing clause is reported."""
    state = _as_cq(state)
    clauses = {name: False for name in CLAUSES}

    problem = _dimension_problem(chan, state)
    if problem is not None:
        logger.warning(f"Leakage channel '{chan.name}' rejected: {problem}")
        return ValidationReport(False, math.inf, clauses, "dimension", problem)
    clauses["dimension"] = True

    maps = [chan.pre_process] + (list(chan.leak_map.branches.values()) if chan.controlled else [chan.leak_map])
    tp = max(m.trace_preservation_error() for m in maps)
    if tp > TOLERANCE.TRACE:
        return ValidationReport(False, tp, clauses, "trace-preserving", f"max |ΣK†K − I| = {tp:.3e}")
    clauses["trace-preserving"] = True

    if chan.leaked_bits > chan.lam + 1e-12:
        message = f"dim L = {chan.l_dim} exceeds 2^λ = {2 ** chan.lam:g}"
        logger.warning(f"Leakage channel '{chan.name}' rejected: {message}")
        return ValidationReport(False, chan.leaked_bits - chan.lam, clauses, "leakage-bound", message)
    clauses["leakage-bound"] = True

    mid = state.map_side_information(chan.pre_process)
    residual = marginal_residual(chan, mid)
    if residual > TOLERANCE.INVARIANCE:
        message = f"Tr_L Λ(ρ_AE′) differs from ρ_AE′ by {residual:.6g} in trace norm"
        logger.warning(f"Leakage channel '{chan.name}' rejected: {message}")
        return ValidationReport(False, residual, clauses, "marginal-invariant", message)
    clauses["marginal-invariant"] = True
    logger.debug(f"Leakage channel '{chan.name}' valid (residual {residual:.3e})")
    return ValidationReport(True, residual, clauses)


def apply_leakage_cq(
    chan: LeakageChannel,
    state: Union[CqState, DensityOperator],
    validate: bool = True,
) -> CqState:
    """φ(ρ) as a cq state on A with side information (L, E′)."""
    state = _as_cq(state)
    if validate:
        validate_leakage_channel(chan, state).raise_if_invalid()
    else:
        problem = _dimension_problem(chan, state)
        if problem is not None:
            raise DimensionMismatchError(problem)
    mid = state.map_side_information(chan.pre_process)
    side_dims = (chan.l_dim,) + mid.side_dims
    if chan.controlled:
        return CqState.from_weighted(_controlled_blocks(chan, mid), state.alphabet_bits, side_dims)
    matrix, dims = _dense_leak(chan, mid)
    return cq_from_density(DensityOperator.from_matrix(matrix, dims, check=False), state.alphabet_bits)


def apply_leakage(
    chan: LeakageChannel,
    state: Union[CqState, DensityOperator],
    validate: bool = True,
) -> DensityOperator:
    """φ(ρ) as a dense operator on (A, L, E′)."""
    cq = _as_cq(state)
    if chan.controlled:
        return apply_leakage_cq(chan, cq, validate).joint()
    if validate:
        validate_leakage_channel(chan, cq).raise_if_invalid()
    matrix, dims = _dense_leak(chan, cq.map_side_information(chan.pre_process))
    return DensityOperator.from_matrix(matrix, dims, check=False)


# =============================================================================
# Channel library
# =============================================================================

def _basis_vector(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def append_zero(a_bits: int, e_dims: tuple[int, ...], l_dim: int = 1) -> LeakageChannel:
    """Λ appends |0⟩_L regardless of A; ψ is the identity."""
    zero = _basis_vector(0, l_dim)
    branches = {int_to_bits(a, a_bits): append_state_channel(e_dims, zero) for a in range(1 << a_bits)}
    leak = ClassicallyControlledChannel(a_bits, branches, "append-zero")
    return LeakageChannel(identity_channel(e_dims), leak, math.log2(l_dim), 0, "append-zero")


def classical_bit_leak(
    a_bits: int,
    e_dims: tuple[int, ...],
    bits: int = 1,
    positions: Optional[tuple[int, ...]] = None,
) -> LeakageChannel:
    """Copy ``bits`` bits of A (the leading ones unless positions are given) into L."""
    positions = tuple(range(bits)) if positions is None else tuple(positions)
    if len(positions) != bits or any(not 0 <= p < a_bits for p in positions):
        raise DimensionMismatchError(f"cannot leak positions {positions} of a {a_bits}-bit register")
    l_dim = 1 << bits
    branches = {}
    for a in range(1 << a_bits):
        x = int_to_bits(a, a_bits)
        value = 0
        for p in positions:
            value = (value << 1) | x[p]
        branches[x] = append_state_channel(e_dims, _basis_vector(value, l_dim), f"copy({value})")
    leak = ClassicallyControlledChannel(a_bits, branches, f"classical-leak({bits})")
    return LeakageChannel(identity_channel(e_dims), leak, float(bits), 0, f"classical-bit-leak({bits})")


def bell_state(x: Bits) -> np.ndarray:
    """(Z^{x0} X^{x1} ⊗ I)|Φ+⟩ on (L, E′)."""
    phi = np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2)
    x_gate = np.array([[0, 1], [1, 0]], dtype=complex)
    z_gate = np.diag([1, -1]).astype(complex)
    local = np.linalg.matrix_power(z_gate, x[0]) @ np.linalg.matrix_power(x_gate, x[1])
    return np.kron(local, np.eye(2)) @ phi


def replacement_channel(
    omega: np.ndarray,
    in_dims: tuple[int, ...],
    out_dims: tuple[int, ...],
    name: str,
) -> KrausChannel:
    """X ↦ tr(X)·ω with Kraus operators √μ_i |w_i⟩⟨j|."""
    d_in = _size(in_dims)
    eigvals, eigvecs = la.eigh_psd(omega)
    ops = []
    for mu, w in zip(eigvals, eigvecs.T):
        if mu <= TOLERANCE.PSD:
            continue
        for j in range(d_in):
            op = np.zeros((omega.shape[0], d_in), dtype=complex)
            op[:, j] = math.sqrt(mu) * w
            ops.append(op)
    return KrausChannel(tuple(ops), in_dims, out_dims, name)


def superdense_leak() -> LeakageChannel:
    """Two bits of A written into one qubit L entangled with E′.

    Branch x replaces E′ by the Bell state Φ_x on (L, E′). The E′ marginal is
    I/2 for every x, so the channel is valid exactly for states whose
    conditionals on E are maximally mixed qubits.
    """
    branches = {}
    for a in range(4):
        x = int_to_bits(a, 2)
        psi = bell_state(x)
        branches[x] = replacement_channel(np.outer(psi, psi.conj()), (2,), (2, 2), f"bell({a})")
    leak = ClassicallyControlledChannel(2, branches, "superdense")
    return LeakageChannel(identity_channel((2,)), leak, 1.0, 0, "superdense-leak")


def superdense_state() -> CqState:
    """Uniform two-bit A with a maximally mixed qubit E independent of A."""
    mixed = DensityOperator(np.eye(2, dtype=complex) / 2, (2,))
    probs = {int_to_bits(a, 2): 0.25 for a in range(4)}
    return CqState(probs, {x: mixed for x in probs}, 2)


def cnot_copy_attack(k: int, e_qubits: Optional[int] = None) -> LeakageChannel:
    """XOR the k bits of A into E with no L register at all.

    This map reads A and writes E′ directly, so it cannot pass the
    marginal-invariant clause on any state where E′ starts uncorrelated.
    """
    e_qubits = k if e_qubits is None else e_qubits
    if e_qubits < k:
        raise DimensionMismatchError(f"need at least {k} qubits in E, got {e_qubits}")
    d = 1 << e_qubits
    empty = append_state_channel((d,), np.ones(1, dtype=complex), "no-L")
    branches = {x: empty.compose(ch) for x, ch in xor_branches(k, e_qubits).items()}
    leak = ClassicallyControlledChannel(k, branches, f"cnot-copy({k})")
    return LeakageChannel(identity_channel((d,)), leak, 0.0, 0, f"cnot-copy-attack({k})")


def cnot_copy_state(k: int) -> CqState:
    """Uniform k-bit A with E = |0…0⟩ on k qubits, so H_min(A|E) = k."""
    zero = basis_state(0, 1 << k)
    probs = {int_to_bits(a, k): 1.0 / (1 << k) for a in range(1 << k)}
    return CqState(probs, {x: zero for x in probs}, k)


def random_extension(rho: np.ndarray, l_dim: int, rng: np.random.Generator) -> np.ndarray:
    """Random ω on (L, E′) with Tr_L ω = ρ: a random channel applied to a purifying register."""
    d = rho.shape[0]
    cols = purification_matrix(rho, min_reference=1)
    r = cols.shape[1]
    pure = cols.reshape(-1)
    joint = np.outer(pure, pure.conj())
    channel = random_channel(r, l_dim, rng)
    omega, _ = la.apply_kraus_matrix(channel.stacked, joint, (d, r), [1], [l_dim])
    return la.hermitize(la.permute_subsystems(omega, (d, l_dim), [1, 0]))


def random_leakage_channel(
    state: CqState,
    rng: np.random.Generator,
    l_dim: int = 2,
    e_out_dim: Optional[int] = None,
) -> LeakageChannel:
    """Random ψ followed by a leak that is valid for this state by construction.

    Each branch replaces E′ by a random extension of the post-ψ conditional,
    so L may be entangled with E′ while the (A, E′) marginal stays fixed.
    """
    e_out_dim = state.side_dim if e_out_dim is None else e_out_dim
    psi = random_channel(state.side_dim, e_out_dim, rng)
    psi = KrausChannel(psi.kraus_ops, state.side_dims, (e_out_dim,), psi.name)
    mid = state.map_side_information(psi)
    branches = {}
    for x in mid.symbols:
        rho = mid.conditionals[x].matrix
        omega = random_extension(rho, l_dim, rng)
        branches[x] = replacement_channel(omega, (e_out_dim,), (l_dim, e_out_dim), f"extend({bits_key(x)})")
    for a in range(1 << state.alphabet_bits):
        x = int_to_bits(a, state.alphabet_bits)
        if x not in branches:
            branches[x] = append_state_channel((e_out_dim,), _basis_vector(0, l_dim))
    leak = ClassicallyControlledChannel(state.alphabet_bits, branches, "random-extension")
    return LeakageChannel(psi, leak, math.log2(l_dim), None, "random-leakage")


def dense_bit_copy(e_dims: tuple[int, ...]) -> LeakageChannel:
    """Λ = CNOT from a one-bit A onto a fresh qubit L, as a single dense isometry on (A, E′)."""
    d = _size(e_dims)
    v = np.zeros((2, 2, 2), dtype=complex)
    for a in (0, 1):
        v[a, a, a] = 1.0
    op = np.kron(v.reshape(4, 2), np.eye(d, dtype=complex))
    leak = KrausChannel((op,), (2,) + tuple(e_dims), (2, 2) + tuple(e_dims), "dense-copy")
    return LeakageChannel(identity_channel(e_dims), leak, 1.0, 0, "dense-bit-copy")
