"""Exhaustive enumeration of small {H, T, CNOT} circuits."""

from dataclasses import dataclass
from functools import reduce

import numpy as np

from ..constants import LIMITS
from ..qcore.channels import HADAMARD
from ..qcore.errors import SizeCapError
from ..utils.logging import get_logger, PerformanceLogger

logger = get_logger("metrics.circuits")

T_GATE = np.diag([1.0, np.exp(1j * np.pi / 4)]).astype(complex)

# Upper bound on distinct unitaries kept by one enumeration
MAX_CIRCUITS = 200_000


@dataclass(frozen=True, eq=False)
class Circuit:
    """A gate sequence and the unitary it implements (qubit 0 most significant)."""

    gates: tuple[str, ...]
    unitary: np.ndarray

    @property
    def gate_count(self) -> int:
        return len(self.gates)

    @property
    def name(self) -> str:
        return ".".join(self.gates) if self.gates else "id"


def _single(gate: np.ndarray, target: int, qubits: int) -> np.ndarray:
    mats = [gate if q == target else np.eye(2, dtype=complex) for q in range(qubits)]
    return reduce(np.kron, mats)


def _cnot(control: int, target: int, qubits: int) -> np.ndarray:
    d = 1 << qubits
    u = np.zeros((d, d), dtype=complex)
    for z in range(d):
        c = (z >> (qubits - 1 - control)) & 1
        out = z ^ (c << (qubits - 1 - target))
        u[out, z] = 1.0
    return u


def gate_library(qubits: int) -> list[tuple[str, np.ndarray]]:
    """Every single gate of the cost model on the given number of qubits."""
    gates = []
    for q in range(qubits):
        gates.append((f"H{q}", _single(HADAMARD, q, qubits)))
        gates.append((f"T{q}", _single(T_GATE, q, qubits)))
    for c in range(qubits):
        for t in range(qubits):
            if c != t:
                gates.append((f"CNOT{c}{t}", _cnot(c, t, qubits)))
    return gates


def unitary_key(u: np.ndarray, decimals: int = 8) -> bytes:
    """Global-phase-normalized, rounded fingerprint of a unitary."""
    flat = u.reshape(-1)
    pivot = flat[np.argmax(np.abs(flat) > 1e-9)]
    normalized = flat * (np.conj(pivot) / abs(pivot))
    rounded = np.round(normalized, decimals) + (0.0 + 0.0j)
    return rounded.tobytes()


def enumerate_circuits(qubits: int, max_gates: int) -> list[Circuit]:
    """Breadth-first enumeration of distinct unitaries with at most max_gates gates.

    Each unitary is kept with its shortest gate sequence.
    """
    if qubits > LIMITS.ENUMERATE_MAX_QUBITS:
        raise SizeCapError("enumeration qubits", qubits, LIMITS.ENUMERATE_MAX_QUBITS)
    if max_gates > LIMITS.ENUMERATE_MAX_GATES:
        raise SizeCapError("enumeration gates", max_gates, LIMITS.ENUMERATE_MAX_GATES)

    with PerformanceLogger(logger, f"enumerate_circuits(q={qubits}, s={max_gates})"):
        library = gate_library(qubits)
        identity = np.eye(1 << qubits, dtype=complex)
        seen = {unitary_key(identity)}
        circuits = [Circuit((), identity)]
        frontier = circuits[:]
        for depth in range(max_gates):
            next_frontier = []
            for circuit in frontier:
                for name, gate in library:
                    u = gate @ circuit.unitary
                    key = unitary_key(u)
                    if key in seen:
                        continue
                    seen.add(key)
                    new = Circuit(circuit.gates + (name,), u)
                    next_frontier.append(new)
                    if len(seen) > MAX_CIRCUITS:
                        raise SizeCapError("enumerated circuits", len(seen), MAX_CIRCUITS)
            circuits.extend(next_frontier)
            frontier = next_frontier
            logger.debug(f"depth {depth + 1}: {len(next_frontier)} new unitaries")

    return circuits
