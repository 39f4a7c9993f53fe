"""Bounded adversaries: distinguisher and guessing strategies with gate costs."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Optional, Sequence

import numpy as np

from ..constants import CIRCUIT
from ..qcore.channels import KrausChannel, Povm, unitary_channel
from ..qcore.errors import DimensionMismatchError, LabError
from ..qcore.measurements import helstrom_measurement, pretty_good_measurement
from ..utils.helpers import Bits, bits_to_int, bit_length_for
from ..utils.logging import get_logger
from .circuits import enumerate_circuits

logger = get_logger("metrics.adversary")


class InvalidFamilyError(LabError, ValueError):
    """Adversary family violates its budget or structure."""
    pass


class StrategyKind(Enum):
    """How a strategy turns the (preprocessed) side register into an answer."""

    CONSTANT = "constant"
    BASIS = "basis"
    FIXED = "fixed"
    HELSTROM = "helstrom"
    PRETTY_GOOD = "pretty_good"


@dataclass(frozen=True, eq=False)
class Strategy:
    """A distinguisher or guesser with a declared gate cost.

    Distinguish mode: a binary answer, compared between two operators.
    BASIS measures qubit 0 after the optional preprocessing channel.
    Guess mode: an answer for every symbol; BASIS reads the leading
    alphabet bits of the full computational-basis outcome.
    """

    name: str
    kind: StrategyKind
    gate_cost: int
    channel: Optional[KrausChannel] = None
    povm: Optional[Povm] = None
    constant: int = 0

    @property
    def input_dim(self) -> Optional[int]:
        """Side dimension the strategy is built for; None when it adapts to any."""
        if self.channel is not None:
            return self.channel.d_in
        if self.kind is StrategyKind.FIXED and self.povm is not None:
            return self.povm.dim
        return None

    def _pre(self, matrix: np.ndarray) -> np.ndarray:
        if self.channel is None:
            return matrix
        if self.channel.d_in != matrix.shape[0]:
            raise DimensionMismatchError(
                f"strategy '{self.name}' expects dimension {self.channel.d_in}, got {matrix.shape[0]}"
            )
        return self.channel.apply_matrix(matrix)

    # Distinguish mode ---------------------------------------------------

    def accept_operator(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """POVM element for answer 1 on the preprocessed space."""
        pa, pb = self._pre(a), self._pre(b)
        d = pa.shape[0]
        if self.kind is StrategyKind.CONSTANT:
            return float(self.constant) * np.eye(d, dtype=complex)
        if self.kind is StrategyKind.BASIS:
            diag = np.array([(z >> (bit_length_for(d) - 1)) & 1 if d > 1 else 0 for z in range(d)], dtype=float)
            return np.diag(diag).astype(complex)
        if self.kind is StrategyKind.FIXED:
            if self.povm is None or 1 not in self.povm.elements:
                raise InvalidFamilyError(f"strategy '{self.name}' has no outcome 1")
            return self.povm.elements[1]
        if self.kind is StrategyKind.HELSTROM:
            return helstrom_measurement(pa, pb, outcomes=(1, 0)).elements[1]
        return pretty_good_measurement([pa, pb], outcomes=[1, 0]).elements[1]

    def advantage(self, a: np.ndarray, b: np.ndarray) -> float:
        """(1/2)|Pr[C(a)=1] − Pr[C(b)=1]|."""
        m1 = self.accept_operator(a, b)
        delta = self._pre(a) - self._pre(b)
        return 0.5 * abs(float(np.real(np.trace(m1 @ delta))))

    # Guess mode ---------------------------------------------------------

    def guess_success(self, weighted: Sequence[np.ndarray], symbols: Sequence[Bits]) -> float:
        """Σ_x tr(E_x σ_x) for the strategy's guessing measurement (no renormalization)."""
        if self.kind is StrategyKind.CONSTANT:
            return max(float(np.real(np.trace(s))) for s in weighted)
        pre = [self._pre(s) for s in weighted]
        d = pre[0].shape[0]
        if self.kind is StrategyKind.BASIS:
            n = len(symbols[0]) if symbols else 0
            q = bit_length_for(d)
            shift = q - n if (1 << q) == d and q >= n else 0
            index = {bits_to_int(x): i for i, x in enumerate(symbols)}
            diags = np.real(np.array([np.diag(s) for s in pre]))
            total = 0.0
            for z in range(d):
                i = index.get(z >> shift)
                if i is not None:
                    total += diags[i, z]
            return float(total)
        if self.kind is StrategyKind.FIXED:
            if self.povm is None:
                raise InvalidFamilyError(f"strategy '{self.name}' has no POVM")
            return float(sum(self.povm.probability(x, s) for x, s in zip(symbols, pre)))
        if self.kind is StrategyKind.HELSTROM:
            # Import here to avoid circular imports
            from ..entropy.guessing import guess_weighted

            return guess_weighted(pre, list(symbols)).value
        povm = pretty_good_measurement(pre, list(symbols))
        return float(sum(povm.probability(x, s) for x, s in zip(symbols, pre)))

    def to_dict(self) -> dict[str, Any]:
        return {"name": self.name, "kind": self.kind.value, "gate_cost": self.gate_cost}


ALWAYS_0 = Strategy("always-0", StrategyKind.CONSTANT, 0, constant=0)
ALWAYS_1 = Strategy("always-1", StrategyKind.CONSTANT, 0, constant=1)


@dataclass(frozen=True, eq=False)
class AdversaryFamily:
    """Strategies admitted at a gate budget (None = no budget).

    The two constant distinguishers are always members. With ``unbounded``
    set, the family stands for every measurement and distance/guessing
    queries collapse to their information-theoretic values.
    """

    strategies: tuple[Strategy, ...]
    budget: Optional[int] = None
    unbounded: bool = False
    description: str = "custom"
    _circuit_stack: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self) -> None:
        names = {s.name for s in self.strategies}
        extra = tuple(c for c in (ALWAYS_0, ALWAYS_1) if c.name not in names)
        strategies = extra + tuple(self.strategies)
        if self.budget is not None:
            over = [s.name for s in strategies if s.gate_cost > self.budget]
            if over:
                raise InvalidFamilyError(f"strategies over budget {self.budget}: {over[:5]}")
        object.__setattr__(self, "strategies", strategies)

    def __len__(self) -> int:
        return len(self.strategies)

    def check_side_dim(self, side_dim: int) -> None:
        """Raise DimensionMismatchError if a strategy is built for another side dimension."""
        wrong = [(s.name, s.input_dim) for s in self.strategies if s.input_dim not in (None, side_dim)]
        if wrong:
            raise DimensionMismatchError(
                f"family '{self.description}' has strategies for other side dimensions than {side_dim}: {wrong[:5]}"
            )

    def restrict(self, budget: Optional[int]) -> "AdversaryFamily":
        """Sub-family of strategies costing at most budget."""
        if budget is None:
            return self
        if self.budget is not None and budget >= self.budget and not self.unbounded:
            return self
        kept = tuple(s for s in self.strategies if s.gate_cost <= budget)
        stack = None
        if self._circuit_stack is not None:
            mask = [
                s.gate_cost <= budget
                for s in self.strategies
                if s.kind is StrategyKind.BASIS and s.channel is not None
            ]
            stack = self._circuit_stack[np.array(mask, dtype=bool)]
        return AdversaryFamily(kept, budget, False, f"{self.description}|s<={budget}", stack)

    def best_advantage(self, a: np.ndarray, b: np.ndarray) -> tuple[float, str]:
        """Largest (1/2)|ΔPr| over the family and the strategy achieving it."""
        best, best_name = 0.0, ALWAYS_0.name
        batched = self._circuit_stack is not None
        for s in self.strategies:
            if batched and s.kind is StrategyKind.BASIS and s.channel is not None:
                continue
            value = s.advantage(a, b)
            if value > best:
                best, best_name = value, s.name
        if batched and len(self._circuit_stack):
            value, index = self._batched_advantage(a - b)
            if value > best:
                circuits = [s for s in self.strategies if s.kind is StrategyKind.BASIS and s.channel is not None]
                best, best_name = value, circuits[index].name
        return best, best_name

    def best_guess(self, weighted: Sequence[np.ndarray], symbols: Sequence[Bits]) -> tuple[float, str]:
        """Highest guessing success over the family and the strategy achieving it."""
        best, best_name = -1.0, ALWAYS_0.name
        for s in self.strategies:
            value = s.guess_success(weighted, symbols)
            if value > best:
                best, best_name = value, s.name
        return best, best_name

    def _batched_advantage(self, delta: np.ndarray) -> tuple[float, int]:
        us = self._circuit_stack
        d = us.shape[1]
        # Diagonal of U Δ U† for every circuit at once
        probs = np.real(np.einsum("nzi,ij,nzj->nz", us, delta, us.conj(), optimize=True))
        ones = np.array([(z >> (bit_length_for(d) - 1)) & 1 if d > 1 else 0 for z in range(d)], dtype=bool)
        adv = 0.5 * np.abs(probs[:, ones].sum(axis=1))
        index = int(np.argmax(adv))
        return float(adv[index]), index

    def to_dict(self) -> dict[str, Any]:
        return {
            "description": self.description,
            "budget": self.budget,
            "unbounded": self.unbounded,
            "size": len(self.strategies),
        }


# =============================================================================
# Family builders
# =============================================================================

def constant_family() -> AdversaryFamily:
    """Only the two constant distinguishers (budget 0)."""
    return AdversaryFamily((), budget=0, description="constants")


def basis_strategy(name: str = "basis", gate_cost: int = CIRCUIT.BASIS_MEASUREMENT_COST) -> Strategy:
    return Strategy(name, StrategyKind.BASIS, gate_cost)


def fixed_strategy(name: str, povm: Povm, gate_cost: int, channel: Optional[KrausChannel] = None) -> Strategy:
    return Strategy(name, StrategyKind.FIXED, gate_cost, channel=channel, povm=povm)


def named_family(
    side_dim: int,
    budget: Optional[int] = None,
    include: Sequence[str] = ("basis", "helstrom", "pretty_good"),
) -> AdversaryFamily:
    """Named strategy library with declared per-qubit costs, filtered by budget."""
    qubits = max(1, bit_length_for(side_dim))
    costs = {
        "basis": CIRCUIT.BASIS_MEASUREMENT_COST,
        "helstrom": CIRCUIT.HELSTROM_COST_PER_QUBIT * qubits,
        "pretty_good": CIRCUIT.PRETTY_GOOD_COST_PER_QUBIT * qubits,
    }
    kinds = {"basis": StrategyKind.BASIS, "helstrom": StrategyKind.HELSTROM, "pretty_good": StrategyKind.PRETTY_GOOD}
    strategies = []
    for name in include:
        if name not in kinds:
            raise InvalidFamilyError(f"unknown named strategy '{name}'")
        if budget is None or costs[name] <= budget:
            strategies.append(Strategy(name, kinds[name], costs[name]))
    return AdversaryFamily(tuple(strategies), budget, description=f"named({','.join(include)})")


def unbounded_family() -> AdversaryFamily:
    """Every measurement (s → ∞)."""
    strategies = (
        Strategy("basis", StrategyKind.BASIS, 0),
        Strategy("helstrom", StrategyKind.HELSTROM, 0),
    )
    return AdversaryFamily(strategies, None, True, "unbounded")


def enumerated_family(qubits: int, max_gates: int, budget: Optional[int] = None) -> AdversaryFamily:
    """All distinct {H,T,CNOT} circuits up to max_gates followed by a basis measurement."""
    budget = max_gates if budget is None else min(budget, max_gates)
    circuits = [c for c in enumerate_circuits(qubits, max_gates) if c.gate_count <= budget]
    d = 1 << qubits
    strategies = tuple(
        Strategy(f"circuit[{c.name}]", StrategyKind.BASIS, c.gate_count, channel=unitary_channel(c.unitary, (d,)))
        for c in circuits
    )
    stack = np.stack([c.unitary for c in circuits])
    logger.debug(f"Enumerated family: {len(circuits)} circuits on {qubits} qubits, budget {budget}")
    return AdversaryFamily(strategies, budget, False, f"enumerate(q={qubits},s={max_gates})", stack)


def family_from_dict(data: dict[str, Any], side_dim: int) -> AdversaryFamily:
    """Decode {"unbounded": true} | {"enumerate": {...}} | {"strategies": [...], "budget": s}."""
    if data.get("unbounded"):
        return unbounded_family()
    budget = data.get("budget")
    if "enumerate" in data:
        spec = data["enumerate"]
        return enumerated_family(int(spec["qubits"]), int(spec["max_gates"]), budget)
    names = data.get("strategies", [])
    if names == ["constants"] or not names:
        return AdversaryFamily((), budget, description="constants")
    return named_family(side_dim, budget, names)
