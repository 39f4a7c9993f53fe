"""Protocol configuration and the per-round channels it selects."""

import math
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np

from ..extractors.composition import ExtractorSpec
from ..qcore.channels import (
    ClassicallyControlledChannel,
    KrausChannel,
    append_state_channel,
    depolarizing_channel,
    unitary_channel,
    xor_branches,
)
from ..qcore.errors import LabError
from ..qcore.states import random_unitary
from ..utils.helpers import int_to_bits
from .ensemble import ClassicalRegisterEnsemble

VARIANTS = ("fresh-seed", "chained")
PSI_KINDS = ("identity", "random-unitary", "depolarize")
LEAK_KINDS = ("classical-bit", "cnot-copy")

DEPOLARIZE_P = 0.5


def _is_seed_name(name: str) -> bool:
    return name.startswith("K") and name[1:].isdigit()


class ProtocolConfigError(LabError):
    """Protocol configuration cannot be run."""
    pass


@dataclass(frozen=True, eq=False)
class ProtocolConfig:
    """Sources ρ_{ABE₀R₀}, round count, leakage per round and the extractor.

    ``psi`` and ``leak`` name the adversary's pre-processing and leakage map;
    both are rebuilt every round for the current E dimensions. ``k`` defaults
    to the smaller initial min-entropy of the two sources.
    """

    sources: ClassicalRegisterEnsemble
    rounds: int
    lam: int
    extractor: ExtractorSpec
    variant: str = "fresh-seed"
    psi: str = "identity"
    leak: str = "classical-bit"
    epsilon: float = 0.0
    budget: Optional[int] = None
    psi_gate_cost: int = 0
    k: Optional[float] = None
    seed: int = 0
    allow_invalid: bool = False

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        n = self.extractor.n
        if self.rounds < 0:
            raise ProtocolConfigError(f"rounds must be >= 0, got {self.rounds}")
        if self.lam < 0:
            raise ProtocolConfigError(f"lambda must be >= 0, got {self.lam}")
        if self.variant not in VARIANTS:
            raise ProtocolConfigError(f"variant must be one of {VARIANTS}, got '{self.variant}'")
        if self.psi not in PSI_KINDS:
            raise ProtocolConfigError(f"psi must be one of {PSI_KINDS}, got '{self.psi}'")
        if self.leak not in LEAK_KINDS:
            raise ProtocolConfigError(f"leak must be one of {LEAK_KINDS}, got '{self.leak}'")
        if self.epsilon < 0:
            raise ProtocolConfigError(f"epsilon must be >= 0, got {self.epsilon}")
        if self.budget is not None and self.budget < 0:
            raise ProtocolConfigError(f"budget must be >= 0, got {self.budget}")
        for name in ("A", "B"):
            if name not in self.sources.registers:
                raise ProtocolConfigError(f"sources need a register named '{name}'")
            if self.sources.width(name) != n:
                raise ProtocolConfigError(
                    f"source {name} has {self.sources.width(name)} bits, extractor expects {n}"
                )
        if self.variant == "chained":
            if self.extractor.d != self.extractor.m:
                raise ProtocolConfigError(
                    f"chained seeds need d = m, extractor has d={self.extractor.d}, m={self.extractor.m}"
                )
            reserved = [r for r in self.sources.registers if r in ("K", "K_next") or _is_seed_name(r)]
            if reserved:
                raise ProtocolConfigError(f"register names {reserved} are reserved for chained seeds")
        if self.leak == "classical-bit" and self.lam > n:
            raise ProtocolConfigError(f"cannot leak {self.lam} bits of an {n}-bit source")
        if self.leak == "cnot-copy":
            qubits = math.log2(self.sources.e_dim)
            if not qubits.is_integer() or qubits < n:
                raise ProtocolConfigError(
                    f"cnot-copy needs at least {n} qubits in E, E has dimension {self.sources.e_dim}"
                )

    def to_dict(self) -> dict[str, Any]:
        return {
            "variant": self.variant,
            "rounds": self.rounds,
            "lambda": self.lam,
            "psi": self.psi,
            "leak": self.leak,
            "epsilon": self.epsilon,
            "budget": self.budget,
            "psi_gate_cost": self.psi_gate_cost,
            "k": self.k,
            "seed": self.seed,
            "allow_invalid": self.allow_invalid,
            "sources": self.sources.to_dict(),
            "extractor": self.extractor.to_dict(),
        }


def build_psi(kind: str, e_dims: tuple[int, ...], rng: np.random.Generator) -> Optional[KrausChannel]:
    """Adversary pre-processing on E; None for the identity."""
    d = int(np.prod(e_dims, dtype=np.int64))
    if kind == "identity":
        return None
    if kind == "random-unitary":
        return unitary_channel(random_unitary(d, rng), e_dims, "random-unitary")
    if kind == "depolarize":
        # acts on the first E subsystem only
        first = depolarizing_channel(e_dims[0], DEPOLARIZE_P)
        rest = np.eye(d // e_dims[0], dtype=complex)
        ops = tuple(np.kron(k, rest) for k in first.kraus_ops)
        return KrausChannel(ops, e_dims, e_dims, f"depolarize-first(p={DEPOLARIZE_P:g})")
    raise ProtocolConfigError(f"unknown psi '{kind}'")


def build_leak_branches(
    kind: str,
    n: int,
    lam: int,
    e_dims: tuple[int, ...],
    r_dim: int,
) -> ClassicallyControlledChannel:
    """Per-symbol maps (E, R) → (L, E, R) for the active source."""
    side_dims = tuple(e_dims) + (r_dim,)
    if kind == "classical-bit":
        l_dim = 1 << lam
        branches = {}
        for a in range(1 << n):
            x = int_to_bits(a, n)
            ket = np.zeros(l_dim, dtype=complex)
            ket[a >> (n - lam)] = 1.0
            branches[x] = append_state_channel(side_dims, ket, f"leak-prefix({a >> (n - lam)})")
        return ClassicallyControlledChannel(n, branches, f"classical-bit({lam})")
    if kind == "cnot-copy":
        e_qubits = int(round(math.log2(int(np.prod(e_dims, dtype=np.int64)))))
        lift = np.eye(r_dim, dtype=complex)
        branches = {}
        for x, xor in xor_branches(n, e_qubits).items():
            op = np.kron(xor.kraus_ops[0], lift)
            branches[x] = KrausChannel((op,), side_dims, (1,) + side_dims, xor.name)
        return ClassicallyControlledChannel(n, branches, f"cnot-copy({n})")
    raise ProtocolConfigError(f"unknown leak '{kind}'")
