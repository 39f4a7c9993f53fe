"""Block-diagonal states with several classical registers and quantum side information.

A state Σ_k |k⟩⟨k| ⊗ σ_k is stored as one weighted block σ_k on (E, R) per
joint register value k. E is the adversary's register; R collects the
purifying systems of earlier isometries and is never handed to a guesser.
"""

from dataclasses import dataclass
from typing import Any, Callable, Iterable, Mapping, Optional, Sequence

import numpy as np

from ..constants import LIMITS, TOLERANCE
from ..entropy.guessing import guess_weighted
from ..entropy.smoothing import EntropyQuery, smooth_min_entropy_lower
from ..entropy.vonneumann import entropy_of_spectrum
from ..leakage.dilation import DilationResult
from ..qcore import linalg as la
from ..qcore.channels import ClassicallyControlledChannel
from ..qcore.errors import DimensionMismatchError, InvalidStateError, SizeCapError
from ..qcore.states import CqState
from ..utils.helpers import Bits, bits_to_int, int_to_bits, safe_log2
from ..utils.logging import get_logger

logger = get_logger("protocols.ensemble")

Key = tuple[int, ...]


def _size(dims: Iterable[int]) -> int:
    return int(np.prod(tuple(dims), dtype=np.int64))


@dataclass(frozen=True, eq=False)
class ClassicalRegisterEnsemble:
    """Named classical registers, adversary register E and auxiliary register R."""

    registers: tuple[str, ...]
    bits: tuple[int, ...]
    blocks: Mapping[Key, np.ndarray]
    e_dims: tuple[int, ...]
    r_dim: int = 1

    def __post_init__(self) -> None:
        registers = tuple(self.registers)
        bits = tuple(int(b) for b in self.bits)
        e_dims = tuple(int(d) for d in self.e_dims) or (1,)
        if len(set(registers)) != len(registers):
            raise DimensionMismatchError(f"duplicate register names in {registers}")
        if len(bits) != len(registers):
            raise DimensionMismatchError(f"{len(registers)} registers but {len(bits)} bit widths")
        if self.r_dim > LIMITS.MAX_AUX_DIMENSION:
            raise SizeCapError("auxiliary dimension", self.r_dim, LIMITS.MAX_AUX_DIMENSION)
        side = _size(e_dims) * int(self.r_dim)
        if side > LIMITS.PROTOCOL_MAX_TOTAL_DIMENSION:
            raise SizeCapError("protocol side dimension", side, LIMITS.PROTOCOL_MAX_TOTAL_DIMENSION)

        blocks: dict[Key, np.ndarray] = {}
        for key, sigma in self.blocks.items():
            key = tuple(int(v) for v in key)
            if len(key) != len(registers) or any(not 0 <= v < (1 << b) for v, b in zip(key, bits)):
                raise DimensionMismatchError(f"key {key} does not fit registers {dict(zip(registers, bits))}")
            sigma = np.asarray(sigma, dtype=complex)
            if sigma.shape != (side, side):
                raise DimensionMismatchError(f"block for {key} has shape {sigma.shape}, expected ({side}, {side})")
            if float(np.real(np.trace(sigma))) > TOLERANCE.TRACE:
                blocks[key] = sigma
        if not blocks:
            raise InvalidStateError("ensemble has no weight")
        total = sum(float(np.real(np.trace(s))) for s in blocks.values())
        if total > 1 + TOLERANCE.TRACE:
            raise InvalidStateError(f"ensemble weight {total:.12g} exceeds 1")

        object.__setattr__(self, "registers", registers)
        object.__setattr__(self, "bits", bits)
        object.__setattr__(self, "e_dims", e_dims)
        object.__setattr__(self, "r_dim", int(self.r_dim))
        object.__setattr__(self, "blocks", dict(sorted(blocks.items())))

    # ------------------------------------------------------------------
    # Shape
    # ------------------------------------------------------------------

    @property
    def e_dim(self) -> int:
        return _size(self.e_dims)

    @property
    def side_dim(self) -> int:
        return self.e_dim * self.r_dim

    @property
    def total_weight(self) -> float:
        return float(sum(np.real(np.trace(s)) for s in self.blocks.values()))

    def index(self, name: str) -> int:
        try:
            return self.registers.index(name)
        except ValueError:
            raise DimensionMismatchError(f"no register named '{name}' in {self.registers}") from None

    def width(self, name: str) -> int:
        return self.bits[self.index(name)]

    def _replace(self, **changes: Any) -> "ClassicalRegisterEnsemble":
        fields = {
            "registers": self.registers,
            "bits": self.bits,
            "blocks": self.blocks,
            "e_dims": self.e_dims,
            "r_dim": self.r_dim,
        }
        fields.update(changes)
        return ClassicalRegisterEnsemble(**fields)

    # ------------------------------------------------------------------
    # Grouping
    # ------------------------------------------------------------------

    def _trace_env(self, sigma: np.ndarray) -> np.ndarray:
        if self.r_dim == 1:
            return sigma
        return la.partial_trace_matrix(sigma, (self.e_dim, self.r_dim), [0])

    def grouped(self, names: Sequence[str], include_env: bool = False) -> dict[Key, np.ndarray]:
        """Σ of blocks sharing the values of ``names``, on E (or on (E, R) with include_env)."""
        positions = [self.index(n) for n in names]
        out: dict[Key, np.ndarray] = {}
        for key, sigma in self.blocks.items():
            sub = tuple(key[p] for p in positions)
            block = sigma if include_env else self._trace_env(sigma)
            out[sub] = out[sub] + block if sub in out else block.copy()
        return out

    def marginal(self, keep: Sequence[str]) -> "ClassicalRegisterEnsemble":
        keep = list(keep)
        bits = tuple(self.width(n) for n in keep)
        return self._replace(registers=tuple(keep), bits=bits, blocks=self.grouped(keep, include_env=True))

    def drop(self, names: Sequence[str]) -> "ClassicalRegisterEnsemble":
        for n in names:
            self.index(n)
        return self.marginal([n for n in self.registers if n not in names])

    def rename(self, old: str, new: str) -> "ClassicalRegisterEnsemble":
        if new in self.registers:
            raise DimensionMismatchError(f"register '{new}' already exists")
        registers = tuple(new if n == old else n for n in self.registers)
        self.index(old)
        return self._replace(registers=registers)

    # ------------------------------------------------------------------
    # Entropic quantities
    # ------------------------------------------------------------------

    def cq_state(self, target: str, include_env: bool = False) -> CqState:
        """ρ_{T E} (or ρ_{T E R}) with every 2^b symbol present."""
        b = self.width(target)
        side_dims = self.e_dims + ((self.r_dim,) if include_env else ())
        d = _size(side_dims)
        groups = self.grouped([target], include_env)
        zero = np.zeros((d, d), dtype=complex)
        weighted = {int_to_bits(v, b): groups.get((v,), zero) for v in range(1 << b)}
        return CqState.from_weighted(weighted, b, side_dims)

    def min_entropy(self, target: str, given: Sequence[str] = (), epsilon: float = 0.0) -> float:
        """H_min^ε(T | G E) with G classical registers; R is traced out.

        With ε > 0 and classical conditioning the registers in G are folded
        into the side information as a block-diagonal operator.
        """
        given = list(given)
        if not given:
            return smooth_min_entropy_lower(EntropyQuery(self.cq_state(target), epsilon))
        if epsilon > 0:
            return smooth_min_entropy_lower(EntropyQuery(self._folded_cq(target, given), epsilon))
        b = self.width(target)
        symbols = [int_to_bits(v, b) for v in range(1 << b)]
        zero = np.zeros((self.e_dim, self.e_dim), dtype=complex)
        by_group: dict[Key, dict[int, np.ndarray]] = {}
        for key, sigma in self.grouped([target] + given).items():
            by_group.setdefault(key[1:], {})[key[0]] = sigma
        total = 0.0
        for group in by_group.values():
            weighted = [group.get(v, zero) for v in range(1 << b)]
            total += guess_weighted(weighted, symbols).dual_value
        return -safe_log2(total)

    def _folded_cq(self, target: str, given: Sequence[str]) -> CqState:
        # only group values that occur get a slot on the folded register
        pairs = self.grouped([target] + list(given))
        groups = sorted({key[1:] for key in pairs})
        slot = {g: i for i, g in enumerate(groups)}
        dg = len(groups)
        d = self.e_dim
        b = self.width(target)
        weighted = {int_to_bits(v, b): np.zeros((dg * d, dg * d), dtype=complex) for v in range(1 << b)}
        for key, sigma in pairs.items():
            g = slot[key[1:]]
            weighted[int_to_bits(key[0], b)][g * d:(g + 1) * d, g * d:(g + 1) * d] += sigma
        return CqState.from_weighted(weighted, b, (dg,) + self.e_dims)

    def _entropy(self, names: Sequence[str]) -> float:
        eigvals = [la.spectrum(s) for s in self.grouped(list(names), include_env=True).values()]
        return entropy_of_spectrum(np.concatenate(eigvals))

    def cmi(self, a: str, b: str, given: Sequence[str] = ()) -> float:
        """I(A:B | G E R) from the block spectra."""
        g = list(given)
        return self._entropy([a] + g) + self._entropy([b] + g) - self._entropy([a, b] + g) - self._entropy(g)

    def uniformity_distance(self, target: str, given: Sequence[str] = ()) -> float:
        """d(ρ_{T G E}, U_T ⊗ ρ_{G E}) with R traced out."""
        outputs = 1 << self.width(target)
        given = list(given)
        totals = self.grouped(given)
        by_group: dict[Key, list[np.ndarray]] = {g: [] for g in totals}
        for key, sigma in self.grouped([target] + given).items():
            by_group[key[1:]].append(sigma)
        distance = 0.0
        for g, present in by_group.items():
            share = totals[g] / outputs
            distance += sum(0.5 * la.trace_norm(s - share) for s in present)
            distance += (outputs - len(present)) * 0.5 * la.trace_norm(share)
        return distance

    # ------------------------------------------------------------------
    # Transformations
    # ------------------------------------------------------------------

    def with_uniform(self, name: str, bits: int) -> "ClassicalRegisterEnsemble":
        """Append an independent uniform register."""
        scale = 1.0 / (1 << bits)
        blocks = {key + (v,): scale * s for key, s in self.blocks.items() for v in range(1 << bits)}
        return self._replace(registers=self.registers + (name,), bits=self.bits + (bits,), blocks=blocks)

    def derive(self, name: str, bits: int, fn: Callable[[Mapping[str, int]], int]) -> "ClassicalRegisterEnsemble":
        """Append a register holding a deterministic function of the existing ones."""
        blocks = {}
        for key, s in self.blocks.items():
            value = int(fn(dict(zip(self.registers, key))))
            if not 0 <= value < (1 << bits):
                raise DimensionMismatchError(f"derived value {value} does not fit {bits} bits")
            blocks[key + (value,)] = s
        return self._replace(registers=self.registers + (name,), bits=self.bits + (bits,), blocks=blocks)

    def apply_isometry(self, dilation: DilationResult) -> "ClassicalRegisterEnsemble":
        """E → (E′, R_new) by V ⊗ I_R; the new purifying system joins R."""
        if _size(dilation.in_dims) != self.e_dim:
            raise DimensionMismatchError(f"isometry reads dimension {_size(dilation.in_dims)}, E has {self.e_dim}")
        lifted = np.kron(dilation.isometry, np.eye(self.r_dim, dtype=complex))
        new_r = dilation.aux_dim * self.r_dim
        d_out = _size(dilation.out_dims)
        # V⊗I leaves (E′, aux, R); aux and R merge into the new R
        blocks = {key: la.hermitize(lifted @ s @ lifted.conj().T) for key, s in self.blocks.items()}
        blocks, new_r = _compress(blocks, d_out, new_r)
        return self._replace(blocks=blocks, e_dims=tuple(dilation.out_dims), r_dim=new_r)

    def compress_environment(self) -> "ClassicalRegisterEnsemble":
        """Restrict R to the support of ρ_R; exact for every block."""
        if self.r_dim == 1:
            return self
        blocks, r = _compress(dict(self.blocks), self.e_dim, self.r_dim)
        if r != self.r_dim:
            logger.debug(f"Compressed auxiliary register {self.r_dim} -> {r}")
        return self._replace(blocks=blocks, r_dim=r)

    def apply_controlled(self, register: str, leak: ClassicallyControlledChannel) -> "ClassicalRegisterEnsemble":
        """Branch on one register's value; each branch maps (E, R) to (L, E, R) and L joins E."""
        pos = self.index(register)
        width = self.bits[pos]
        if leak.control_bits != width:
            raise DimensionMismatchError(f"leak is controlled by {leak.control_bits} bits, '{register}' has {width}")
        if _size(leak.in_dims) != self.side_dim:
            raise DimensionMismatchError(f"leak reads dimension {_size(leak.in_dims)}, (E, R) has {self.side_dim}")
        l_dim = int(leak.out_dims[0])
        if _size(leak.out_dims) != l_dim * self.side_dim:
            raise DimensionMismatchError(f"leak outputs {leak.out_dims}, expected (L, {self.side_dim})")
        blocks = {}
        for key, s in self.blocks.items():
            out = leak.branch(int_to_bits(key[pos], width)).apply_matrix(s)
            out = la.permute_subsystems(out, (l_dim, self.e_dim, self.r_dim), [1, 0, 2])
            blocks[key] = la.hermitize(out)
        return self._replace(blocks=blocks, e_dims=self.e_dims + (l_dim,))

    def to_dict(self) -> dict[str, Any]:
        return {
            "registers": dict(zip(self.registers, self.bits)),
            "e_dims": list(self.e_dims),
            "r_dim": self.r_dim,
            "support": len(self.blocks),
            "total_weight": self.total_weight,
        }

    def __repr__(self) -> str:
        regs = ", ".join(f"{n}:{b}" for n, b in zip(self.registers, self.bits))
        return f"ClassicalRegisterEnsemble({regs}; E={self.e_dims}, R={self.r_dim}, support={len(self.blocks)})"


def _compress(blocks: dict[Key, np.ndarray], e_dim: int, r_dim: int) -> tuple[dict[Key, np.ndarray], int]:
    rho_r = sum(la.partial_trace_matrix(s, (e_dim, r_dim), [1]) for s in blocks.values())
    basis = la.support_basis(rho_r)
    if basis.shape[1] in (0, r_dim):
        return blocks, r_dim
    w = np.kron(np.eye(e_dim, dtype=complex), basis)
    return {key: la.hermitize(w.conj().T @ s @ w) for key, s in blocks.items()}, basis.shape[1]


def product_ensemble(
    sources: Mapping[str, Mapping[Bits, float]],
    side: Optional[np.ndarray] = None,
    e_dims: Optional[Sequence[int]] = None,
) -> ClassicalRegisterEnsemble:
    """Independent classical registers with a fixed side state on E."""
    side = np.ones((1, 1), dtype=complex) if side is None else np.asarray(side, dtype=complex)
    e_dims = tuple(e_dims) if e_dims is not None else (side.shape[0],)
    names = tuple(sources)
    widths = tuple(len(next(iter(dist))) for dist in sources.values())
    blocks: dict[Key, np.ndarray] = {(): side}
    for dist in sources.values():
        blocks = {
            key + (bits_to_int(x),): p * s for key, s in blocks.items() for x, p in dist.items() if p > 0
        }
    return ClassicalRegisterEnsemble(names, widths, blocks, e_dims)


def uniform_distribution(bits: int) -> dict[Bits, float]:
    return {int_to_bits(v, bits): 1.0 / (1 << bits) for v in range(1 << bits)}
