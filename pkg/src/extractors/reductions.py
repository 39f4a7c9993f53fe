"""Reductions between distinguishing and predicting, and the hybrid bit-location argument."""

from dataclasses import dataclass
from typing import Any, Optional

import numpy as np

from ..metrics.adversary import AdversaryFamily, unbounded_family
from ..metrics.computational import DistanceInterval, computational_distance
from ..metrics.distances import block_trace_distance
from ..qcore.channels import Povm
from ..qcore.errors import DimensionMismatchError
from ..qcore.measurements import helstrom_measurement
from ..qcore.states import CqState
from ..utils.helpers import bits_to_int
from ..utils.logging import get_logger

logger = get_logger("extractors.reductions")

ZERO, ONE = (0,), (1,)


@dataclass(frozen=True, eq=False)
class Predictor:
    """Guessing measurement for a one-bit X and its exact success probability."""

    povm: Povm
    success: float
    strategy: str

    def to_dict(self) -> dict[str, Any]:
        return {"success": self.success, "strategy": self.strategy}


def _binary_blocks(state: CqState) -> tuple[np.ndarray, np.ndarray]:
    if state.alphabet_bits != 1:
        raise DimensionMismatchError(f"expected a one-bit register, got {state.alphabet_bits} bits")
    d = state.side_dim
    blocks = {x: s for x, s in zip(state.symbols, state.weighted_blocks())}
    zero = np.zeros((d, d), dtype=complex)
    return blocks.get(ZERO, zero), blocks.get(ONE, zero)


def joint_uniform_distance(state: CqState) -> float:
    """d(ρ_XE, U ⊗ ρ_E) computed on the joint blocks."""
    sigma0, sigma1 = _binary_blocks(state)
    half = 0.5 * (sigma0 + sigma1)
    return block_trace_distance([sigma0, sigma1], [half, half])


def distinguish_equals_predict(
    state: CqState,
    family: Optional[AdversaryFamily] = None,
) -> tuple[DistanceInterval, Predictor]:
    """Distance of p₀ρ⁰ from p₁ρ¹ and a predictor succeeding with 1/2 + that distance.

    For a finite family the predictor is the best family distinguisher A,
    answering 0 on accept when tr A(σ0 − σ1) ≥ 0; with no budget it is the
    Helstrom measurement.
    """
    family = family if family is not None else unbounded_family()
    sigma0, sigma1 = _binary_blocks(state)
    interval = computational_distance(sigma0, sigma1, family)
    d = sigma0.shape[0]

    if family.unbounded:
        povm = helstrom_measurement(sigma0, sigma1, outcomes=(ZERO, ONE))
        name = "helstrom"
    else:
        strategy = next(s for s in family.strategies if s.name == interval.best_strategy)
        accept = strategy.accept_operator(sigma0, sigma1)
        if strategy.channel is not None:
            # pull the accept operator back through the preprocessing channel
            ks = strategy.channel.stacked
            accept = np.einsum("kai,ab,kbj->ij", ks.conj(), accept, ks, optimize=True)
        accept = 0.5 * (accept + accept.conj().T)
        reject = np.eye(d, dtype=complex) - accept
        if float(np.real(np.trace(accept @ (sigma0 - sigma1)))) >= 0:
            povm = Povm({ZERO: accept, ONE: reject})
        else:
            povm = Povm({ZERO: reject, ONE: accept})
        name = strategy.name
    success = povm.probability(ZERO, sigma0) + povm.probability(ONE, sigma1)
    logger.debug(f"Predictor '{name}' success {success:.6f}, distance [{interval.lower:.6f}, {interval.upper:.6f}]")
    return interval, Predictor(povm, success, name)


@dataclass(frozen=True)
class HybridResult:
    """Located bit (1-based) and the hybrid gaps d(H_i, H_{i−1})."""

    index: int
    gap: float
    total_distance: float
    gaps: tuple[float, ...]

    def to_dict(self) -> dict[str, Any]:
        return {"index": self.index, "gap": self.gap, "total_distance": self.total_distance, "gaps": list(self.gaps)}


def prefix_hybrids(state: CqState) -> list[list[np.ndarray]]:
    """H_0..H_m: H_i keeps the first i bits of Z and replaces the rest by uniform bits."""
    m = state.alphabet_bits
    d = state.side_dim
    full = np.zeros((1 << m, d, d), dtype=complex)
    for x, s in zip(state.symbols, state.weighted_blocks()):
        full[bits_to_int(x)] = s
    hybrids = []
    for i in range(m + 1):
        # group z by its i-bit prefix and spread each group's mass uniformly
        grouped = full.reshape(1 << i, 1 << (m - i), d, d).sum(axis=1) / (1 << (m - i))
        hybrids.append(list(np.repeat(grouped, 1 << (m - i), axis=0)))
    return hybrids


def hybrid_locate_bit(state: CqState, eps: float) -> Optional[HybridResult]:
    """If d(ρ_ZB, U_m ⊗ ρ_B) > eps, the bit whose hybrid step carries the largest gap."""
    m = state.alphabet_bits
    if m < 1:
        raise DimensionMismatchError("hybrid argument needs at least one bit")
    hybrids = prefix_hybrids(state)
    total = block_trace_distance(hybrids[m], hybrids[0])
    if total <= eps:
        return None
    gaps = tuple(block_trace_distance(hybrids[i], hybrids[i - 1]) for i in range(1, m + 1))
    i = int(np.argmax(gaps))
    logger.debug(f"Hybrid gaps {gaps} for total distance {total:.6f}")
    return HybridResult(i + 1, gaps[i], total, gaps)

