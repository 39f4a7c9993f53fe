"""Inner-product one-bit extractor and its exact security test."""

import math
from dataclasses import dataclass
from typing import Any, Optional, Sequence

import numpy as np

from ..constants import LIMITS, TOLERANCE
from ..entropy.guessing import guess_weighted
from ..metrics.adversary import AdversaryFamily
from ..metrics.computational import DistanceInterval, computational_distance
from ..qcore.errors import DimensionMismatchError, SizeCapError
from ..qcore.states import CqState
from ..config import max_dimension
from ..utils.helpers import Bits, Verdict, bits_to_int
from ..utils.logging import PerformanceLogger, get_logger

logger = get_logger("extractors.inner_product")

_SEED_CHUNK = 512


def parity(value: int) -> int:
    return bin(value).count("1") & 1


def ip(x: Sequence[int], y: Sequence[int]) -> int:
    """⊕_i x_i·y_i."""
    if len(x) != len(y):
        raise DimensionMismatchError(f"inner product of {len(x)}-bit and {len(y)}-bit strings")
    return parity(bits_to_int(x) & bits_to_int(y))


def ip_threshold(eps_ext: float) -> float:
    """Entropy needed for error eps_ext: 1 − 2 log₂ ε."""
    return 1.0 - 2.0 * math.log2(eps_ext)


def ip_sign_matrix(symbols: Sequence[Bits], seeds: Sequence[int]) -> np.ndarray:
    """(−1)^{ip(x, y)} with seeds along rows and symbols along columns."""
    xs = np.array([bits_to_int(x) for x in symbols], dtype=np.int64)
    ys = np.asarray(seeds, dtype=np.int64)
    masked = ys[:, None] & xs[None, :]
    bits = np.zeros_like(masked)
    while np.any(masked):
        bits ^= masked & 1
        masked >>= 1
    return 1.0 - 2.0 * bits


def seeded_bit_distances(blocks: Sequence[np.ndarray], signs: np.ndarray) -> np.ndarray:
    """(1/2)‖Σ_x s_x σ_x‖₁ for each row of signs."""
    stack = np.asarray(blocks, dtype=complex)
    out = np.empty(signs.shape[0])
    for start in range(0, signs.shape[0], _SEED_CHUNK):
        chunk = signs[start:start + _SEED_CHUNK]
        mixed = np.einsum("yx,xij->yij", chunk, stack, optimize=True)
        mixed = 0.5 * (mixed + np.conj(np.swapaxes(mixed, 1, 2)))
        eigvals = np.linalg.eigvalsh(mixed)
        out[start:start + len(chunk)] = 0.5 * np.abs(eigvals).sum(axis=1)
    return out


@dataclass(frozen=True)
class IpExtractorReport:
    """Measured output distance of IP(X, Y) next to the entropy hypothesis."""

    n: int
    eps_ext: float
    distance: float
    exact: bool
    seeds_evaluated: int
    h_min: float
    threshold: float
    hypothesis_met: bool
    verdict: Verdict
    family_interval: Optional[DistanceInterval] = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "eps_ext": self.eps_ext,
            "distance": self.distance,
            "exact": self.exact,
            "seeds_evaluated": self.seeds_evaluated,
            "h_min": self.h_min,
            "threshold": self.threshold,
            "hypothesis_met": self.hypothesis_met,
            "verdict": self.verdict.value,
            "family_interval": self.family_interval.to_dict() if self.family_interval else None,
        }


def _joint_pair(state: CqState) -> tuple[np.ndarray, np.ndarray]:
    """Dense ρ_{IP(X,Y) Y E} and U₁ ⊗ ρ_{YE} on (bit, seed, E)."""
    n = state.alphabet_bits
    d = state.side_dim
    stack = np.asarray(state.weighted_blocks(), dtype=complex)
    rho_e = stack.sum(axis=0)
    signs = ip_sign_matrix(state.symbols, range(1 << n))
    size = 2 * (1 << n) * d
    real = np.zeros((size, size), dtype=complex)
    ideal = np.zeros((size, size), dtype=complex)
    weight = 1.0 / (1 << n)
    for y in range(1 << n):
        tau0 = np.einsum("x,xij->ij", 0.5 * (1 + signs[y]), stack)
        for bit, tau in ((0, tau0), (1, rho_e - tau0)):
            i = (bit * (1 << n) + y) * d
            real[i:i + d, i:i + d] = weight * tau
            ideal[i:i + d, i:i + d] = weight * 0.5 * rho_e
    return real, ideal


def ip_extractor_test(
    state: CqState,
    eps_ext: float,
    family: Optional[AdversaryFamily] = None,
    trials: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
) -> IpExtractorReport:
    """Distance d(ρ_{IP(X,Y)YE}, U₁ ⊗ ρ_{YE}) against the IP extractor guarantee.

    Seeds are averaged exhaustively unless ``trials`` asks for a sampled
    estimate. The bound is only asserted when H_min(X|E) reaches
    1 − 2 log₂ ε_ext.
    """
    n = state.alphabet_bits
    if n > LIMITS.IP_MAX_SOURCE_BITS:
        raise SizeCapError("IP source bits", n, LIMITS.IP_MAX_SOURCE_BITS)
    if not 0 < eps_ext <= 1:
        raise ValueError(f"eps_ext must be in (0, 1], got {eps_ext}")

    if trials is None:
        seeds = np.arange(1 << n)
        exact = True
    else:
        rng = rng if rng is not None else np.random.default_rng(0)
        seeds = rng.integers(0, 1 << n, size=int(trials))
        exact = False

    with PerformanceLogger(logger, f"ip extractor test (n={n}, seeds={len(seeds)})"):
        signs = ip_sign_matrix(state.symbols, seeds)
        distance = float(np.mean(seeded_bit_distances(state.weighted_blocks(), signs)))

    h_min = guess_weighted(state.weighted_blocks(), state.symbols).certified_min_entropy
    threshold = ip_threshold(eps_ext)
    met = h_min >= threshold - TOLERANCE.INEQUALITY
    if not met:
        verdict = Verdict.HYPOTHESIS_UNMET
    elif distance <= eps_ext + 1e-9:
        verdict = Verdict.PASS
    else:
        verdict = Verdict.VIOLATION
        logger.warning(f"IP extractor distance {distance:.6g} exceeds eps_ext {eps_ext:.6g}")

    interval = None
    if family is not None:
        if 2 * (1 << n) * state.side_dim <= max_dimension():
            real, ideal = _joint_pair(state)
            interval = computational_distance(real, ideal, family)
        else:
            logger.info("Joint IP state exceeds the dimension cap; family distance skipped")

    return IpExtractorReport(n, eps_ext, distance, exact, len(seeds), h_min, threshold, met, verdict, interval)


def ip_bit(x: int, y: int) -> int:
    """IP on integer-encoded strings."""
    return parity(x & y)

