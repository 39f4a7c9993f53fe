"""Smooth min-entropy lower bounds and unpredictability-entropy intervals.

Smoothing is candidate based: the state itself plus one family of
eigenvalue-capped subnormalized states. The lower endpoint is therefore a
certified lower bound, never the global optimum over the ε-ball.
"""

from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

import numpy as np

from ..metrics.adversary import AdversaryFamily
from ..metrics.distances import block_purified_distance
from ..qcore import linalg as la
from ..qcore.errors import InvalidStateError
from ..qcore.states import CqState
from ..utils.helpers import Bits, safe_log2
from ..utils.logging import get_logger
from .guessing import GuessCertificate, guess_weighted

logger = get_logger("entropy.smoothing")

_BISECTION_STEPS = 60


@dataclass(frozen=True, eq=False)
class EntropyQuery:
    """State, smoothing radius (purified distance) and adversary budget (None = ∞)."""

    state: CqState
    epsilon: float = 0.0
    budget: Optional[int] = None

    def __post_init__(self) -> None:
        if self.epsilon < 0:
            raise InvalidStateError(f"smoothing radius must be >= 0, got {self.epsilon}")
        limit = float(np.sqrt(self.state.total_probability))
        if self.epsilon > 0 and self.epsilon >= limit:
            raise InvalidStateError(f"smoothing radius {self.epsilon} must be below sqrt(tr rho) = {limit:.6f}")


@dataclass(frozen=True)
class EntropyInterval:
    """[lower, upper] in bits with the strategy and candidate behind each endpoint."""

    lower: float
    upper: float
    best_strategy: str = "exact"
    family_complete: bool = True
    cap: Optional[float] = None
    certificate: Optional[GuessCertificate] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.upper < self.lower:
            object.__setattr__(self, "upper", self.lower)

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            "lower": self.lower,
            "upper": self.upper,
            "best_strategy": self.best_strategy,
            "family_complete": self.family_complete,
            "cap": self.cap,
        }
        if self.certificate is not None:
            data["certificate"] = self.certificate.to_dict()
        return data


@dataclass(frozen=True, eq=False)
class SmoothingCandidate:
    """Subnormalized cq blocks inside the ε-ball, with the eigenvalue cap that produced them."""

    blocks: list[np.ndarray]
    cap: Optional[float]
    distance: float


def _capped(decomposed: Sequence[tuple[np.ndarray, np.ndarray]], tau: float) -> list[np.ndarray]:
    return [la.hermitize((vecs * np.minimum(vals, tau)) @ vecs.conj().T) for vals, vecs in decomposed]


def smoothing_candidates(blocks: Sequence[np.ndarray], epsilon: float) -> list[SmoothingCandidate]:
    """The state itself plus the eigenvalue-capped state at the smallest admissible cap."""
    blocks = [np.asarray(b, dtype=complex) for b in blocks]
    candidates = [SmoothingCandidate(blocks, None, 0.0)]
    if epsilon <= 0:
        return candidates
    decomposed = [la.eigh_psd(b) for b in blocks]
    top = max(float(vals[-1]) for vals, _ in decomposed)
    lo, hi = 0.0, top
    for _ in range(_BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        if block_purified_distance(blocks, _capped(decomposed, mid)) <= epsilon:
            hi = mid
        else:
            lo = mid
    if hi < top:
        capped = _capped(decomposed, hi)
        distance = block_purified_distance(blocks, capped)
        candidates.append(SmoothingCandidate(capped, hi, distance))
        logger.debug(f"Smoothing cap {hi:.6g} at purified distance {distance:.6g} (epsilon {epsilon})")
    return candidates


def smooth_lower_blocks(
    blocks: Sequence[np.ndarray],
    symbols: Sequence[Bits],
    epsilon: float,
) -> tuple[float, Optional[float], GuessCertificate]:
    """Best certified H_min over the candidates: (bits, cap, certificate)."""
    best: tuple[float, Optional[float], Optional[GuessCertificate]] = (-np.inf, None, None)
    for cand in smoothing_candidates(blocks, epsilon):
        cert = guess_weighted(cand.blocks, symbols)
        h = cert.certified_min_entropy
        if h > best[0]:
            best = (h, cand.cap, cert)
    return best  # type: ignore[return-value]


def smooth_min_entropy_lower(query: EntropyQuery) -> float:
    """Certified lower bound on H_min^ε(X|E); exact min-entropy at ε = 0."""
    state = query.state
    value, _, _ = smooth_lower_blocks(state.weighted_blocks(), state.symbols, query.epsilon)
    return value


def unpredictability_interval(query: EntropyQuery, family: AdversaryFamily) -> EntropyInterval:
    """Bracket H_unp^ε_s(X|E) between smooth min-entropy and the family's best guess.

    The upper endpoint holds only if the family contains every size-s
    guessing circuit; ``family_complete`` records whether that is the case.
    """
    state = query.state
    family = family.restrict(query.budget)
    symbols = state.symbols
    candidates = smoothing_candidates(state.weighted_blocks(), query.epsilon)

    lower, cap, certificate = -np.inf, None, None
    upper, best_name = -np.inf, "always-0"
    for cand in candidates:
        cert = guess_weighted(cand.blocks, symbols)
        if cert.certified_min_entropy > lower:
            lower, cap, certificate = cert.certified_min_entropy, cand.cap, cert
        if family.unbounded:
            guess, name = cert.value, "helstrom"
        else:
            guess, name = family.best_guess(cand.blocks, symbols)
        h = -safe_log2(guess)
        if h > upper:
            upper, best_name = h, name

    if upper < lower - 1e-7:
        logger.warning(f"Family upper bound {upper:.6f} fell below certified lower bound {lower:.6f}")
    logger.debug(
        f"H_unp interval [{lower:.6f}, {upper:.6f}] with {len(family)} strategies (epsilon {query.epsilon})"
    )
    return EntropyInterval(lower, max(upper, lower), best_name, family.unbounded, cap, certificate)
