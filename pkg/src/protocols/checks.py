"""Checks run on a finished transcript."""

from dataclasses import dataclass
from typing import Any, Optional

from ..constants import TOLERANCE
from ..utils.helpers import Verdict
from ..utils.logging import get_logger
from .alternating import ProtocolTranscript

logger = get_logger("protocols.checks")

DISTANCE_TOLERANCE = 1e-7


@dataclass(frozen=True)
class MarkovCheck:
    """I(A:B|E_j R_j) at every round boundary, with published seeds in the conditioning."""

    holds: bool
    first_violation: Optional[int]
    values: tuple[float, ...]

    @property
    def verdict(self) -> Verdict:
        return Verdict.PASS if self.holds else Verdict.VIOLATION

    def to_dict(self) -> dict[str, Any]:
        return {
            "holds": self.holds,
            "first_violation": self.first_violation,
            "values": list(self.values),
            "verdict": self.verdict.value,
        }


def check_markov_preservation(transcript: ProtocolTranscript) -> MarkovCheck:
    """Recompute the CMI on every stored state; report the first round that breaks A–E–B."""
    values = tuple(
        state.cmi("A", "B", given=seeds) for state, seeds in zip(transcript.states, transcript.published)
    )
    first = next((j for j, v in enumerate(values) if v > TOLERANCE.MARKOV), None)
    if first is not None:
        logger.warning(f"Markov chain broken after {first} rounds: I(A:B|ER) = {values[first]:.6g}")
    return MarkovCheck(first is None, first, values)


@dataclass(frozen=True)
class ExtractionCheck:
    """Output distance of one round against its guaranteed bound."""

    round: int
    distance: float
    family_lower: Optional[float]
    checked: float
    bound: float
    hypothesis_met: bool
    verdict: Verdict

    def to_dict(self) -> dict[str, Any]:
        return {
            "round": self.round,
            "distance": self.distance,
            "family_lower": self.family_lower,
            "checked": self.checked,
            "bound": self.bound,
            "hypothesis_met": self.hypothesis_met,
            "verdict": self.verdict.value,
        }


def _record(transcript: ProtocolTranscript, i: int):
    if not 0 <= i < len(transcript.rounds):
        raise ValueError(f"round {i} is not in a transcript of {len(transcript.rounds)} rounds")
    return transcript.rounds[i]


def check_extraction_quality(transcript: ProtocolTranscript, i: int) -> ExtractionCheck:
    """Chained seeds: distance ≤ 2(ε_seed + ε′) + ε_ext. Fresh seeds: ε_ext + 2ε′.

    The fresh-seed form is checked on the family lower endpoint when a
    budget was set, otherwise on the trace distance. When the round's
    entropy hypothesis fails the result is reported, never asserted.
    """
    rec = _record(transcript, i)
    eps_ext = transcript.spec.eps_ext
    eps = transcript.config.epsilon
    if transcript.config.variant == "chained":
        bound = 2 * (rec.seed_distance + eps) + eps_ext
        checked = rec.extractor_distance
    else:
        bound = eps_ext + 2 * eps
        checked = rec.family_lower if rec.family_lower is not None else rec.extractor_distance

    if not rec.hypothesis_met:
        verdict = Verdict.HYPOTHESIS_UNMET
    elif checked <= bound + DISTANCE_TOLERANCE:
        verdict = Verdict.PASS
    else:
        verdict = Verdict.VIOLATION
        logger.warning(f"Round {i}: output distance {checked:.6g} exceeds bound {bound:.6g}")
    return ExtractionCheck(i, rec.extractor_distance, rec.family_lower, checked, bound, rec.hypothesis_met, verdict)


@dataclass(frozen=True)
class CumulativeCheck:
    """i(2ε + ε_ext) against the distance measured after round i."""

    rounds: int
    bound: float
    measured: float
    hypotheses_met: bool

    @property
    def within_bound(self) -> bool:
        return self.measured <= self.bound + DISTANCE_TOLERANCE

    @property
    def verdict(self) -> Verdict:
        if not self.hypotheses_met:
            return Verdict.HYPOTHESIS_UNMET
        return Verdict.PASS if self.within_bound else Verdict.VIOLATION

    def to_dict(self) -> dict[str, Any]:
        return {
            "rounds": self.rounds,
            "bound": self.bound,
            "measured": self.measured,
            "within_bound": self.within_bound,
            "hypotheses_met": self.hypotheses_met,
            "verdict": self.verdict.value,
        }


def cumulative_distance_bound(transcript: ProtocolTranscript, i: int) -> CumulativeCheck:
    if not 0 <= i <= len(transcript.rounds):
        raise ValueError(f"cannot bound {i} rounds of a transcript with {len(transcript.rounds)}")
    bound = i * (2 * transcript.config.epsilon + transcript.spec.eps_ext)
    measured = transcript.rounds[i - 1].extractor_distance if i > 0 else 0.0
    met = all(rec.hypothesis_met for rec in transcript.rounds[:i])
    return CumulativeCheck(i, bound, measured, met)


@dataclass(frozen=True)
class EntropyTrackCheck:
    """Measured entropies against the per-round guarantees, and passive-source monotonicity."""

    min_slack: float
    worst_snapshot: int
    passive_drops: tuple[int, ...]

    @property
    def holds(self) -> bool:
        return self.min_slack >= -TOLERANCE.INEQUALITY and not self.passive_drops

    @property
    def verdict(self) -> Verdict:
        return Verdict.PASS if self.holds else Verdict.VIOLATION

    def to_dict(self) -> dict[str, Any]:
        return {
            "min_slack": self.min_slack,
            "worst_snapshot": self.worst_snapshot,
            "passive_drops": list(self.passive_drops),
            "verdict": self.verdict.value,
        }


def check_entropy_track(transcript: ProtocolTranscript) -> EntropyTrackCheck:
    slacks = [snap.slack for snap in transcript.snapshots]
    worst = min(range(len(slacks)), key=slacks.__getitem__)
    drops = tuple(rec.index for rec in transcript.rounds if rec.passive_change < -TOLERANCE.INEQUALITY)
    if drops:
        logger.warning(f"Passive source lost entropy in rounds {list(drops)}")
    return EntropyTrackCheck(slacks[worst], worst, drops)
