"""Entropy lost to one leakage channel, against the 2λ chain-rule bound."""

import math
from dataclasses import dataclass
from typing import Any, Optional

from ..constants import TOLERANCE
from ..entropy.chain import is_classical_subsystem
from ..entropy.smoothing import EntropyInterval, EntropyQuery, smooth_min_entropy_lower, unpredictability_interval
from ..metrics.adversary import AdversaryFamily, named_family
from ..qcore.states import CqState
from ..utils.helpers import Verdict
from ..utils.logging import get_logger
from .channels import LeakageChannel, ValidationReport, apply_leakage_cq, validate_leakage_channel

logger = get_logger("leakage.degradation")


def shifted_budget(budget: Optional[int], lam: float, psi_gate_cost: Optional[int]) -> Optional[int]:
    """2s + 2λ + 5 + t; None when either s or t is unbounded."""
    if budget is None or psi_gate_cost is None:
        return None
    return 2 * budget + math.ceil(2 * lam) + 5 + psi_gate_cost


@dataclass(frozen=True)
class DegradationReport:
    """H_min before ψ, after ψ and after Λ, with slack = H_after − (H_before − 2λ)."""

    h_before: float
    h_mid: float
    h_after: float
    lam: float
    slack: float
    data_processing_ok: bool
    classical_leak: bool
    classical_slack: Optional[float]
    epsilon: float
    validation: ValidationReport
    budget: Optional[int] = None
    shifted_budget: Optional[int] = None
    interval_before: Optional[EntropyInterval] = None
    interval_after: Optional[EntropyInterval] = None
    interval_consistent: Optional[bool] = None

    @property
    def holds(self) -> bool:
        ok = self.slack >= -TOLERANCE.INEQUALITY and self.data_processing_ok
        return ok and self.interval_consistent is not False

    @property
    def verdict(self) -> Verdict:
        return Verdict.PASS if self.holds else Verdict.VIOLATION

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            "h_before": self.h_before,
            "h_mid": self.h_mid,
            "h_after": self.h_after,
            "lambda": self.lam,
            "slack": self.slack,
            "data_processing_ok": self.data_processing_ok,
            "classical_leak": self.classical_leak,
            "classical_slack": self.classical_slack,
            "epsilon": self.epsilon,
            "validation": self.validation.to_dict(),
            "verdict": self.verdict.value,
        }
        if self.interval_after is not None:
            data["budget"] = self.budget
            data["shifted_budget"] = self.shifted_budget
            data["interval_before"] = self.interval_before.to_dict() if self.interval_before else None
            data["interval_after"] = self.interval_after.to_dict()
            data["interval_consistent"] = self.interval_consistent
        return data


def measure_chain_degradation(
    state: CqState,
    chan: LeakageChannel,
    epsilon: float = 0.0,
    budget: Optional[int] = None,
    family_before: Optional[AdversaryFamily] = None,
    family_after: Optional[AdversaryFamily] = None,
) -> DegradationReport:
    """Run φ = Λ ∘ ψ on a cq state and compare the entropy drop with 2λ.

    With a finite budget s the interval form is also reported: the family
    bracket after leakage at s against the bracket before leakage at
    2s + 2λ + 5 + t. Leakage widens the side register, so each side takes
    its own family; a missing one defaults to the named library at that
    side's dimension.
    """
    validation = validate_leakage_channel(chan, state)
    validation.raise_if_invalid()

    mid = state.map_side_information(chan.pre_process)
    after = apply_leakage_cq(chan, state, validate=False)
    if family_before is not None:
        family_before.check_side_dim(state.side_dim)
    if family_after is not None:
        family_after.check_side_dim(after.side_dim)
    h_before = smooth_min_entropy_lower(EntropyQuery(state, epsilon))
    h_mid = smooth_min_entropy_lower(EntropyQuery(mid, epsilon))
    h_after = smooth_min_entropy_lower(EntropyQuery(after, epsilon))
    lam = chan.leaked_bits

    slack = h_after - (h_before - 2 * lam)
    dp_ok = h_mid >= h_before - TOLERANCE.INEQUALITY
    classical = is_classical_subsystem(after, 0)
    classical_slack = h_after - (h_before - lam) if classical else None

    shifted, before_iv, after_iv, consistent = None, None, None, None
    if budget is not None:
        shifted = shifted_budget(budget, lam, chan.psi_gate_cost)
        fam_before = family_before if family_before is not None else named_family(state.side_dim)
        fam_after = family_after if family_after is not None else named_family(after.side_dim)
        before_iv = unpredictability_interval(EntropyQuery(state, epsilon, shifted), fam_before)
        after_iv = unpredictability_interval(EntropyQuery(after, epsilon, budget), fam_after)
        consistent = after_iv.upper >= before_iv.lower - 2 * lam - TOLERANCE.INEQUALITY

    report = DegradationReport(
        h_before, h_mid, h_after, lam, slack, dp_ok, classical, classical_slack, epsilon, validation,
        budget, shifted, before_iv, after_iv, consistent,
    )
    if report.holds:
        logger.info(f"Leakage '{chan.name}': H {h_before:.6f} -> {h_after:.6f}, lambda={lam:g}, slack {slack:.6f}")
    else:
        logger.warning(
            f"Leakage '{chan.name}' degraded beyond the bound: H {h_before:.6f} -> {h_after:.6f}, lambda={lam:g}"
        )
    return report
