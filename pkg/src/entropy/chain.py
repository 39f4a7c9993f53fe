"""Leakage chain rule check: H(X|BC) ≥ H(X|B) − 2 log₂ dim C."""

import math
from dataclasses import dataclass
from typing import Any, Optional, Union

import numpy as np

from ..constants import TOLERANCE
from ..metrics.adversary import AdversaryFamily
from ..qcore.errors import DimensionMismatchError, InvalidStateError
from ..qcore.states import CqState, DensityOperator
from ..utils.helpers import int_to_bits
from ..utils.logging import get_logger
from .smoothing import EntropyInterval, EntropyQuery, smooth_min_entropy_lower, unpredictability_interval

logger = get_logger("entropy.chain")


@dataclass(frozen=True)
class ChainRuleReport:
    """Entropies with and without C, the leak size ℓ and the slack of the bound."""

    h_xbc: float
    h_xb: float
    ell: float
    slack: float
    holds: bool
    classical_c: bool
    classical_slack: Optional[float] = None
    epsilon: float = 0.0
    interval_bc: Optional[EntropyInterval] = None
    interval_consistent: Optional[bool] = None

    @property
    def slack_kind(self) -> str:
        """Exact at ε = 0; with ε > 0 both entropies are certified lower endpoints."""
        return "exact" if self.epsilon == 0 else "lower-bound"

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            "h_xbc": self.h_xbc,
            "h_xb": self.h_xb,
            "ell": self.ell,
            "slack": self.slack,
            "slack_kind": self.slack_kind,
            "holds": self.holds,
            "classical_c": self.classical_c,
            "classical_slack": self.classical_slack,
            "epsilon": self.epsilon,
        }
        if self.interval_bc is not None:
            data["interval_bc"] = self.interval_bc.to_dict()
            data["interval_consistent"] = self.interval_consistent
        return data


def cq_from_density(rho: DensityOperator, alphabet_bits: int) -> CqState:
    """Read subsystem 0 of dimension 2^n as a classical register; raises if it is not."""
    dx = 1 << alphabet_bits
    if rho.dims[0] != dx:
        raise DimensionMismatchError(f"first subsystem has dimension {rho.dims[0]}, expected {dx}")
    if len(rho.dims) < 2:
        raise DimensionMismatchError("state has no side information subsystem")
    d = rho.dim // dx
    blocks = rho.matrix.reshape(dx, d, dx, d)
    off = blocks.copy()
    for i in range(dx):
        off[i, :, i, :] = 0
    if np.max(np.abs(off)) > TOLERANCE.PSD:
        raise InvalidStateError("state is not classical on X (off-diagonal X blocks present)")
    weighted = {int_to_bits(i, alphabet_bits): blocks[i, :, i, :] for i in range(dx)}
    return CqState.from_weighted(weighted, alphabet_bits, rho.dims[1:])


def is_classical_subsystem(state: CqState, index: int) -> bool:
    """True when every conditional is block diagonal in the basis of side subsystem index."""
    dims = state.side_dims
    k = len(dims)
    for rho in state.conditionals.values():
        t = rho.matrix.reshape(dims + dims)
        # move the tested subsystem's row and column indices to the front
        t = np.moveaxis(t, [index, k + index], [0, 1]).copy()
        for c in range(dims[index]):
            t[c, c] = 0
        if np.max(np.abs(t)) > TOLERANCE.PSD:
            return False
    return True


def verify_chain_rule(
    state: Union[CqState, DensityOperator],
    c_index: Optional[int] = None,
    epsilon: float = 0.0,
    family: Optional[AdversaryFamily] = None,
    alphabet_bits: Optional[int] = None,
) -> ChainRuleReport:
    """Check the leakage chain rule on a cq state with side information (B, C).

    ``c_index`` picks C among the side subsystems (default: the last one);
    the other side subsystems form B. A dense state is accepted when its
    first subsystem is classical. With ε > 0 the slack is taken between the
    smoothing solver's lower endpoints and is labelled a lower-bound slack.
    """
    if isinstance(state, DensityOperator):
        bits = alphabet_bits if alphabet_bits is not None else int(math.log2(state.dims[0]))
        state = cq_from_density(state, bits)
    elif not isinstance(state, CqState):
        raise InvalidStateError(f"expected a cq state, got {type(state).__name__}")

    k = len(state.side_dims)
    c_index = k - 1 if c_index is None else c_index
    if not 0 <= c_index < k:
        raise DimensionMismatchError(f"C index {c_index} out of range for {k} side subsystems")
    ell = math.log2(state.side_dims[c_index])
    b_keep = [i for i in range(k) if i != c_index]

    if b_keep:
        reduced = state.trace_side(b_keep)
    else:
        # trivial B: keep a one-dimensional register
        trivial = DensityOperator(np.ones((1, 1), dtype=complex), (1,))
        reduced = CqState(dict(state.probs), {x: trivial for x in state.probs}, state.alphabet_bits)

    h_xbc = smooth_min_entropy_lower(EntropyQuery(state, epsilon))
    h_xb = smooth_min_entropy_lower(EntropyQuery(reduced, epsilon))
    slack = h_xbc - h_xb + 2 * ell
    classical = is_classical_subsystem(state, c_index)
    classical_slack = h_xbc - h_xb + ell if classical else None
    holds = slack >= -TOLERANCE.INEQUALITY
    if classical_slack is not None:
        holds = holds and classical_slack >= -TOLERANCE.INEQUALITY

    interval, consistent = None, None
    if family is not None:
        interval = unpredictability_interval(EntropyQuery(state, epsilon), family)
        consistent = interval.upper >= h_xb - 2 * ell - TOLERANCE.INEQUALITY
        holds = holds and consistent

    report = ChainRuleReport(h_xbc, h_xb, ell, slack, holds, classical, classical_slack, epsilon, interval, consistent)
    if not holds:
        logger.warning(
            f"Chain rule violated: H(X|BC)={h_xbc:.6f}, H(X|B)={h_xb:.6f}, l={ell:.3f} ({report.slack_kind} slack)"
        )
    else:
        logger.debug(f"Chain rule {report.slack_kind} slack {slack:.6f} (l={ell:.3f}, classical C={classical})")
    return report
