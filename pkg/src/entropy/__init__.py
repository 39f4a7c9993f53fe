"""Guessing probability, min-entropy, smoothing and von Neumann quantities."""

from .guessing import GuessCertificate, guess_weighted, guessing_probability, min_entropy
from .smoothing import (
    EntropyQuery,
    EntropyInterval,
    smooth_min_entropy_lower,
    unpredictability_interval,
)
from .vonneumann import von_neumann_entropy, conditional_entropy, cmi, shannon_entropy
from .extension import extend_state
from .chain import ChainRuleReport, verify_chain_rule

__all__ = [
    "GuessCertificate",
    "guess_weighted",
    "guessing_probability",
    "min_entropy",
    "EntropyQuery",
    "EntropyInterval",
    "smooth_min_entropy_lower",
    "unpredictability_interval",
    "von_neumann_entropy",
    "conditional_entropy",
    "cmi",
    "shannon_entropy",
    "extend_state",
    "ChainRuleReport",
    "verify_chain_rule",
]
