"""Alternating extraction under quantum leakage, run on exact classical-register ensembles."""

from .ensemble import ClassicalRegisterEnsemble, product_ensemble, uniform_distribution
from .config import ProtocolConfig, ProtocolConfigError, build_psi, build_leak_branches
from .alternating import (
    Snapshot,
    RoundRecord,
    ProtocolTranscript,
    CSV_HEADER,
    entropy_bound,
    run_alternating,
)
from .checks import (
    MarkovCheck,
    ExtractionCheck,
    CumulativeCheck,
    EntropyTrackCheck,
    check_markov_preservation,
    check_extraction_quality,
    cumulative_distance_bound,
    check_entropy_track,
)
from .presets import (
    PRESETS,
    independent_sources,
    random_product_sources,
    shared_copy_sources,
    config_from_dict,
    preset_config,
)

__all__ = [
    "ClassicalRegisterEnsemble",
    "product_ensemble",
    "uniform_distribution",
    "ProtocolConfig",
    "ProtocolConfigError",
    "build_psi",
    "build_leak_branches",
    "Snapshot",
    "RoundRecord",
    "ProtocolTranscript",
    "CSV_HEADER",
    "entropy_bound",
    "run_alternating",
    "MarkovCheck",
    "ExtractionCheck",
    "CumulativeCheck",
    "EntropyTrackCheck",
    "check_markov_preservation",
    "check_extraction_quality",
    "cumulative_distance_bound",
    "check_entropy_track",
    "PRESETS",
    "independent_sources",
    "random_product_sources",
    "shared_copy_sources",
    "config_from_dict",
    "preset_config",
]
