"""Seeded extractors, weak designs and the reductions behind them."""

from .inner_product import ip, ip_threshold, ip_extractor_test, IpExtractorReport
from .design import (
    WeakDesign,
    DesignCheck,
    DesignConstructionError,
    build_weak_design,
    verify_weak_design,
    cyclic_design,
    raz_seed_length,
)
from .composition import (
    ExtractorSpec,
    ext_compose,
    composed_extractor_test,
    ComposedExtractorReport,
    output_table,
    seed_union,
    iter_seeded_outputs,
    seeded_output_distance,
)
from .reductions import Predictor, HybridResult, distinguish_equals_predict, hybrid_locate_bit

__all__ = [
    "ip",
    "ip_threshold",
    "ip_extractor_test",
    "IpExtractorReport",
    "WeakDesign",
    "DesignCheck",
    "DesignConstructionError",
    "build_weak_design",
    "verify_weak_design",
    "cyclic_design",
    "raz_seed_length",
    "ExtractorSpec",
    "ext_compose",
    "composed_extractor_test",
    "ComposedExtractorReport",
    "output_table",
    "seed_union",
    "iter_seeded_outputs",
    "seeded_output_distance",
    "Predictor",
    "HybridResult",
    "distinguish_equals_predict",
    "hybrid_locate_bit",
]
