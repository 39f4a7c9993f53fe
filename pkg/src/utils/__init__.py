"""Utility functions and helpers."""

from .logging import setup_logging, get_logger, parse_level, bind_run, unbind_run, PerformanceLogger
from .helpers import int_to_bits, bits_to_int, make_rng, config_digest, get_data_dir, Verdict
from .exporter import ReportExporter, ExportResult, to_jsonable, flatten_report

__all__ = [
    "setup_logging",
    "get_logger",
    "parse_level",
    "bind_run",
    "unbind_run",
    "PerformanceLogger",
    "int_to_bits",
    "bits_to_int",
    "make_rng",
    "config_digest",
    "get_data_dir",
    "Verdict",
    "ReportExporter",
    "ExportResult",
    "to_jsonable",
    "flatten_report",
]
