"""Unpredictability Lab - exact checks of quantum min-entropy, extractors and leakage bounds."""

__version__ = "0.1.0"
