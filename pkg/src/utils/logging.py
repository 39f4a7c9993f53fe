"""Logging configuration for the unpredictability lab.

Every line carries a run tag (subcommand and config digest prefix) once
a run is bound, so interleaved sweeps in one log file stay separable.
"""

import logging
import sys
import time
from datetime import datetime
from pathlib import Path
from typing import Optional


ROOT_LOGGER = "unplab"
NO_RUN = "-"


class RunContextFilter(logging.Filter):
    """Stamps ``record.run`` with the tag of the run in progress."""

    def __init__(self) -> None:
        super().__init__()
        self.tag = NO_RUN

    def filter(self, record: logging.LogRecord) -> bool:
        record.run = self.tag
        return True


_run_filter = RunContextFilter()


def bind_run(subcommand: str, digest: str) -> None:
    """Tag subsequent log lines with ``subcommand@digest[:8]``."""
    _run_filter.tag = f"{subcommand}@{digest[:8]}"


def unbind_run() -> None:
    _run_filter.tag = NO_RUN


def parse_level(name: str, debug: bool = False) -> int:
    """Logging level for a configured name; ``--debug`` wins."""
    if debug:
        return logging.DEBUG
    level = logging.getLevelName(str(name).upper())
    return level if isinstance(level, int) else logging.INFO


def setup_logging(
    log_dir: Path | None = None,
    level: int = logging.INFO,
    console: bool = True,
    file: bool = False,
) -> logging.Logger:
    """Set up lab logging.

    Args:
        log_dir: Directory for log files. If None, uses <data dir>/logs.
        level: Logging level (default: INFO)
        console: Whether to log to stderr
        file: Whether to also append to a dated log file

    Returns:
        Root lab logger
    """
    logger = logging.getLogger(ROOT_LOGGER)
    logger.setLevel(level)
    logger.handlers.clear()

    formatter = logging.Formatter(
        fmt="%(asctime)s | %(levelname)-8s | %(run)s | %(name)s | %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )

    # stdout belongs to reports
    if console:
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(level)
        console_handler.setFormatter(formatter)
        console_handler.addFilter(_run_filter)
        logger.addHandler(console_handler)

    if file:
        if log_dir is None:
            # Import here to avoid circular imports
            from ..config.settings import get_settings

            log_dir = get_settings().data_dir / "logs"

        log_dir.mkdir(parents=True, exist_ok=True)
        log_file = log_dir / f"unplab_{datetime.now().strftime('%Y%m%d')}.log"
        file_handler = logging.FileHandler(log_file, encoding="utf-8")
        file_handler.setLevel(level)
        file_handler.setFormatter(formatter)
        file_handler.addFilter(_run_filter)
        logger.addHandler(file_handler)

    return logger


def get_logger(name: str) -> logging.Logger:
    """Logger for a lab module, e.g. ``get_logger("entropy.guessing")``."""
    return logging.getLogger(f"{ROOT_LOGGER}.{name}")


class PerformanceLogger:
    """Times a block and logs its duration.

    Worker threads of a sweep each open their own instance; ``elapsed_ms``
    stays readable after the block for callers that aggregate timings.
    """

    def __init__(self, logger: logging.Logger, operation: str, level: int = logging.DEBUG):
        self.logger = logger
        self.operation = operation
        self.level = level
        self.start_time: Optional[float] = None
        self.elapsed_ms: float = 0.0

    def __enter__(self) -> "PerformanceLogger":
        self.start_time = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb) -> None:
        if self.start_time is None:
            return
        self.elapsed_ms = (time.perf_counter() - self.start_time) * 1000
        if exc_type is not None:
            self.logger.log(self.level, f"{self.operation} aborted after {self.elapsed_ms:.2f}ms")
        else:
            self.logger.log(self.level, f"{self.operation} completed in {self.elapsed_ms:.2f}ms")
