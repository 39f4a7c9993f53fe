"""Tests for logging setup and the run tag."""

import logging

import pytest

from src.utils.logging import (
    PerformanceLogger,
    bind_run,
    get_logger,
    parse_level,
    setup_logging,
    unbind_run,
)


@pytest.fixture(autouse=True)
def reset_run_tag():
    yield
    unbind_run()
    logging.getLogger("unplab").handlers.clear()


class TestParseLevel:
    """Level names from the config file."""

    def test_named_levels(self):
        assert parse_level("warning") == logging.WARNING
        assert parse_level("DEBUG") == logging.DEBUG

    def test_debug_flag_wins(self):
        assert parse_level("ERROR", debug=True) == logging.DEBUG

    def test_unknown_name_falls_back_to_info(self):
        assert parse_level("chatty") == logging.INFO


class TestSetupLogging:
    """Handlers and the run tag."""

    def test_lines_carry_run_tag(self, tmp_path):
        setup_logging(log_dir=tmp_path, console=False, file=True)
        bind_run("entropy", "0123456789abcdef")
        get_logger("test").info("tagged")
        unbind_run()
        get_logger("test").info("untagged")
        for handler in logging.getLogger("unplab").handlers:
            handler.flush()

        (log_file,) = tmp_path.glob("unplab_*.log")
        lines = log_file.read_text(encoding="utf-8").splitlines()
        assert "| entropy@01234567 |" in lines[0]
        assert "| - |" in lines[1]

    def test_repeated_setup_replaces_handlers(self):
        setup_logging()
        setup_logging()
        assert len(logging.getLogger("unplab").handlers) == 1


class TestPerformanceLogger:
    """Timed sections."""

    def test_elapsed_recorded(self):
        with PerformanceLogger(get_logger("test"), "noop") as timer:
            pass
        assert timer.elapsed_ms >= 0.0

    def test_exception_propagates(self):
        with pytest.raises(RuntimeError):
            with PerformanceLogger(get_logger("test"), "failing"):
                raise RuntimeError("boom")
