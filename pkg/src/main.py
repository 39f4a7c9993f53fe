"""Entry point for the unplab command."""

import sys
from pathlib import Path
from typing import Optional

from .cli import ConfigError, UsageError, build_parser, load_experiment_config, run_command
from .cli.commands import CommandResult
from .cli.config import ExperimentConfig
from .config.settings import SettingsValidationError, get_settings
from .database import RunRepository
from .protocols.config import ProtocolConfigError
from .qcore.errors import LabError
from .utils.exporter import ReportExporter
from .utils.helpers import get_data_dir
from .utils.logging import bind_run, get_logger, parse_level, setup_logging, unbind_run


EXIT_FAILURE = 1
EXIT_USAGE = 64


def _exception_handler(exc_type, exc_value, exc_tb):
    """Handle uncaught exceptions."""
    logger = get_logger("main")
    if issubclass(exc_type, KeyboardInterrupt):
        sys.__excepthook__(exc_type, exc_value, exc_tb)
        return

    logger.critical(
        "Uncaught exception",
        exc_info=(exc_type, exc_value, exc_tb)
    )


sys.excepthook = _exception_handler


def _emit(result: CommandResult, config: ExperimentConfig, exporter: ReportExporter) -> bool:
    """Write the report to --out, or to stdout when no path was given."""
    if config.fmt == "csv":
        header, rows = result.table()
        if config.output is not None:
            return exporter.write_csv(header, rows, config.output).success
        sys.stdout.write(exporter.render_csv(header, rows))
    else:
        if config.output is not None:
            return exporter.write_json(result.report, config.output).success
        sys.stdout.write(exporter.render_json(result.report))
    sys.stdout.flush()
    return True


def _ledger_path(requested: Optional[Path]) -> Optional[Path]:
    if requested is not None:
        return requested
    settings = get_settings()
    if not settings.get("ledger.enabled", False):
        return None
    configured = settings.get("ledger.db_path", "")
    return Path(configured) if configured else get_data_dir() / "runs.db"


def _record(path: Path, config: ExperimentConfig, exit_code: int, result: Optional[CommandResult]) -> None:
    repo = RunRepository(str(path))
    try:
        summary = {"verdict": result.verdict.value} if result is not None else None
        seed = config.seed if config.seed < (1 << 63) else None
        run_id = repo.record_run(config.subcommand, config.digest, exit_code, seed, config.preset, summary)
        if run_id is not None:
            get_logger("main").info(f"Recorded run {run_id} in {path}")
    finally:
        repo.close()


def main(args: Optional[list[str]] = None) -> int:
    """Main entry point.

    Exit codes: 0 every check passed, 2 some hypothesis was not met,
    1 a violation or a failed computation, 64 a malformed command line or config.
    """
    if args is None:
        args = sys.argv[1:]

    parser = build_parser()
    try:
        ns = parser.parse_args(args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(e, file=sys.stderr)
        return EXIT_USAGE

    settings = get_settings()
    log_level = parse_level(settings.get("logging.level", "INFO"), ns.debug)
    setup_logging(level=log_level, file=bool(settings.get("logging.file", False)))

    logger = get_logger("main")

    try:
        config = load_experiment_config(ns.command, ns.config, ns.preset, ns.seed, ns.out, ns.fmt, ns.tolerance)
    except ConfigError as e:
        logger.error(f"Invalid configuration: {e}")
        parser.print_usage(sys.stderr)
        return EXIT_USAGE

    bind_run(config.subcommand, config.digest)
    logger.debug(f"Running {config.subcommand} (seed {config.seed}, config {config.digest[:12]})")
    result: Optional[CommandResult] = None
    try:
        result = run_command(config)
        exit_code = result.exit_code
        exporter = ReportExporter(csv_digits=int(settings.get("output.csv_digits", 12)))
        if not _emit(result, config, exporter):
            exit_code = EXIT_FAILURE
    except (ConfigError, ProtocolConfigError, SettingsValidationError) as e:
        logger.error(f"Invalid configuration: {e}")
        parser.print_usage(sys.stderr)
        exit_code = EXIT_USAGE
    except LabError as e:
        logger.error(f"{config.subcommand} failed: {e}")
        exit_code = EXIT_FAILURE

    ledger = _ledger_path(ns.ledger)
    if ledger is not None:
        _record(ledger, config, exit_code, result)

    if result is not None:
        logger.info(f"{config.subcommand}: {result.verdict.value} (exit {exit_code})")
    unbind_run()
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
