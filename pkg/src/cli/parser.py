"""Argument parsing for the unplab command."""

import argparse
from pathlib import Path

from .config import FORMATS, PRESETS, SUBCOMMANDS


class UsageError(Exception):
    """Command line could not be parsed."""
    pass


class LabArgumentParser(argparse.ArgumentParser):
    """Raises instead of exiting so main() can map usage errors to exit code 64."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(f"{self.prog}: error: {message}")


_HELP = {
    "entropy": "min-entropy, unpredictability interval and CMI of a cq state",
    "extract": "IP or composed extractor test on seeded sources",
    "design": "build and verify a weak design",
    "reconstruct": "reconstruction success over an (n, epsilon, x) grid",
    "chain": "chain-rule and leakage degradation scenarios",
    "ocl-sim": "alternating extraction under per-round leakage",
}


def _common_flags() -> argparse.ArgumentParser:
    flags = LabArgumentParser(add_help=False)
    flags.add_argument("--config", type=Path, metavar="PATH", help="JSON or YAML experiment config")
    flags.add_argument("--preset", metavar="NAME", choices=sorted(PRESETS), help="built-in experiment config")
    flags.add_argument("--seed", type=int, metavar="N", help="64-bit RNG seed (default 0)")
    flags.add_argument("--out", type=Path, metavar="PATH", help="report file (default stdout)")
    flags.add_argument("--format", choices=FORMATS, dest="fmt", help="report format (default json)")
    flags.add_argument("--tolerance", type=float, metavar="F", help="inequality tolerance for verdicts")
    flags.add_argument("--ledger", type=Path, metavar="PATH", help="record the run in this SQLite ledger")
    flags.add_argument("--debug", action="store_true", help="debug logging")
    return flags


def build_parser() -> LabArgumentParser:
    parser = LabArgumentParser(
        prog="unplab",
        description="Exact small-instance checks of min-entropy, extractors and leakage bounds.",
    )
    common = _common_flags()
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)
    for name in SUBCOMMANDS:
        sub.add_parser(name, parents=[common], help=_HELP[name], description=_HELP[name])
    return parser
