"""Batch experiment front end."""

from .config import ConfigError, ExperimentConfig, PRESETS, load_experiment_config
from .commands import COMMANDS, CommandResult, run_command
from .parser import LabArgumentParser, UsageError, build_parser

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "PRESETS",
    "load_experiment_config",
    "COMMANDS",
    "CommandResult",
    "run_command",
    "LabArgumentParser",
    "UsageError",
    "build_parser",
]
