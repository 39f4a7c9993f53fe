"""Experiment configuration: presets, config files and seeded overrides."""

import copy
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import yaml

from ..constants import TOLERANCE
from ..protocols.presets import PRESETS as PROTOCOL_PRESETS
from ..qcore.errors import LabError
from ..utils.helpers import config_digest


SUBCOMMANDS = ("entropy", "extract", "design", "reconstruct", "chain", "ocl-sim")
FORMATS = ("json", "csv")


class ConfigError(LabError):
    """Experiment configuration is malformed or inconsistent."""
    pass


# name -> (subcommand, parameters)
PRESETS: dict[str, tuple[str, dict[str, Any]]] = {
    "helstrom": ("entropy", {"state": {"kind": "helstrom"}, "epsilon": 0.0}),
    "superdense": ("chain", {"scenario": "superdense"}),
    "classical-leak": ("chain", {"scenario": "classical-leak"}),
    "cnot-attack": ("chain", {"scenario": "cnot-attack", "k": 6}),
    "chain-sweep": ("chain", {"scenario": "random", "count": 100, "n": 1, "b_dim": 2, "c_dim": 2}),
    "raz-design": ("design", {"t": 4, "m": 8}),
    "ip-sources": (
        "extract",
        {
            "extractor": "ip",
            "eps_ext": 0.25,
            "count": 50,
            "state": {"kind": "random", "n": 6, "side_dims": [2], "uniform": True},
        },
    ),
    "reconstruct-exact": ("reconstruct", {"ns": [2, 3, 4, 5, 6], "epsilons": [0.5]}),
    "reconstruct-biased": ("reconstruct", {"ns": [3, 4, 5], "epsilons": [0.1, 0.2, 0.3, 0.4]}),
}
for _name in PROTOCOL_PRESETS:
    PRESETS[_name] = ("ocl-sim", {"preset": _name})


@dataclass
class ExperimentConfig:
    """One CLI invocation: subcommand parameters plus seed, output and tolerance."""

    subcommand: str
    params: dict[str, Any] = field(default_factory=dict)
    seed: int = 0
    output: Optional[Path] = None
    fmt: str = "json"
    tolerance: float = TOLERANCE.INEQUALITY
    preset: Optional[str] = None

    def __post_init__(self) -> None:
        if self.subcommand not in SUBCOMMANDS:
            raise ConfigError(f"unknown subcommand '{self.subcommand}'")
        if self.fmt not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}, got '{self.fmt}'")
        if not self.tolerance > 0:
            raise ConfigError(f"tolerance must be > 0, got {self.tolerance}")
        if not 0 <= self.seed < (1 << 64):
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    def to_dict(self) -> dict[str, Any]:
        """Everything that determines the report bytes; the output path is excluded."""
        return {
            "subcommand": self.subcommand,
            "params": self.params,
            "seed": self.seed,
            "format": self.fmt,
            "tolerance": self.tolerance,
        }

    @property
    def digest(self) -> str:
        return config_digest(self.to_dict())


def read_config_file(path: Path) -> dict[str, Any]:
    """Parse a JSON or YAML mapping."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"config file {path} is not valid JSON/YAML: {e}") from e
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must contain a mapping, got {type(data).__name__}")
    return data


def load_experiment_config(
    subcommand: str,
    config_path: Optional[Path] = None,
    preset: Optional[str] = None,
    seed: Optional[int] = None,
    output: Optional[Path] = None,
    fmt: Optional[str] = None,
    tolerance: Optional[float] = None,
) -> ExperimentConfig:
    """Merge preset, config file and command-line flags, later sources winning.

    The config file may carry ``seed``, ``format`` and ``tolerance`` keys
    next to the subcommand parameters.
    """
    params: dict[str, Any] = {}
    file_data = read_config_file(config_path) if config_path is not None else {}

    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset '{preset}', choose from {sorted(PRESETS)}")
        target, preset_params = PRESETS[preset]
        if target != subcommand:
            raise ConfigError(f"preset '{preset}' belongs to '{target}', not '{subcommand}'")
        params = copy.deepcopy(preset_params)

    file_seed = file_data.pop("seed", None)
    file_fmt = file_data.pop("format", None)
    file_tol = file_data.pop("tolerance", None)
    params.update(file_data)

    try:
        return ExperimentConfig(
            subcommand=subcommand,
            params=params,
            seed=int(seed if seed is not None else (file_seed if file_seed is not None else 0)),
            output=output,
            fmt=str(fmt or file_fmt or "json"),
            tolerance=float(tolerance if tolerance is not None else (file_tol or TOLERANCE.INEQUALITY)),
            preset=preset,
        )
    except (TypeError, ValueError) as e:
        raise ConfigError(f"invalid experiment configuration: {e}") from e
