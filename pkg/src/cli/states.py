"""Decode the state descriptions accepted in experiment configs."""

from pathlib import Path
from typing import Any, Mapping

import numpy as np

from ..leakage.channels import cnot_copy_state, superdense_state
from ..qcore.errors import LabError
from ..qcore.serialization import cq_from_dict
from ..qcore.states import CqState, basis_state, maximally_mixed, random_cq_state
from .config import ConfigError, read_config_file

STATE_KINDS = ("helstrom", "superdense", "cnot-copy", "random", "explicit", "file")


def helstrom_state() -> CqState:
    """Uniform bit with E = ω₂ for x = 0 and |0⟩⟨0| for x = 1."""
    return CqState({(0,): 0.5, (1,): 0.5}, {(0,): maximally_mixed(2), (1,): basis_state(0, 2)}, 1)


def _random_state(spec: Mapping[str, Any], rng: np.random.Generator) -> CqState:
    n = int(spec.get("n", 1))
    side_dims = tuple(int(d) for d in spec.get("side_dims", [2]))
    probs = np.full(1 << n, 1.0 / (1 << n)) if spec.get("uniform") else None
    rank = spec.get("rank")
    return random_cq_state(n, side_dims, rng, probs=probs, rank=None if rank is None else int(rank))


def build_state(spec: Any, rng: np.random.Generator) -> CqState:
    """CqState from a config entry.

    Accepts a kind name, ``{"kind": ..., ...}``, an explicit encoding with
    ``probs`` and ``conditionals``, or ``{"path": FILE}`` holding one.
    """
    if isinstance(spec, str):
        spec = {"kind": spec}
    if not isinstance(spec, Mapping):
        raise ConfigError(f"state must be a name or a mapping, got {type(spec).__name__}")
    kind = spec.get("kind")
    if kind is None:
        kind = "file" if "path" in spec else "explicit"

    try:
        if kind == "helstrom":
            return helstrom_state()
        if kind == "superdense":
            return superdense_state()
        if kind == "cnot-copy":
            return cnot_copy_state(int(spec.get("k", 6)))
        if kind == "random":
            return _random_state(spec, rng)
        if kind == "explicit":
            return cq_from_dict(dict(spec))
        if kind == "file":
            return cq_from_dict(read_config_file(Path(spec["path"])))
    except ConfigError:
        raise
    except (LabError, KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"cannot build '{kind}' state: {e}") from e
    raise ConfigError(f"state kind must be one of {STATE_KINDS}, got '{kind}'")
