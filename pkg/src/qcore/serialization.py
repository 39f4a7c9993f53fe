"""JSON-compatible encodings of states, cq states, channels and POVMs.

Matrices are stored as separate real and imaginary nested lists; Python's
float repr round-trips doubles exactly, so decode(encode(x)) is bit-faithful.
"""

from typing import Any

import numpy as np

from ..utils.helpers import Bits
from .channels import KrausChannel, Povm
from .errors import InvalidStateError
from .states import CqState, DensityOperator


def matrix_to_dict(matrix: np.ndarray) -> dict[str, Any]:
    matrix = np.asarray(matrix, dtype=complex)
    return {"re": matrix.real.tolist(), "im": matrix.imag.tolist()}


def matrix_from_dict(data: dict[str, Any]) -> np.ndarray:
    try:
        re = np.array(data["re"], dtype=float)
        im = np.array(data.get("im", np.zeros_like(re)), dtype=float)
    except (KeyError, TypeError, ValueError) as e:
        raise InvalidStateError(f"malformed matrix encoding: {e}") from e
    if re.shape != im.shape:
        raise InvalidStateError(f"re/im shapes differ: {re.shape} vs {im.shape}")
    return re + 1j * im


def bits_key(bits: Bits) -> str:
    return "".join(str(b) for b in bits)


def parse_bits_key(key: str) -> Bits:
    if any(c not in "01" for c in key):
        raise InvalidStateError(f"symbol key {key!r} is not a bit string")
    return tuple(int(c) for c in key)


def state_to_dict(rho: DensityOperator) -> dict[str, Any]:
    return {"dims": list(rho.dims), **matrix_to_dict(rho.matrix)}


def state_from_dict(data: dict[str, Any]) -> DensityOperator:
    matrix = matrix_from_dict(data)
    dims = data.get("dims", [matrix.shape[0]])
    return DensityOperator.from_matrix(matrix, dims)


def cq_to_dict(state: CqState) -> dict[str, Any]:
    return {
        "probs": {bits_key(x): p for x, p in state.probs.items()},
        "conditionals": {bits_key(x): state_to_dict(rho) for x, rho in state.conditionals.items()},
    }


def cq_from_dict(data: dict[str, Any]) -> CqState:
    try:
        probs = {parse_bits_key(k): float(v) for k, v in data["probs"].items()}
        conds = {parse_bits_key(k): state_from_dict(v) for k, v in data["conditionals"].items()}
    except (KeyError, AttributeError) as e:
        raise InvalidStateError(f"malformed cq state encoding: {e}") from e
    lengths = {len(x) for x in probs}
    if len(lengths) != 1:
        raise InvalidStateError(f"symbols have differing lengths {sorted(lengths)}")
    return CqState(probs, conds, lengths.pop())


def channel_to_dict(channel: KrausChannel) -> dict[str, Any]:
    return {
        "name": channel.name,
        "in_dims": list(channel.in_dims),
        "out_dims": list(channel.out_dims),
        "kraus": [matrix_to_dict(k) for k in channel.kraus_ops],
    }


def channel_from_dict(data: dict[str, Any]) -> KrausChannel:
    try:
        ops = tuple(matrix_from_dict(k) for k in data["kraus"])
        return KrausChannel(ops, tuple(data["in_dims"]), tuple(data["out_dims"]), data.get("name", "channel"))
    except KeyError as e:
        raise InvalidStateError(f"malformed channel encoding: missing {e}") from e


def povm_to_dict(povm: Povm) -> dict[str, Any]:
    def label(outcome: Any) -> str:
        return bits_key(outcome) if isinstance(outcome, tuple) else str(outcome)

    return {"elements": {label(x): matrix_to_dict(e) for x, e in povm.elements.items()}}
