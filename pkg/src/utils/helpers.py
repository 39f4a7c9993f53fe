"""Common helper functions for the unpredictability lab."""

import hashlib
import json
import math
import os
from enum import Enum
from pathlib import Path
from typing import Any, Sequence

import numpy as np


Bits = tuple[int, ...]


def int_to_bits(value: int, n: int) -> Bits:
    """Convert an integer to an n-bit tuple, most significant bit first.

    Args:
        value: Non-negative integer below 2**n
        n: Number of bits

    Returns:
        Tuple of 0/1 entries (e.g., int_to_bits(6, 4) == (0, 1, 1, 0))
    """
    if value < 0 or value >= (1 << n):
        raise ValueError(f"value {value} does not fit in {n} bits")
    return tuple((value >> (n - 1 - i)) & 1 for i in range(n))


def bits_to_int(bits: Sequence[int]) -> int:
    """Convert a bit sequence (most significant first) to an integer."""
    value = 0
    for b in bits:
        if b not in (0, 1):
            raise ValueError(f"not a bit: {b!r}")
        value = (value << 1) | b
    return value


def bit_length_for(size: int) -> int:
    """Smallest n with 2**n >= size (0 for size 1)."""
    if size < 1:
        raise ValueError("size must be >= 1")
    return max(0, math.ceil(math.log2(size)))


def safe_log2(p: float) -> float:
    """log2 that maps non-positive inputs to -inf."""
    return math.log2(p) if p > 0 else float("-inf")


def make_rng(seed: int | None) -> np.random.Generator:
    """Create the lab's seeded random generator.

    Args:
        seed: 64-bit seed, or None for OS entropy

    Returns:
        numpy Generator (PCG64)
    """
    if seed is not None:
        seed = int(seed) & ((1 << 64) - 1)
    return np.random.default_rng(seed)


def config_digest(config: dict[str, Any]) -> str:
    """Stable sha256 digest of a JSON-compatible configuration."""
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def get_data_dir() -> Path:
    """Get the lab data directory.

    Returns:
        Path to data directory
    """
    if os.name == "nt":
        base = Path(os.environ.get("LOCALAPPDATA", Path.home() / "AppData" / "Local"))
    else:
        base = Path.home() / ".config"

    data_dir = base / "unplab"
    data_dir.mkdir(parents=True, exist_ok=True)
    return data_dir


class Verdict(str, Enum):
    """Outcome of a contract check; the value is what reports print."""

    PASS = "pass"
    HYPOTHESIS_UNMET = "hypothesis unmet"
    VIOLATION = "violation"

    @property
    def exit_code(self) -> int:
        return {"pass": 0, "hypothesis unmet": 2, "violation": 1}[self.value]

    @classmethod
    def worst(cls, verdicts: Sequence["Verdict"]) -> "Verdict":
        """Violation beats hypothesis-unmet beats pass."""
        verdicts = list(verdicts)
        for v in (cls.VIOLATION, cls.HYPOTHESIS_UNMET):
            if v in verdicts:
                return v
        return cls.PASS
