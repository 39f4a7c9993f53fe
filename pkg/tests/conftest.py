"""Pytest configuration and fixtures for the unpredictability lab tests."""

import pytest
import sys
from pathlib import Path

import numpy as np

# Add src to path for imports
src_path = Path(__file__).parent.parent
sys.path.insert(0, str(src_path))

from src.config import settings as settings_module  # noqa: E402


@pytest.fixture(autouse=True)
def isolated_home(tmp_path, monkeypatch):
    """Keep settings files, ledgers and logs out of the real home directory."""
    home = tmp_path / "home"
    home.mkdir()
    monkeypatch.setenv("HOME", str(home))
    monkeypatch.setenv("LOCALAPPDATA", str(home))
    monkeypatch.delenv("UNPLAB_MAX_DIM", raising=False)
    monkeypatch.setattr(settings_module, "_settings", None)
    yield home


@pytest.fixture
def rng():
    """Seeded generator; every test gets a fresh one."""
    return np.random.default_rng(20240607)


@pytest.fixture
def qubit_pair():
    """ω₂ and |0⟩⟨0|, the pair behind the Helstrom example."""
    from src.qcore.states import basis_state, maximally_mixed

    return maximally_mixed(2), basis_state(0, 2)
