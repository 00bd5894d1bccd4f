import numpy as np
import pytest

import core.dependencies
from core.config import InitialConfig
from core.dependencies import get_settings
from fields.grid import Grid


@pytest.fixture
def grid() -> Grid:
    """Coarse half-plane grid, fast enough for per-test operator solves."""
    return Grid(2.0 * np.pi, 32, 4.0, 65)


@pytest.fixture
def fine_grid() -> Grid:
    return Grid(2.0 * np.pi, 64, 4.0, 129)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def pair_config() -> InitialConfig:
    return InitialConfig(preset="vortex_pair", height=1.5, width=0.75)


@pytest.fixture
def isolated_settings(monkeypatch, tmp_path):
    """Points the process settings at a temporary output directory."""
    monkeypatch.setenv("VHP_OUTPUT_DIR", str(tmp_path / "runs"))
    monkeypatch.setenv("VHP_EXECUTION_BACKEND", "serial")
    get_settings.cache_clear()
    monkeypatch.setattr(core.dependencies, "_kernel_cache", None)
    yield get_settings()
    get_settings.cache_clear()
