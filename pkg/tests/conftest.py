from __future__ import annotations

import pytest

from config import Config
from model import ModelParams


@pytest.fixture(autouse=True)
def sequential_config(tmp_path, monkeypatch):
    """Every test runs single-threaded with results under its own tmp dir."""
    for name in ("JUNCTION_THREADS", "JUNCTION_OUTPUT", "JUNCTION_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)
    config = Config.init(threads=1, output_root=str(tmp_path / "results"), log_level="WARNING", env_file=None)
    yield config
    Config.reset()


@pytest.fixture
def oscillatory() -> ModelParams:
    return ModelParams(V=0.5, gamma=0.2, S=10)


@pytest.fixture
def attractor() -> ModelParams:
    return ModelParams(V=1.7, gamma=0.2, S=10)


@pytest.fixture
def chaotic() -> ModelParams:
    return ModelParams(V=1.7, gamma=0.2, omega_z=0.5, S=10)
