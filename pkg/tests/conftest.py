"""Pytest configuration and fixtures."""

import json
import os
from collections.abc import Iterator
from pathlib import Path
from typing import Any

import numpy as np
import pytest

from mimo_antsel.channel import gen_iid_rayleigh, normalize
from mimo_antsel.config import Settings, get_settings
from mimo_antsel.models import ChannelTensor


@pytest.fixture(autouse=True)
def isolated_env(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> Iterator[None]:
    """Run every test in a scratch directory with logs redirected to it.

    Clears ANTSEL_* variables and the settings cache so no developer .env leaks in.
    """
    for key in list(os.environ):
        if key.startswith("ANTSEL_"):
            monkeypatch.delenv(key)
    monkeypatch.setenv("ANTSEL_LOG_DIR", str(tmp_path / "logs"))
    monkeypatch.chdir(tmp_path)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def settings(tmp_path: Path) -> Settings:
    """Explicit settings with a small random baseline."""
    return Settings(log_dir=tmp_path / "logs", random_draws=20)


@pytest.fixture
def iid_tensor() -> ChannelTensor:
    """Normalized i.i.d. Rayleigh channel, K=2, M=8, L=4."""
    return normalize(gen_iid_rayleigh(2, 8, 4, seed=0))


@pytest.fixture
def identity_tensor() -> ChannelTensor:
    """H = I_2 on a single subcarrier."""
    return ChannelTensor(entries=np.eye(2)[np.newaxis, :, :], meta="identity")


@pytest.fixture
def scenario_dict() -> dict[str, Any]:
    """Small i.i.d. scenario that runs in well under a second."""
    return {
        "name": "iid_small",
        "channel_source": {"kind": "iid_rayleigh"},
        "K": 2,
        "M": 6,
        "L": 3,
        "rho_db": 0.0,
        "n_sweep": [2, 4, 6],
        "strategies": ["Convex", "Power", "Random", "Exhaustive"],
        "random_draws": 10,
        "seed": 11,
    }


@pytest.fixture
def scenario_file(tmp_path: Path, scenario_dict: dict[str, Any]) -> Path:
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(scenario_dict), encoding="utf-8")
    return path
