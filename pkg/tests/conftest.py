from __future__ import annotations

from pathlib import Path
from typing import Dict

import pytest
import yaml

from palperm.algorithms.permutation import Permutation, from_one_line
from palperm.logging_system import reset_logging


@pytest.fixture
def s3() -> Dict[str, Permutation]:
    """S_3 with the rotation/reflection names used in the class tables."""
    return {
        "I": from_one_line([1, 2, 3]),
        "sigma_1": from_one_line([2, 3, 1]),
        "sigma_2": from_one_line([3, 1, 2]),
        "tau_1": from_one_line([1, 3, 2]),
        "tau_2": from_one_line([3, 2, 1]),
        "tau_3": from_one_line([2, 1, 3]),
    }


@pytest.fixture
def klein() -> Dict[str, Permutation]:
    return {
        "e": from_one_line([1, 2, 3, 4]),
        "delta_1": from_one_line([3, 4, 1, 2]),
        "delta_2": from_one_line([2, 1, 4, 3]),
        "delta_3": from_one_line([4, 3, 2, 1]),
    }


@pytest.fixture
def config_file(tmp_path: Path) -> Path:
    raw = {
        "census": {
            "workers": 1,
            "windows_per_worker": 2,
            "chunk_size": 512,
            "witness_cap": 16,
            "cache_enabled": True,
            "cache_dir": str(tmp_path / "cache"),
        },
        "guards": {"census_max_degree": 12, "inverse_max_degree": 9},
        "output": {"format": "text", "include_timings": False},
        "logging": {
            "level": "DEBUG",
            "file_path": str(tmp_path / "logs" / "palperm.log"),
            "console_enabled": False,
        },
    }
    path = tmp_path / "config.yaml"
    path.write_text(yaml.safe_dump(raw), encoding="utf-8")
    return path


@pytest.fixture(autouse=True)
def _release_log_handlers():
    yield
    reset_logging()
