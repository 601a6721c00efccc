import pytest
import sys
import json
from pathlib import Path

sys.path.append(str(Path(__file__).resolve().parent))
sys.path.append(str(Path(__file__).resolve().parents[1]))

from moyal_spin.config import THREADS_ENV_VAR, RunConfig, num_threads


def test_threads_default_to_one(monkeypatch):
    monkeypatch.delenv(THREADS_ENV_VAR, raising=False)
    assert num_threads() == 1
    assert RunConfig().threads == 1
    assert RunConfig(threads=8).threads == 1


def test_threads_capped_by_environment(monkeypatch):
    monkeypatch.setenv(THREADS_ENV_VAR, "2")
    assert num_threads() == 2
    assert RunConfig().threads == 2
    assert RunConfig(threads=8).threads == 2
    assert RunConfig(threads=1).threads == 1
    assert RunConfig(threads=0).threads == 1


@pytest.mark.parametrize("raw", ["", "many", "-3", "0"])
def test_bad_thread_settings_fall_back_to_one(monkeypatch, raw):
    monkeypatch.setenv(THREADS_ENV_VAR, raw)
    assert num_threads() == 1
    assert RunConfig(threads=4).threads == 1


def test_updated_keeps_cap(monkeypatch):
    monkeypatch.setenv(THREADS_ENV_VAR, "3")
    config = RunConfig(resolution=8)
    assert config.updated(threads=16, seed=None).threads == 3
    assert config.updated(threads=None).resolution == 8


def test_from_json(tmp_path, monkeypatch):
    monkeypatch.setenv(THREADS_ENV_VAR, "4")
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"seed": 7, "threads": 2, "oracle_tolerance": 1e-9}))
    config = RunConfig.from_json(str(path))
    assert config.seed == 7
    assert config.threads == 2
    assert config.oracle_tolerance == 1e-9
    assert "seed: 7" in str(config)
