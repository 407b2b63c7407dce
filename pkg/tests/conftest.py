"""Shared fixtures: every test sees the built-in configuration only."""

import sys
from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO_ROOT / "core" / "lab"))

import config_loader


@pytest.fixture(autouse=True)
def isolated_config(tmp_path, monkeypatch):
    monkeypatch.setenv(config_loader.ROOT_ENV, str(tmp_path))
    monkeypatch.delenv(config_loader.BUDGET_ENV, raising=False)
    config_loader.set_runtime_overrides([])
    config_loader.reset_config()
    yield tmp_path
    config_loader.set_runtime_overrides([])
    config_loader.reset_config()
