"""Shared fixtures."""

import json
import logging
import os
from pathlib import Path

import numpy as np
import pytest

from resonance_lab.config.logging_config import RunIdFilter
from resonance_lab.config.settings import get_settings
from resonance_lab.services.herglotz_models import Cauchy, MatrixHerglotzModel, Semicircle, Uniform


@pytest.fixture(autouse=True)
def isolated_settings(monkeypatch, tmp_path):
    """Fresh settings per test, built from a clean LAB_* environment."""
    for key in list(os.environ):
        if key.startswith("LAB_"):
            monkeypatch.delenv(key)
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("LAB_OUT_DIR", str(tmp_path / "reports"))
    monkeypatch.setenv("LAB_LOG_FORMAT", "text")
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()
    # main() installs a handler bound to the captured stderr of this test
    root = logging.getLogger()
    for handler in list(root.handlers):
        if any(isinstance(f, RunIdFilter) for f in handler.filters):
            root.removeHandler(handler)


@pytest.fixture
def cauchy():
    return Cauchy()


@pytest.fixture
def semicircle():
    return Semicircle(halfwidth=2.0)


@pytest.fixture
def uniform():
    return Uniform(a=0.0, b=1.0)


@pytest.fixture
def diagonal_terms(cauchy, semicircle):
    """(diag(1,0), cauchy) and (diag(0,1), semicircle)."""
    return (
        (np.diag([1.0, 0.0]), cauchy),
        (np.diag([0.0, 1.0]), semicircle),
    )


@pytest.fixture
def coupled_matrix_model(cauchy, semicircle):
    return MatrixHerglotzModel(
        J=(1, 1),
        terms=(
            (np.array([[1.0, 0.3], [0.3, 0.5]]), cauchy),
            (np.array([[0.5, 0.0], [0.0, 1.0]]), semicircle),
        ),
    )


@pytest.fixture
def write_scenario(tmp_path):
    """Write a scenario document to disk and return its path."""

    def _write(document, name="scenario.json") -> Path:
        path = tmp_path / name
        text = document if isinstance(document, str) else json.dumps(document)
        path.write_text(text, encoding="utf-8")
        return path

    return _write
