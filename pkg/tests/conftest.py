"""
Shared fixtures for the test suite.
"""
import logging

import pytest

from henon_blowup.model import validate_params
from henon_blowup.spectral import Grid
from henon_blowup.evolution import SimilarityGrid

logging.getLogger("henon_blowup").setLevel(logging.WARNING)


@pytest.fixture
def params_p3():
    """p = 3, c = 0.3: inside the stable window, only the symmetry mode is unstable."""
    return validate_params(3, 3, 0.3)


@pytest.fixture
def params_p5():
    return validate_params(3, 5, 0.2)


@pytest.fixture
def spectral_grid():
    return Grid(12.0, 2000)


@pytest.fixture
def similarity_grid():
    return SimilarityGrid(12.0, 0.02)


@pytest.fixture
def out_dir(tmp_path, monkeypatch):
    """Isolated output directory with the environment cleared."""
    for key in ("HBL_OUT_DIR", "HBL_LOG_LEVEL", "HBL_WORKERS", "HBL_VERBOSE"):
        monkeypatch.delenv(key, raising=False)
    path = tmp_path / "outputs"
    path.mkdir()
    return path
