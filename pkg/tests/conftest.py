"""Shared test fixtures."""
import logging

import numpy as np
import pytest

from superfrac.pipeline import experiment_config
from superfrac.services.fracderiv import FracSpec, Kind
from superfrac.services.orthopoly import Side


@pytest.fixture(autouse=True)
def _reset_settings_cache():
    """Every test starts from a freshly loaded settings file."""
    experiment_config.reset_cache()
    yield
    experiment_config.reset_cache()


@pytest.fixture(autouse=True)
def _restore_root_logging():
    """configure_logging() replaces root handlers; put the originals back."""
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)
    logging.captureWarnings(False)


@pytest.fixture
def rng():
    """Small seeded generator for sample abscissae."""
    return np.random.default_rng(20240917)


@pytest.fixture
def interior_points(rng):
    """Sorted points strictly inside (-1, 1), away from both anchors."""
    return np.sort(rng.uniform(-0.999, 0.999, 40))


@pytest.fixture
def left_rl():
    return FracSpec(0.5, Side.LEFT, Kind.RL)


@pytest.fixture
def left_caputo():
    return FracSpec(0.5, Side.LEFT, Kind.CAPUTO)


@pytest.fixture
def right_rl():
    return FracSpec(0.5, Side.RIGHT, Kind.RL)
