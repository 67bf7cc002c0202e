"""
Pytest configuration for spinframe tests.

This module contains shared fixtures and configuration for tests.
"""

import copy
import os
import sys

import numpy as np
import pytest

# Add the project root to the path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from spinframe.ambient.model_space import ModelFactory
from spinframe.surface import SurfaceScene
from spinframe.utils.config_utils import DEFAULT_CONFIG

FIXTURES_DIR = os.path.abspath(os.path.join(os.path.dirname(__file__), '..', 'fixtures'))


@pytest.fixture
def rng():
    """Deterministic random generator for tests."""
    return np.random.default_rng(42)


@pytest.fixture
def fixtures_dir():
    """Directory of the shipped scene files."""
    return FIXTURES_DIR


@pytest.fixture
def default_config():
    """A private copy of the built-in configuration."""
    return copy.deepcopy(DEFAULT_CONFIG)


@pytest.fixture
def nil3():
    return ModelFactory.create_model(0.0, 0.5)


@pytest.fixture
def berger():
    return ModelFactory.create_model(4.0, 1.0)


@pytest.fixture
def s2xr():
    return ModelFactory.create_model(1.0, 0.0)


@pytest.fixture
def h2xr():
    return ModelFactory.create_model(-1.0, 0.0)


@pytest.fixture
def slice_scene(s2xr):
    """Horizontal slice z = 0 of S^2 x R."""
    return SurfaceScene.from_strings(s2xr, "u", "v", "0", [[-0.5, 0.5], [-0.5, 0.5]], [32, 32])


@pytest.fixture
def vertical_plane_scene(nil3):
    """Vertical plane y = 0 of Nil3, normal flipped so the constant spinor solves the equation."""
    return SurfaceScene.from_strings(nil3, "u", "0", "v", [[-0.5, 0.5], [-0.5, 0.5]], [32, 32],
                                     orientation=-1)


@pytest.fixture
def graph_scene(nil3):
    """Graph z = 0.2 u v in Nil3."""
    return SurfaceScene.from_strings(nil3, "u", "v", "0.2*u*v", [[-0.5, 0.5], [-0.5, 0.5]],
                                     [32, 32])


@pytest.fixture
def berger_cylinder_scene(berger):
    """Vertical cylinder over a circle of radius 0.5 in the Berger sphere."""
    return SurfaceScene.from_strings(berger, "0.5*cos(u)", "0.5*sin(u)", "v",
                                     [[0.0, 3.0], [-0.5, 0.5]], [32, 32])
