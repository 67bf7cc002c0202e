"""
Test utilities for spinframe tests.

This module contains utility functions for testing.
"""

import json
import os
from typing import Any, Dict

import numpy as np

from spinframe.cli.commands import CommandContext
from spinframe.utils.config_utils import DEFAULT_CONFIG, deep_merge

FIXTURES_DIR = os.path.abspath(os.path.join(os.path.dirname(__file__), '..', 'fixtures'))


def fixture_path(name: str) -> str:
    """
    Path of a shipped fixture.

    Args:
        name: File name under fixtures/, with or without .json

    Returns:
        Absolute path
    """
    if not name.endswith(".json"):
        name += ".json"
    return os.path.join(FIXTURES_DIR, name)


def load_fixture(name: str) -> Dict[str, Any]:
    with open(fixture_path(name)) as f:
        return json.load(f)


def write_json(directory, name: str, document: Dict[str, Any]) -> str:
    """
    Write a JSON document into a directory.

    Args:
        directory: Target directory (e.g. pytest's tmp_path)
        name: File name
        document: JSON-serializable document

    Returns:
        Path of the written file
    """
    path = os.path.join(str(directory), name)
    with open(path, "w") as f:
        json.dump(document, f, indent=2)
    return path


def make_context(grid=None, tolerances: Dict[str, float] = None,
                 config: Dict[str, Any] = None, **kwargs) -> CommandContext:
    """Command context on the built-in configuration with optional overrides."""
    return CommandContext(
        config=deep_merge(DEFAULT_CONFIG, config or {}),
        tolerance_overrides=dict(tolerances or {}),
        grid=grid,
        **kwargs,
    )


def random_spinors(rng: np.random.Generator, shape=()) -> np.ndarray:
    """Complex spinor array with a trailing axis of length 2."""
    return rng.normal(size=shape + (2,)) + 1j * rng.normal(size=shape + (2,))


def random_tangents(rng: np.random.Generator, shape=()) -> np.ndarray:
    return rng.normal(size=shape + (2,))


def random_vertical(rng: np.random.Generator, shape=()):
    """Random (T, f) with |T|^2 + f^2 = 1."""
    xi = rng.normal(size=shape + (3,))
    xi /= np.linalg.norm(xi, axis=-1, keepdims=True)
    return xi[..., :2], xi[..., 2]


def random_symmetric(rng: np.random.Generator, shape=()) -> np.ndarray:
    A = rng.normal(size=shape + (2, 2))
    return 0.5 * (A + np.swapaxes(A, -1, -2))


def check_by_name(report_dict: Dict[str, Any], name: str) -> Dict[str, Any]:
    """Find a check entry of a report dictionary by name."""
    for check in report_dict["checks"]:
        if check["name"] == name:
            return check
    raise KeyError(f"No check named {name}")
