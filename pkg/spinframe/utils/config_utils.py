"""
Configuration Utilities

Loading of the spinframe YAML configuration and layering of tolerance
overrides from scene files and the command line.
"""

import copy
import logging
import os
from typing import Any, Dict, Mapping, Optional

import yaml

logger = logging.getLogger(__name__)

DEFAULT_CONFIG: Dict[str, Any] = {
    "tolerances": {
        "compat": 5e-5,
        "killing": 1e-5,
        "dirac": 1e-5,
        "holonomy": 1e-6,
        "roundtrip": 1e-5,
        "norm": 1e-6,
        "recover": 1e-4,
        "split": 1e-5,
        "ricci": 1e-4,
        "curvature": 1e-5,
        "frame": 1e-6,
        "christoffel": 1e-6,
    },
    "numerics": {
        "fd_order": 4,
        "fd_step": 1e-4,
        "epsilon_zero": 1e-10,
        "split_min_fraction": 0.05,
        "lambda_min": 1e-3,
        "compat_gate": 1e-3,
        "frame_drift_max": 1e-3,
        "degenerate_det": 1e-12,
        "norm_blowup": 10.0,
    },
    "processing": {
        "processor": "sequential",
        "batch_size": 512,
        "max_workers": None,
        "show_progress": False,
    },
}


def deep_merge(base: Dict[str, Any], override: Mapping[str, Any]) -> Dict[str, Any]:
    """Return a copy of base with override merged in recursively."""
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, Mapping) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def load_spinframe_config(config_path: Optional[str] = None) -> Dict[str, Any]:
    """
    Load spinframe configuration from a YAML file.

    Args:
        config_path: Path to configuration file. If None, will look for
                    default locations.

    Returns:
        Configuration dictionary with "tolerances", "numerics" and
        "processing" sections, defaults filled in
    """
    default_locations = [
        os.path.join(os.getcwd(), "config", "spinframe_config.yaml"),
        os.path.join(os.getcwd(), "spinframe", "config", "spinframe_config.yaml"),
        os.path.join(os.path.dirname(__file__), "..", "config", "spinframe_config.yaml"),
    ]

    config_locations = [config_path] if config_path else default_locations

    for location in config_locations:
        if location and os.path.exists(location):
            try:
                with open(location, "r") as f:
                    config = yaml.safe_load(f)
                if config and "spinframe" in config:
                    logger.debug(f"Loaded configuration from {location}")
                    return deep_merge(DEFAULT_CONFIG, config["spinframe"] or {})
                logger.warning(f"No 'spinframe' section in {location}")
            except Exception as e:
                logger.error(f"Error loading config from {location}: {e}")
        elif config_path:
            logger.warning(f"Config file not found: {location}")

    return copy.deepcopy(DEFAULT_CONFIG)


def resolve_tolerances(config: Mapping[str, Any],
                       scene_tolerances: Optional[Mapping[str, float]] = None,
                       overrides: Optional[Mapping[str, float]] = None) -> Dict[str, float]:
    """
    Layer tolerances: configuration, then scene file, then command line.

    Raises:
        ValueError: On an unknown tolerance name or a non-positive value
    """
    tolerances = dict(config.get("tolerances", DEFAULT_CONFIG["tolerances"]))
    for layer in (scene_tolerances or {}, overrides or {}):
        for name, value in layer.items():
            if name not in tolerances:
                raise ValueError(f"Unknown tolerance: {name}. "
                                 f"Known tolerances: {', '.join(sorted(tolerances))}")
            value = float(value)
            if not value > 0.0:
                raise ValueError(f"Tolerance {name} must be positive, got {value}")
            tolerances[name] = value
    return tolerances
