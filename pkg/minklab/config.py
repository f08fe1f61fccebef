"""
Configuration management for minklab
"""

import copy
import json
import os
from pathlib import Path
from typing import Any, Dict, Optional

from .errors import ConfigError


DEFAULT_TOLERANCES = {
    "tol_homog": 1e-10,
    "tol_abs_homog": 1e-9,
    "tol_identity": 1e-10,
    "tol_cross_route": 1e-7,
    "tol_flat": 1e-8,
    "tol_mean_cartan": 1e-10,
    "tol_g": 1e-10,
    "tol_parallel": 1e-10,
    "tol_theorem3": 1e-6,
    "tol_const_curvature": 1e-6,
    "tol_umbilic": 1e-6,
    "tol_h_variation": 1e-6,
    "tol_normal_part": 1e-10,
    "tol_gradient": 1e-6,
    "tol_obata": 1e-6,
    "tol_converse": 1e-9,
    "tol_proper": 1e-6,
    "tol_shape_symmetry": 1e-9,
}


def default_config_path() -> Path:
    """Location of the per-user configuration file"""
    return Path.home() / ".minklab" / "config.json"


class Config:
    """Configuration handler for minklab"""

    DEFAULT_CONFIG = {
        "seed": 7,
        "count": 200,
        "rmin": 0.5,
        "rmax": 2.0,
        "threads": None,
        "theorem3_radii": [0.5, 1.0, 2.0],
        "frame_pairs": 3,
        "surface_samples": 20,
        "tolerances": DEFAULT_TOLERANCES,
    }

    def __init__(self, config_file: Optional[str] = None):
        """Initialize configuration, reading config_file when it exists"""
        self.config_file = config_file
        self.config: Dict[str, Any] = {}
        self.load()

    def load(self):
        """Load configuration from file or fall back to defaults"""
        self.config = copy.deepcopy(self.DEFAULT_CONFIG)
        if not self.config_file or not os.path.exists(self.config_file):
            return
        try:
            with open(self.config_file, "r", encoding="utf-8") as f:
                stored = json.load(f)
        except (json.JSONDecodeError, IOError) as e:
            raise ConfigError(f"cannot read config {self.config_file}: {e}") from e
        if not isinstance(stored, dict):
            raise ConfigError(f"config {self.config_file} must hold a JSON object")
        self.update(stored)

    def update(self, values: Dict[str, Any]):
        """Merge values over the current configuration, rejecting unknown keys"""
        for key, value in values.items():
            if key not in self.DEFAULT_CONFIG:
                raise ConfigError(f"unknown config key: {key}")
            if key == "tolerances":
                if not isinstance(value, dict):
                    raise ConfigError("tolerances must be an object")
                for name, tol in value.items():
                    self.set_tolerance(name, tol)
            else:
                self.config[key] = value

    def save(self, path: Optional[str] = None):
        """Save configuration to path (defaults to the loaded file)"""
        target = path or self.config_file or str(default_config_path())
        config_dir = os.path.dirname(target)
        if config_dir:
            os.makedirs(config_dir, exist_ok=True)
        with open(target, "w", encoding="utf-8") as f:
            json.dump(self.config, f, indent=2, sort_keys=True)
        return target

    def get(self, key: str, default=None):
        """Get a configuration value"""
        return self.config.get(key, default)

    def set(self, key: str, value):
        """Set a configuration value"""
        self.update({key: value})

    def tolerance(self, name: str) -> float:
        """Look up a named tolerance"""
        try:
            return float(self.config["tolerances"][name])
        except KeyError:
            raise ConfigError(f"unknown tolerance: {name}") from None

    def set_tolerance(self, name: str, value):
        """Override one documented tolerance"""
        if name not in DEFAULT_TOLERANCES:
            raise ConfigError(f"unknown tolerance: {name}")
        try:
            value = float(value)
        except (TypeError, ValueError):
            raise ConfigError(f"tolerance {name} must be a number") from None
        if not value > 0:
            raise ConfigError(f"tolerance {name} must be positive")
        self.config["tolerances"][name] = value

    @property
    def tolerances(self) -> Dict[str, float]:
        return dict(self.config["tolerances"])
