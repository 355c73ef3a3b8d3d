"""
Configuration utilities for bandsel.
"""

import copy
import os
from typing import Any, Dict, Mapping, Optional

import click
import yaml

# Default config file path
DEFAULT_CONFIG_PATH = "bandsel_config.yaml"

# Reference simulation settings: six ARCH(1) persistences, sigma = 0.32,
# biweight kernel, benchmark trend, periodic smoothing with u == 1
DEFAULT_CONFIG: Dict[str, Dict[str, Any]] = {
    "study": {
        "n": 512,
        "alphas": [0.01, 0.162, 0.577, 0.75, 0.9, 0.98],
        "sigma": 0.32,
        "replicates": 100,
        "seed": 12345,
        "grid": "auto",
        "grid_size": 200,
        "kernel": "biweight",
        "trend": "benchmark",
        "weight": "uniform",
        "periodic": True,
        "store_curves": False,
        "threads": 1,
        "boxplot_points": 21,
        "iid": False,
    },
    "output": {
        "directory": None,
    },
}


def default_config() -> Dict[str, Dict[str, Any]]:
    return copy.deepcopy(DEFAULT_CONFIG)


def _convert_none_strings(d: Dict[str, Any]) -> None:
    for k, v in d.items():
        if isinstance(v, dict):
            _convert_none_strings(v)
        elif v == "None" or v == "null":
            d[k] = None


def merge_config_with_defaults(existing: Mapping[str, Any]) -> Dict[str, Dict[str, Any]]:
    """
    Merge a (possibly partial) configuration over the defaults, section by section.

    Args:
        existing: Configuration read from a file

    Returns:
        Configuration with every default key present
    """
    merged = default_config()
    for section, values in (existing or {}).items():
        if isinstance(values, dict) and section in merged:
            merged[section].update(values)
        else:
            merged[section] = values
    return merged


def load_config(config_path: Optional[str] = None) -> Dict[str, Dict[str, Any]]:
    """
    Load configuration from YAML file.

    A missing file yields the defaults; an unreadable one yields the defaults
    with a warning.

    Args:
        config_path: Path to configuration file

    Returns:
        Dictionary with configuration values
    """
    if not config_path:
        config_path = DEFAULT_CONFIG_PATH

    try:
        if os.path.exists(config_path):
            with open(config_path, "r", encoding="utf-8") as f:
                config = yaml.safe_load(f) or {}
            if not isinstance(config, dict):
                raise ValueError("top level must be a mapping")
            _convert_none_strings(config)
            click.echo(f"✓ Loaded configuration from {config_path}", err=True)
            return merge_config_with_defaults(config)
    except Exception as e:
        click.echo(f"Warning: Error loading configuration file: {str(e)}", err=True)

    return default_config()


def resolve_study_settings(config: Mapping[str, Any], overrides: Mapping[str, Any]) -> Dict[str, Any]:
    """
    Apply command-line values over the `study` section; None means "not given".

    Args:
        config: Loaded configuration
        overrides: Flag values keyed like the `study` section

    Returns:
        Fully resolved study settings
    """
    settings = dict(config.get("study") or DEFAULT_CONFIG["study"])
    for key, value in overrides.items():
        if value is not None:
            settings[key] = value
    return settings
