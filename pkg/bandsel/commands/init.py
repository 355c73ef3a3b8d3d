"""
Initialize configuration command for bandsel.
"""

import os
from typing import Any, Dict, Optional

import click
import yaml

from ..config import DEFAULT_CONFIG_PATH, merge_config_with_defaults


def read_existing_config(path: str) -> Optional[str]:
    """
    Return the text of a configuration file.

    Args:
        path: Config file location

    Returns:
        File text, or None when the file is missing or unreadable
    """
    if not os.path.exists(path):
        return None

    try:
        with open(path, "r", encoding="utf-8") as f:
            return f.read()
    except Exception as e:
        click.echo(f"Warning: Could not read existing configuration: {e}")
        return None


def parse_yaml_config(content: str) -> Dict[str, Any]:
    """Parse YAML configuration content; unparsable content counts as empty."""
    try:
        parsed = yaml.safe_load(content) or {}
        return parsed if isinstance(parsed, dict) else {}
    except Exception as e:
        click.echo(f"Warning: Could not parse existing configuration: {e}")
        return {}


def _yaml_value(value: Any) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_yaml_value(v) for v in value) + "]"
    return str(value)


def generate_config_content(config: Dict[str, Any]) -> str:
    """
    Render a configuration mapping as YAML with one comment per setting.

    Args:
        config: Sections of settings, e.g. the output of merge_config_with_defaults

    Returns:
        YAML text ready to be written to disk
    """
    content = "# Configuration for bandsel\n\n"

    section_comments = {
        "study": "# Simulation settings (the defaults reproduce the reference study at n=512)\n",
        "output": "\n# Output settings\n",
    }

    field_comments = {
        "study": {
            "n": "  # Sample size of every data set",
            "alphas": "  # ARCH(1) persistences, one study cell each",
            "sigma": "  # Noise standard deviation (stationary variance sigma^2)",
            "replicates": "  # Data sets per alpha",
            "seed": "  # Base seed; replicate streams derive from (seed, alpha index, replicate index)",
            "grid": "  # auto (around h_n*) or fixed (the domain [0.019, 1.30] clamped below 1/2)",
            "grid_size": "  # Number of candidate bandwidths",
            "kernel": "  # biweight or triweight",
            "trend": "  # benchmark, zero or linear",
            "weight": "  # uniform or bump",
            "periodic": "  # Circular design distances; uniform weights require true",
            "store_curves": "  # Write every replicate's curves",
            "threads": "  # Worker processes (-1 for all cores); results do not depend on it",
            "boxplot_points": "  # Grid bandwidths carrying boxplots of the centred CL values",
            "iid": "  # Draw i.i.d. Gaussian noise instead of ARCH(1)",
        },
        "output": {
            "directory": "  # Output directory (null: $BANDSEL_OUTPUT_DIR, then bandsel_output)",
        },
    }

    for section, settings in config.items():
        if not isinstance(settings, dict):
            continue
        notes = field_comments.get(section, {})
        content += section_comments.get(section, "\n") + f"{section}:\n"
        content += "".join(f"  {key}: {_yaml_value(value)}{notes.get(key, '')}\n" for key, value in settings.items())

    return content


@click.command("init")
@click.option("--path", default=DEFAULT_CONFIG_PATH, help=f"Path to create configuration file (default: {DEFAULT_CONFIG_PATH})")
@click.option("--force/--no-force", default=False, help="Overwrite an existing file instead of completing it")
def init_config(path: str, force: bool):
    """Initialize a configuration file holding every default setting."""
    current = None
    if os.path.exists(path) and not force:
        click.echo(f"Found {path}, adding any settings it lacks...")
        current = read_existing_config(path)

    settings = merge_config_with_defaults(parse_yaml_config(current) if current else {})

    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(generate_config_content(settings))

    if current:
        click.echo(f"✓ Configuration file updated with missing settings at {path}")
    else:
        click.echo(f"✓ Configuration file created at {path}")
