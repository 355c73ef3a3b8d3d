"""
Options and output helpers shared by the bandsel commands.
"""

import functools
from typing import Any, Dict, Optional, Sequence

import click

from ..config import DEFAULT_CONFIG_PATH, load_config
from ..utils import configure_logging, dumps_json, format_table, load_env_variables, write_json, write_table

FORMAT_CHOICE = click.Choice(["csv", "json"])


def common_options(f):
    """Add --config-file, --debug/--no-debug and --print-config to a command."""

    @click.option("--config-file", type=click.Path(dir_okay=False), default=None,
                  help=f"Path to configuration file (default: {DEFAULT_CONFIG_PATH})")
    @click.option("--debug/--no-debug", default=False, help="Enable debug logging")
    @click.option("--print-config", is_flag=True, default=False,
                  help="Print the fully resolved settings as JSON and exit without computing")
    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        return f(*args, **kwargs)

    return wrapper


def prepare(config_file: Optional[str], debug: bool) -> Dict[str, Any]:
    """Configure logging, load .env and return the merged configuration."""
    configure_logging(debug)
    load_env_variables(debug)
    return load_config(config_file)


def emit_json(payload: Any, output: Optional[str] = None) -> None:
    if output:
        write_json(output, payload)
        click.echo(f"✓ Wrote {output}", err=True)
    else:
        click.echo(dumps_json(payload))


def emit_table(columns: Dict[str, Sequence[Any]], output: Optional[str], fmt: str) -> None:
    if output:
        write_table(output, columns, fmt)
        click.echo(f"✓ Wrote {output}", err=True)
    else:
        click.echo(format_table(columns, fmt), nl=False)
