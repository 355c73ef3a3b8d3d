"""
Utility functions for bandsel: environment, logging and table I/O.
"""

import json
import logging
import math
import os
from typing import Any, Dict, Mapping, Optional, Sequence

import click
import numpy as np
import pandas as pd
from dotenv import load_dotenv

from .errors import ValidationError

OUTPUT_DIR_ENV = "BANDSEL_OUTPUT_DIR"
DEFAULT_OUTPUT_DIR = "bandsel_output"

# 17 significant digits print every double exactly
FLOAT_FORMAT = "%.17g"


def load_env_variables(debug: bool = False) -> Optional[str]:
    """
    Load environment variables from a .env file in the working directory.

    Args:
        debug: Echo what was found

    Returns:
        The default output directory from BANDSEL_OUTPUT_DIR, or None
    """
    env_file = os.path.join(os.getcwd(), ".env")
    if os.path.exists(env_file):
        load_dotenv(dotenv_path=env_file, override=False)
        if debug:
            click.echo(f"Found .env file at: {env_file}", err=True)
    elif debug:
        click.echo(f"No .env file found in current directory: {os.getcwd()}", err=True)

    output_dir = os.getenv(OUTPUT_DIR_ENV)
    if debug and output_dir:
        click.echo(f"Found environment variable: {OUTPUT_DIR_ENV}", err=True)
    return output_dir


def configure_logging(debug: bool = False) -> None:
    """Configure the root logger once for a CLI invocation."""
    logging.basicConfig(
        level=logging.DEBUG if debug else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )


def resolve_output_dir(cli_value: Optional[str], config_value: Optional[str]) -> str:
    """Output directory by precedence: flag, config file, environment, default."""
    return cli_value or config_value or load_env_variables() or DEFAULT_OUTPUT_DIR


def alpha_tag(alpha: float) -> str:
    """Render alpha for use in a file name."""
    return f"{alpha:g}"


def to_jsonable(obj: Any) -> Any:
    """
    Convert numpy values (recursively) to plain Python for json.dump.

    Non-finite floats become None.
    """
    if isinstance(obj, Mapping):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        return value if math.isfinite(value) else None
    return obj


def write_json(path: str, payload: Any) -> None:
    """Write a JSON document, creating parent directories as needed."""
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(to_jsonable(payload), f, indent=2, sort_keys=False)
        f.write("\n")


def dumps_json(payload: Any) -> str:
    return json.dumps(to_jsonable(payload), indent=2)


def write_table(path: str, columns: Dict[str, Sequence[Any]], fmt: str = "csv") -> None:
    """
    Write equal-length columns as CSV or as a JSON list of records.

    Args:
        path: Output file
        columns: Column name to values
        fmt: "csv" or "json"
    """
    frame = pd.DataFrame({name: np.asarray(values) for name, values in columns.items()})
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    if fmt == "csv":
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    elif fmt == "json":
        write_json(path, frame.to_dict(orient="records"))
    else:
        raise ValidationError(f"unknown table format '{fmt}' (choose from csv, json)")


def read_table(path: str) -> pd.DataFrame:
    """Read a CSV table with exact float parsing."""
    if not os.path.exists(path):
        raise ValidationError(f"input file not found: {path}")
    return pd.read_csv(path, float_precision="round_trip")


def read_vector(path: str, column: Optional[str] = None) -> np.ndarray:
    """
    Read one numeric column of a CSV file.

    Args:
        path: CSV file
        column: Column name; defaults to the last numeric column

    Returns:
        Float vector
    """
    frame = read_table(path)
    if column is not None:
        if column not in frame.columns:
            raise ValidationError(f"column '{column}' not found in {path}")
        series = frame[column]
    else:
        numeric = frame.select_dtypes(include="number")
        if numeric.empty:
            raise ValidationError(f"no numeric column in {path}")
        series = numeric.iloc[:, -1]
    values = series.to_numpy(dtype=float)
    if not np.all(np.isfinite(values)):
        raise ValidationError(f"column '{series.name}' in {path} has missing or non-finite values")
    return values


def format_table(columns: Dict[str, Sequence[Any]], fmt: str = "csv") -> str:
    """Render columns as CSV text or a JSON list of records (for stdout)."""
    frame = pd.DataFrame({name: np.asarray(values) for name, values in columns.items()})
    if fmt == "csv":
        return frame.to_csv(index=False, float_format=FLOAT_FORMAT)
    if fmt == "json":
        return dumps_json(frame.to_dict(orient="records")) + "\n"
    raise ValidationError(f"unknown table format '{fmt}' (choose from csv, json)")
