"""
Smoothing command for bandsel.
"""

from typing import Optional

import click

from ..config import resolve_study_settings
from ..kernels import get_kernel
from ..smoother import make_plan, smooth
from ..trend import make_design
from ..utils import read_vector
from .common import FORMAT_CHOICE, common_options, emit_json, emit_table, prepare


@click.command("smooth")
@common_options
@click.option("--input", "input_path", required=True, type=click.Path(dir_okay=False),
              help="CSV file holding the data vector y")
@click.option("--column", default=None, help="Column of the input holding y (default: last numeric column)")
@click.option("--h", "h", required=True, type=float, help="Bandwidth, in (0, 1/2)")
@click.option("--kernel", default=None, help="Kernel name (default: biweight)")
@click.option("--periodic/--no-periodic", default=None,
              help="Circular design distances (default: periodic, as in the reference study)")
@click.option("--format", "fmt", type=FORMAT_CHOICE, default="csv", help="Output format (default: csv)")
@click.option("--output", default=None, help="Output file (default: stdout)")
def smooth_command(config_file: Optional[str], debug: bool, print_config: bool, input_path: str,
                   column: Optional[str], h: float, kernel: Optional[str], periodic: Optional[bool],
                   fmt: str, output: Optional[str]):
    """Smooth a data vector with the Priestley-Chao estimator and print x, y and r_hat."""
    config = prepare(config_file, debug)
    settings = resolve_study_settings(config, {"kernel": kernel, "periodic": periodic})
    if print_config:
        emit_json({"input": input_path, "column": column, "h": h, "kernel": settings["kernel"],
                   "periodic": settings["periodic"], "format": fmt, "output": output})
        return

    y = read_vector(input_path, column)
    plan = make_plan(len(y), h, get_kernel(settings["kernel"]), bool(settings["periodic"]))
    design = make_design(plan.n)
    emit_table({"x": design.points, "y": y, "r_hat": smooth(plan, y)}, output, fmt)
