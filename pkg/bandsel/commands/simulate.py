"""
Noise simulation command for bandsel.
"""

from typing import Optional

import click

from ..config import resolve_study_settings
from ..noise import ArchParams, make_noise
from ..trend import get_trend, make_design
from .common import FORMAT_CHOICE, common_options, emit_json, emit_table, prepare


@click.command("simulate")
@common_options
@click.option("--n", "n", type=int, default=None, help="Path length (default: 512)")
@click.option("--alpha", type=float, default=0.577, show_default=True, help="ARCH(1) persistence, in [0, 1)")
@click.option("--sigma", type=float, default=None, help="Noise standard deviation (default: 0.32)")
@click.option("--seed", type=int, default=None, help="Stream seed (default: 12345)")
@click.option("--iid", is_flag=True, default=False, help="Draw i.i.d. Gaussian noise instead of ARCH(1)")
@click.option("--data", is_flag=True, default=False,
              help="Also emit x, the trend and y = trend + noise (one simulated data set)")
@click.option("--trend", default=None, help="Trend used with --data (default: benchmark)")
@click.option("--format", "fmt", type=FORMAT_CHOICE, default="csv", help="Output format (default: csv)")
@click.option("--output", default=None, help="Output file (default: stdout)")
def simulate_command(config_file: Optional[str], debug: bool, print_config: bool, n: Optional[int],
                     alpha: float, sigma: Optional[float], seed: Optional[int], iid: bool, data: bool,
                     trend: Optional[str], fmt: str, output: Optional[str]):
    """Simulate a noise path (index, value), optionally with the data built on it."""
    config = prepare(config_file, debug)
    settings = resolve_study_settings(config, {"n": n, "sigma": sigma, "seed": seed, "trend": trend})
    if print_config:
        emit_json({"alpha": alpha, "iid": iid, "data": data, "format": fmt, "output": output, **settings})
        return

    params = ArchParams(alpha, float(settings["sigma"]) ** 2)
    path = make_noise(params.alpha, params.sigma2, iid=iid).sample(int(settings["n"]), int(settings["seed"]))
    columns = path.to_columns()
    if data:
        design = make_design(len(path))
        r = get_trend(settings["trend"]).values(design)
        columns.update({"x": design.points, "trend": r, "y": r + path.values})
    emit_table(columns, output, fmt)
