"""
Quadratic-form variance check command for bandsel.
"""

from typing import Optional

import click

from ..config import resolve_study_settings
from ..kernels import get_kernel
from ..montecarlo import run_quadform_study
from ..trend import get_trend, get_weight
from .common import common_options, emit_json, prepare


@click.command("quadform")
@common_options
@click.option("--n", "n", type=int, default=None, help="Sample size (default: 512)")
@click.option("--h", "h", type=float, default=None, help="Bandwidth (default: h_n* = c n^-1/5)")
@click.option("--alpha", type=float, default=0.01, show_default=True, help="ARCH(1) persistence")
@click.option("--sigma", type=float, default=None, help="Noise standard deviation (default: 0.32)")
@click.option("--replicates", type=int, default=None, help="Noise paths (default: 100)")
@click.option("--seed", type=int, default=None, help="Base seed (default: 12345)")
@click.option("--kernel", default=None, help="Kernel name (default: biweight)")
@click.option("--trend", default=None, help="Trend name (default: benchmark)")
@click.option("--weight", default=None, help="Weight function (default: uniform)")
@click.option("--threads", type=int, default=None, help="Worker processes (default: 1)")
@click.option("--output", default=None, help="Output file (default: stdout)")
def quadform_command(config_file: Optional[str], debug: bool, print_config: bool, n: Optional[int],
                     h: Optional[float], alpha: float, sigma: Optional[float], replicates: Optional[int],
                     seed: Optional[int], kernel: Optional[str], trend: Optional[str],
                     weight: Optional[str], threads: Optional[int], output: Optional[str]):
    """Compare the simulated variance of the CL quadratic form with its two-term expansion."""
    config = prepare(config_file, debug)
    settings = resolve_study_settings(config, {
        "n": n, "sigma": sigma, "replicates": replicates, "seed": seed, "kernel": kernel,
        "trend": trend, "weight": weight, "threads": threads,
    })
    if print_config:
        emit_json({"h": h, "alpha": alpha, "output": output, **settings})
        return

    result = run_quadform_study(
        get_trend(settings["trend"]), get_weight(settings["weight"]), get_kernel(settings["kernel"]),
        float(settings["sigma"]) ** 2, alpha, int(settings["n"]), int(settings["replicates"]),
        int(settings["seed"]), h=h, periodic=True, threads=int(settings["threads"]),
    )
    emit_json(result.to_record(), output)
