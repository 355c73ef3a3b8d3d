"""
Asymptotic theory command for bandsel.
"""

from typing import Optional

import click

from ..asymptotics import AsymptoticInputs, theory_report
from ..config import resolve_study_settings
from ..errors import ValidationError
from ..kernels import get_kernel
from ..noise import ArchParams, max_finite_moment_order
from ..trend import get_trend, get_weight
from .common import common_options, emit_json, prepare


@click.command("theory")
@common_options
@click.option("--n", "n", type=int, default=None, help="Sample size (default: 512)")
@click.option("--alpha", type=float, default=None,
              help="ARCH persistence; reported with its highest finite even moment (the limits do not depend on it)")
@click.option("--sigma", type=float, default=None, help="Noise standard deviation (default: 0.32)")
@click.option("--kernel", default=None, help="Kernel name (default: biweight)")
@click.option("--trend", default=None, help="Trend name (default: benchmark)")
@click.option("--weight", default=None, help="Weight function (default: uniform)")
@click.option("--output", default=None, help="Output file (default: stdout)")
def theory_command(config_file: Optional[str], debug: bool, print_config: bool, n: Optional[int],
                   alpha: Optional[float], sigma: Optional[float], kernel: Optional[str],
                   trend: Optional[str], weight: Optional[str], output: Optional[str]):
    """Print h_n*, the gap variance Sigma^2, the gap standard deviation and V."""
    config = prepare(config_file, debug)
    settings = resolve_study_settings(config, {"n": n, "sigma": sigma, "kernel": kernel,
                                               "trend": trend, "weight": weight})
    if print_config:
        emit_json({"alpha": alpha, "output": output, **settings})
        return

    size = int(settings["n"])
    if size < 4:
        raise ValidationError(f"n must be >= 4, got {size}")
    sigma2 = float(settings["sigma"]) ** 2
    inputs = AsymptoticInputs.from_setup(get_trend(settings["trend"]), get_weight(settings["weight"]),
                                         get_kernel(settings["kernel"]), sigma2)
    report = theory_report(inputs, size)
    if alpha is not None:
        params = ArchParams(alpha, sigma2)
        report["alpha"] = params.alpha
        report["moment_order"] = max_finite_moment_order(params.alpha)
    emit_json(report, output)
