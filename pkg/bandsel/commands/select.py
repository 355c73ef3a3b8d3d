"""
Bandwidth selection command for bandsel.
"""

import os
from typing import Optional

import click

from ..config import resolve_study_settings
from ..criteria import CriterionKind, criterion_curve, make_grid, select
from ..errors import ValidationError
from ..kernels import get_kernel
from ..smoother import SmootherBank
from ..trend import get_trend, get_weight, make_design
from ..utils import read_vector, resolve_output_dir, write_table
from .common import FORMAT_CHOICE, common_options, emit_json, prepare

DATA_CRITERIA = {CriterionKind.ASE, CriterionKind.CL, CriterionKind.CP}


@click.command("select")
@common_options
@click.option("--input", "input_path", default=None, type=click.Path(dir_okay=False),
              help="CSV file holding the data vector y (needed for ASE, CL and CP)")
@click.option("--column", default=None, help="Column of the input holding y (default: last numeric column)")
@click.option("--criterion", type=click.Choice([k.value for k in CriterionKind]), default="CL",
              help="Criterion to minimise (default: CL, Mallows' criterion with known sigma)")
@click.option("--n", "n", type=int, default=None, help="Sample size for MASE_exact and D_n without --input")
@click.option("--sigma", type=float, default=None, help="Noise standard deviation (default: 0.32)")
@click.option("--kernel", default=None, help="Kernel name (default: biweight)")
@click.option("--trend", default=None, help="Trend for ASE, MASE_exact and D_n (default: benchmark)")
@click.option("--weight", default=None, help="Weight function: uniform or bump (default: uniform)")
@click.option("--periodic/--no-periodic", default=None, help="Circular design distances (default: periodic)")
@click.option("--grid", "grid_kind", type=click.Choice(["auto", "fixed"]), default=None,
              help="auto: geometric grid around h_n*; fixed: the domain [0.019, 1.30] clamped below 1/2")
@click.option("--grid-size", type=int, default=None, help="Number of bandwidths (default: 200)")
@click.option("--output-dir", default=None, help="Directory for the curve table")
@click.option("--format", "fmt", type=FORMAT_CHOICE, default="csv", help="Curve table format (default: csv)")
def select_command(config_file: Optional[str], debug: bool, print_config: bool, input_path: Optional[str],
                   column: Optional[str], criterion: str, n: Optional[int], sigma: Optional[float],
                   kernel: Optional[str], trend: Optional[str], weight: Optional[str],
                   periodic: Optional[bool], grid_kind: Optional[str], grid_size: Optional[int],
                   output_dir: Optional[str], fmt: str):
    """Evaluate a criterion over a bandwidth grid and report its minimiser."""
    config = prepare(config_file, debug)
    settings = resolve_study_settings(config, {
        "n": n, "sigma": sigma, "kernel": kernel, "trend": trend, "weight": weight,
        "periodic": periodic, "grid": grid_kind, "grid_size": grid_size,
    })
    outdir = resolve_output_dir(output_dir, (config.get("output") or {}).get("directory"))
    kind = CriterionKind(criterion)
    if print_config:
        emit_json({"criterion": kind.value, "input": input_path, "column": column, "output_dir": outdir,
                   "format": fmt, **settings})
        return

    y = None
    if input_path is not None:
        y = read_vector(input_path, column)
        settings["n"] = len(y)
    elif kind in DATA_CRITERIA:
        raise ValidationError(f"criterion {kind.value} needs --input")

    size = int(settings["n"])
    sigma2 = float(settings["sigma"]) ** 2
    k = get_kernel(settings["kernel"])
    t = get_trend(settings["trend"])
    w = get_weight(settings["weight"])
    is_periodic = bool(settings["periodic"])
    if not is_periodic and w.is_uniform:
        raise ValidationError("non-periodic criteria need a weight vanishing near the boundary (u == 1 refused)")

    grid = make_grid(settings["grid"], size, t, w, k, sigma2, size=int(settings["grid_size"]))
    bank = SmootherBank.for_grid(size, grid.values, k, is_periodic)
    r_true = t.values(make_design(size)) if kind is CriterionKind.ASE else None
    curve = criterion_curve(kind, grid, bank, w, y=y, r_true=r_true, trend=t, sigma2=sigma2,
                            moments=k.moments)
    result = select(curve)

    ext = "csv" if fmt == "csv" else "json"
    path = os.path.join(outdir, f"curve_{kind.value}.{ext}")
    write_table(path, {"h": grid.array, "value": curve.values}, fmt)
    click.echo(f"✓ Wrote {path}", err=True)
    emit_json({**result.to_record(), "n": size, "grid": grid.origin, "curve": path})
