"""
Monte Carlo study command for bandsel.
"""

from typing import Optional, Tuple

import click

from ..config import resolve_study_settings
from ..montecarlo import AlphaSummary, StudyConfig, run_study, write_study_outputs
from ..utils import resolve_output_dir
from .common import FORMAT_CHOICE, common_options, emit_json, prepare


def _parse_alphas(value: Optional[str]) -> Optional[Tuple[float, ...]]:
    if value is None:
        return None
    try:
        return tuple(float(part) for part in value.split(",") if part.strip())
    except ValueError:
        raise click.BadParameter(f"expected comma-separated numbers, got '{value}'", param_hint="--alphas")


@click.command("study")
@common_options
@click.option("--n", "n", type=int, default=None, help="Sample size (default: 512; the reference study also uses 4096 and 32768)")
@click.option("--alphas", default=None,
              help="Comma-separated ARCH persistences (default: 0.01,0.162,0.577,0.75,0.9,0.98)")
@click.option("--sigma", type=float, default=None, help="Noise standard deviation (default: 0.32)")
@click.option("--replicates", type=int, default=None, help="Replicates per alpha (default: 100)")
@click.option("--seed", type=int, default=None, help="Base seed of all replicate streams (default: 12345)")
@click.option("--grid", "grid_kind", type=click.Choice(["auto", "fixed"]), default=None,
              help="auto: geometric grid around h_n*; fixed: the domain [0.019, 1.30] clamped below 1/2")
@click.option("--grid-size", type=int, default=None, help="Number of bandwidths (default: 200)")
@click.option("--kernel", default=None, help="Kernel name (default: biweight)")
@click.option("--trend", default=None, help="Trend name (default: benchmark)")
@click.option("--weight", default=None, help="Weight function (default: uniform)")
@click.option("--periodic/--no-periodic", default=None, help="Circular design distances (default: periodic)")
@click.option("--iid", is_flag=True, default=None, help="Use i.i.d. Gaussian noise instead of ARCH(1)")
@click.option("--store-curves/--no-store-curves", default=None,
              help="Write every replicate's ASE and centred CL curve")
@click.option("--threads", type=int, default=None, help="Worker processes, -1 for all cores (default: 1)")
@click.option("--boxplot-points", type=int, default=None, help="Grid bandwidths carrying boxplots (default: 21)")
@click.option("--output-dir", default=None, help="Output directory (default: $BANDSEL_OUTPUT_DIR or bandsel_output)")
@click.option("--format", "fmt", type=FORMAT_CHOICE, default="csv", help="Table format (default: csv)")
def study_command(config_file: Optional[str], debug: bool, print_config: bool, n: Optional[int],
                  alphas: Optional[str], sigma: Optional[float], replicates: Optional[int],
                  seed: Optional[int], grid_kind: Optional[str], grid_size: Optional[int],
                  kernel: Optional[str], trend: Optional[str], weight: Optional[str],
                  periodic: Optional[bool], iid: Optional[bool], store_curves: Optional[bool],
                  threads: Optional[int], boxplot_points: Optional[int], output_dir: Optional[str],
                  fmt: str):
    """Run the seeded Monte Carlo study and write its tables."""
    config = prepare(config_file, debug)
    settings = resolve_study_settings(config, {
        "n": n, "alphas": _parse_alphas(alphas), "sigma": sigma, "replicates": replicates,
        "seed": seed, "grid": grid_kind, "grid_size": grid_size, "kernel": kernel, "trend": trend,
        "weight": weight, "periodic": periodic, "iid": iid, "store_curves": store_curves,
        "threads": threads, "boxplot_points": boxplot_points,
    })
    outdir = resolve_output_dir(output_dir, (config.get("output") or {}).get("directory"))

    cfg = StudyConfig.from_mapping(settings)
    if print_config:
        emit_json({**cfg.to_mapping(), "output_dir": outdir, "format": fmt})
        return

    def report(cell: AlphaSummary):
        ks = "n/a" if cell.ks is None else f"{cell.ks:.4f}"
        click.echo(f"✓ alpha={cell.alpha:g}: mean h_CL/h_ASE={cell.ratio_cl_ase_mean:.4f}, "
                   f"gap sd={cell.gap_sd:.5f}, KS={ks}")

    click.echo(f"Running {cfg.replicates} replicates x {len(cfg.alphas)} alphas at n={cfg.n} "
               f"on {len(cfg.grid)} bandwidths")
    summary = run_study(cfg, progress=report)
    written = write_study_outputs(summary, outdir, fmt)
    click.echo(f"✓ Wrote {len(written)} files to {outdir}")
