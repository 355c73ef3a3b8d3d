"""
Kernel moments command for bandsel.
"""

from typing import Optional

import click

from ..config import resolve_study_settings
from ..kernels import get_kernel
from .common import FORMAT_CHOICE, common_options, emit_json, emit_table, prepare


@click.command("moments")
@common_options
@click.option("--kernel", default=None, help="Kernel name: biweight or triweight (default: biweight)")
@click.option("--format", "fmt", type=FORMAT_CHOICE, default="json", help="Output format (default: json)")
@click.option("--output", default=None, help="Output file (default: stdout)")
def kernel_moments_command(config_file: Optional[str], debug: bool, print_config: bool,
                           kernel: Optional[str], fmt: str, output: Optional[str]):
    """Print the integrals of a kernel used by the bandwidth formulas."""
    config = prepare(config_file, debug)
    settings = resolve_study_settings(config, {"kernel": kernel})
    if print_config:
        emit_json({"kernel": settings["kernel"], "format": fmt, "output": output})
        return

    k = get_kernel(settings["kernel"])
    m = k.moments
    record = {
        "kernel": k.name,
        "half_width": k.half_width,
        "second_moment": m.second_moment,
        "k_sq": m.k_sq,
        "kg_sq": m.kg_sq,
        "kg_sq_half": m.kg_sq_half,
        "k_zero": m.k_zero,
    }
    if fmt == "json":
        emit_json(record, output)
    else:
        emit_table({key: [value] for key, value in record.items()}, output, fmt)
