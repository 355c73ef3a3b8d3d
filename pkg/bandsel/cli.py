"""
Command-line interface for bandsel.

Exit codes: 0 on success, 1 for runtime failures, 2 for usage errors and 3
for invalid values. Every failure prints one JSON line on stderr.
"""

import json
import logging
import sys
from typing import Optional, Sequence

import click

from . import __version__
from .commands.init import init_config
from .commands.moments import kernel_moments_command
from .commands.quadform import quadform_command
from .commands.select import select_command
from .commands.simulate import simulate_command
from .commands.smooth import smooth_command
from .commands.study import study_command
from .commands.theory import theory_command
from .errors import BandselError

logger = logging.getLogger(__name__)


@click.group()
@click.version_option(version=__version__, prog_name="bandsel")
def cli():
    """bandsel - kernel trend estimation and CL bandwidth selection under MDS noise."""
    pass


# Register all commands
cli.add_command(init_config)
cli.add_command(kernel_moments_command)
cli.add_command(smooth_command)
cli.add_command(select_command)
cli.add_command(theory_command)
cli.add_command(simulate_command)
cli.add_command(study_command)
cli.add_command(quadform_command)


def report_error(kind: str, exit_code: int, message: str) -> None:
    click.echo(json.dumps({"error": kind, "exit_code": exit_code, "message": message}), err=True)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse argv, dispatch to a command and map failures onto exit codes.

    Args:
        argv: Arguments without the program name (default: sys.argv[1:])

    Returns:
        Process exit status
    """
    args = list(sys.argv[1:] if argv is None else argv)
    try:
        result = cli.main(args=args, prog_name="bandsel", standalone_mode=False)
    except click.UsageError as e:
        report_error("usage", 2, e.format_message())
        return 2
    except click.ClickException as e:
        report_error("usage", e.exit_code, e.format_message())
        return e.exit_code
    except click.Abort:
        report_error("aborted", 1, "aborted")
        return 1
    except BandselError as e:
        report_error(e.kind, e.exit_code, str(e))
        return e.exit_code
    except Exception as e:
        logger.debug("Unhandled failure", exc_info=True)
        report_error("runtime", 1, f"{type(e).__name__}: {e}")
        return 1
    # --help and --version return their exit code in non-standalone mode
    return result if isinstance(result, int) else 0


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
