"""
pelflow command-line application.
"""
import logging
import sys
from typing import List, Optional

import click
from pydantic import ValidationError

from . import __version__
from .api.compare import compare_command
from .api.estimate import estimate_command
from .api.masks import masks_group
from .api.metrics import metrics_command
from .api.synth import synth_command
from .core.config import settings
from .core.errors import PelFlowError
from .schemas.run import RunConfig

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


@click.group()
@click.version_option(__version__, prog_name="pelflow")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              help="Replay a run.cfg sidecar; flags given on the command line still win")
@click.option("--log-level", type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"]), default=None,
              help="Override PELFLOW_LOG_LEVEL")
@click.pass_context
def cli(ctx: click.Context, config_path: Optional[str], log_level: Optional[str]):
    """Regularized pel-recursive optical flow with GCV-selected regularization."""
    if log_level:
        logging.getLogger().setLevel(log_level)
    if config_path:
        run = RunConfig.read(config_path)
        if ctx.invoked_subcommand and ctx.invoked_subcommand != run.command:
            raise click.UsageError(f"{config_path} records '{run.command}', not '{ctx.invoked_subcommand}'")
        ctx.default_map = run.default_map()
        logger.info(f"Replaying {run.command} from {config_path}")


# Include commands
cli.add_command(synth_command)
cli.add_command(estimate_command)
cli.add_command(metrics_command)
cli.add_command(compare_command)
cli.add_command(masks_group)


def main(argv: Optional[List[str]] = None) -> int:
    """Run the CLI and map failures to exit codes: 1 usage, 2 data, 3 numeric."""
    logging.basicConfig(level=settings.LOG_LEVEL, format="%(levelname)s %(name)s: %(message)s")
    try:
        result = cli.main(args=argv, prog_name="pelflow", standalone_mode=False)
        return result if isinstance(result, int) else EXIT_OK
    except click.exceptions.Exit as e:
        return e.exit_code
    except (click.UsageError, click.Abort) as e:
        if isinstance(e, click.UsageError):
            e.show()
        return EXIT_USAGE
    except ValidationError as e:
        click.echo(f"Error: invalid parameters\n{e}", err=True)
        return EXIT_USAGE
    except PelFlowError as e:
        logger.error(f"{type(e).__name__}: {e}")
        click.echo(f"Error: {e}", err=True)
        return e.exit_code
    except OSError as e:
        logger.error(f"I/O error: {e}")
        click.echo(f"Error: {e}", err=True)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
