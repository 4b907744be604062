"""Command-line entry point for the modular correspondence laboratory.

Each subcommand runs one experiment kind for a list of word lengths, writes
JSON and CSV reports and prints one summary line per length.

Exit statuses: 0 on success, 2 for an invalid configuration, 3 when a budget
is exceeded, 1 for anything else (including failed exact checks).
"""

import logging
import sys

import click

from app.commands import check, hecke, sphere
from app.config import get_settings
from app.errors import BudgetExceededError, ConfigError, LabError

logger = logging.getLogger(__name__)

EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_BUDGET = 3


class LabGroup(click.Group):
    """Command group mapping laboratory exceptions onto exit statuses."""

    def invoke(self, ctx: click.Context):
        try:
            return super().invoke(ctx)
        except ConfigError as e:
            field = f" [{e.field}]" if e.field else ""
            click.echo(f"Configuration error{field}: {e}", err=True)
            sys.exit(EXIT_CONFIG)
        except BudgetExceededError as e:
            click.echo(f"Budget exceeded: {e}", err=True)
            sys.exit(EXIT_BUDGET)
        except LabError as e:
            logger.error("Experiment failed: %s", e, exc_info=True)
            click.echo(f"Error: {e}", err=True)
            sys.exit(EXIT_FAILURE)


@click.group(cls=LabGroup)
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
    help="Override MODCORR_LOG_LEVEL.",
)
def cli(log_level: str | None) -> None:
    """Equidistribution experiments for modular correspondences."""
    get_settings().configure_logging(log_level)


# Register commands
cli.add_command(sphere.axes)
cli.add_command(sphere.orbit)
cli.add_command(sphere.characters)
cli.add_command(hecke.hecke_fix)
cli.add_command(hecke.hecke_orbit)
cli.add_command(check.check)


if __name__ == "__main__":
    cli()  # pylint: disable=no-value-for-parameter
