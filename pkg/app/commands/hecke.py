"""Hecke experiments on the modular surface: hecke-fix and hecke-orbit."""

from collections.abc import Callable

import click

from app.commands.common import common_options, execute
from app.models.experiment import ExperimentKind


def hecke_options(command: Callable) -> Callable:
    """Attach the prime, word length and cell-grid options."""
    options = (
        click.option("--p", type=int, help="Prime of T_p (2, 3, 5, 7 or 11)."),
        click.option("--n", help="Iterate: '3', '1..7' or '1,3,5'."),
        click.option("--x-bins", type=int, help="Cells per band in x."),
        click.option("--y-breaks", help="Band edges in y, e.g. '1 2'."),
    )
    for option in reversed(options):
        command = option(command)
    return command


@click.command("hecke-fix")
@hecke_options
@click.option("--method", type=click.Choice(["composed", "exhaustive"]))
@common_options
def hecke_fix(**flags) -> None:
    """Isolated fixed points of T_p^n with the exact ratio to the degree."""
    execute(ExperimentKind.HECKE_FIX, **flags)


@click.command("hecke-orbit")
@hecke_options
@click.option("--z0", help="Start point, e.g. '2i' or '0.3+2i'.")
@common_options
def hecke_orbit(**flags) -> None:
    """Image of a point under T_p^n, reduced to the fundamental domain."""
    execute(ExperimentKind.HECKE_ORBIT, **flags)
