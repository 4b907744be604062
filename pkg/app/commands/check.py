"""Exact oracle checks."""

import click

from app.commands.common import common_options, execute
from app.models.experiment import ExperimentKind


@click.command()
@click.option("--hurwitz-max", type=int, help="Check the relation for N = 1..max.")
@click.option("--levels", type=int, help="Levels p^j of the count table.")
@click.option("--p", type=int, help="Prime for the level table.")
@common_options
def check(**flags) -> None:
    """Class-number relation, per-level counts and decomposition agreement."""
    execute(ExperimentKind.CHECK, **flags)
