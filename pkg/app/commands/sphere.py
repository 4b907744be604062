"""Sphere experiments: axes, orbit and characters."""

from collections.abc import Callable

import click

from app.commands.common import common_options, execute
from app.models.experiment import ExperimentKind


def generator_options(command: Callable) -> Callable:
    """Attach the generator and word-length options."""
    options = (
        click.option("--preset", help="Named generator preset (lps5)."),
        click.option("--generators", help="Explicit quaternions 'w x y z; ...'."),
        click.option("--mode", type=click.Choice(["semigroup", "group"])),
        click.option("--n", help="Word length: '4', '10..20' or '10,14,18,20'."),
    )
    for option in reversed(options):
        command = option(command)
    return command


def cap_options(command: Callable) -> Callable:
    """Attach the harmonic degree and cap options."""
    options = (
        click.option("--L", "harmonic_degree", type=int, help="Weyl-sum degree."),
        click.option("--caps", help="Explicit caps 'x y z r; ...'."),
        click.option("--random-caps", type=int, help="Number of seeded random caps."),
        click.option("--seed", type=int, help="Seed for random caps."),
    )
    for option in reversed(options):
        command = option(command)
    return command


@click.command()
@generator_options
@cap_options
@click.option("--identity-tol", type=float, help="Angles at or below are identity.")
@common_options
def axes(**flags) -> None:
    """Isolated fixed points (rotation axes) of the words of length n."""
    execute(ExperimentKind.AXES, **flags)


@click.command()
@generator_options
@cap_options
@click.option("--base-point", help="Orbit base point 'x y z'.")
@common_options
def orbit(**flags) -> None:
    """Orbit of a base point under the words of length n."""
    execute(ExperimentKind.ORBIT, **flags)


@click.command()
@generator_options
@click.option("--l-max", type=int, help="Highest character degree.")
@common_options
def characters(**flags) -> None:
    """Character averages of the words of length n on SO(3)."""
    execute(ExperimentKind.CHARACTERS, **flags)
