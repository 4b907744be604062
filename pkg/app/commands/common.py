"""Options shared by every subcommand and the run-and-report step."""

import logging
from collections.abc import Callable
from pathlib import Path
from typing import Any

import click

from app.config import load_config_file
from app.errors import CheckFailedError
from app.models.experiment import ExperimentConfig, ExperimentKind
from app.services import runner

logger = logging.getLogger(__name__)


def common_options(command: Callable) -> Callable:
    """Attach --config, --name, --output-dir, --threads and --depth."""
    options = (
        click.option(
            "--config",
            "config_path",
            type=click.Path(exists=True, dir_okay=False, path_type=Path),
            help="Flat 'key = value' experiment file; flags override its keys.",
        ),
        click.option("--name", help="Report file stem (default: the experiment kind)."),
        click.option("--output-dir", help="Directory for report files."),
        click.option("--threads", type=int, help="Worker threads (default 1)."),
        click.option("--depth", type=int, help="Prefix depth for task partitioning."),
    )
    for option in reversed(options):
        command = option(command)
    return command


def execute(kind: ExperimentKind, config_path: Path | None, **flags: Any) -> None:
    """Resolve the configuration, run it and echo one summary line per n.

    Raises:
        ConfigError: For an invalid configuration.
        CheckFailedError: If any exact check failed.
    """
    file_values = load_config_file(config_path) if config_path else {}
    file_kind = file_values.pop("kind", kind.value)
    if file_kind != kind.value:
        logger.warning("Config file kind %r ignored by %s", file_kind, kind.value)
    config = ExperimentConfig.from_sources(file_values, {"kind": kind, **flags})

    outcome = runner.run(config)
    for report in outcome.bundle.reports:
        click.echo(report.summary_line())
        if report.checks:
            passed = sum(row.passed for row in report.checks)
            click.echo(f"{passed}/{len(report.checks)} checks passed")
    for path in outcome.paths:
        click.echo(f"wrote {path}")
    if not outcome.passed:
        raise CheckFailedError("Some exact checks failed; see the report")
