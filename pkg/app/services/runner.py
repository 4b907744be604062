"""Experiment runner: one validated config in, reports and files out."""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from app.models.arithmetic import (
    DecompositionMethod,
    EllipticFixedPoint,
    WeightedPoint,
    level_degree,
)
from app.models.experiment import ExperimentConfig, ExperimentKind
from app.models.geometry import Cap, GeneratorMode, SpherePoint, UnitQuaternion
from app.models.reports import CheckRow, ExperimentReport, ReportBundle
from app.services import (
    forms,
    fundamental_domain,
    hecke,
    report_writer,
    sphstat,
    words,
)
from app.services.words import GeneratorSystem

logger = logging.getLogger(__name__)

EXHAUSTIVE_CHECK_MAX_N = 6
EXHAUSTIVE_CHECK_WORDS = 10**5


@dataclass
class RunOutcome:
    """Reports of one invocation and the files written for them."""

    bundle: ReportBundle
    paths: list[Path] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        """False if any exact check failed."""
        reports = self.bundle.reports
        return all(row.passed for report in reports for row in report.checks)


@dataclass
class PointRow:
    """One exported fixed point of a Hecke iterate."""

    n: int
    point: WeightedPoint

    @property
    def fixed(self) -> EllipticFixedPoint:
        return self.point.source


def build_system(config: ExperimentConfig) -> GeneratorSystem:
    """Generator system named by the preset or listed explicitly."""
    if config.preset is not None:
        return words.lps_system(config.mode)
    generators = [UnitQuaternion.from_components(*q) for q in config.generators]
    if config.mode is GeneratorMode.GROUP:
        return words.group_closure(generators)
    return GeneratorSystem(tuple(generators), config.mode)


def build_caps(config: ExperimentConfig) -> list[Cap]:
    """Explicit caps or the default set, plus any seeded random caps."""
    if config.caps is None:
        caps = sphstat.default_caps()
    else:
        caps = [Cap(SpherePoint.from_vector(x, y, z), r) for x, y, z, r in config.caps]
    if config.random_caps:
        caps += sphstat.random_caps(config.random_caps, config.seed)
    return caps


def _sphere_reports(config: ExperimentConfig) -> list[ExperimentReport]:
    system = build_system(config)
    options = {"depth": config.depth, "threads": config.threads}
    reports = []
    for n in config.n:
        if config.kind is ExperimentKind.AXES:
            report = sphstat.axis_experiment(
                system,
                n,
                config.harmonic_degree,
                build_caps(config),
                identity_tol=config.identity_tol,
                **options,
            )
        elif config.kind is ExperimentKind.ORBIT:
            report = sphstat.orbit_experiment(
                system,
                SpherePoint.from_vector(*config.base_point),
                n,
                config.harmonic_degree,
                build_caps(config),
                **options,
            )
        else:
            report = sphstat.character_experiment(system, n, config.l_max, **options)
        reports.append(report)
    return reports


def _hecke_fix_reports(
    config: ExperimentConfig, point_rows: list[PointRow]
) -> list[ExperimentReport]:
    cells = fundamental_domain.cell_grid(config.x_bins, config.y_breaks)
    reports = []
    for n in config.n:
        points, ratio, decomposition = hecke.fixed_point_measure(
            config.p, n, config.method
        )
        degree = (config.p + 1) ** n
        incidences = sum(
            decomposition.multiplicities[point.level] for point in points
        )
        point_rows.extend(PointRow(n, point) for point in points)
        reports.append(
            ExperimentReport(
                kind=config.kind.value,
                n=n,
                degree=degree,
                count=len(points),
                mass=float(ratio),
                estimated_s=float(ratio),
                cells=fundamental_domain.cell_report(points, cells, degree, 2.0),
                ratio=str(ratio),
                weighted_count=str(ratio * degree),
                unweighted_count=incidences,
                decomposition=decomposition.multiplicities,
                notes=[hecke.TORSION_NOTE],
            )
        )
    return reports


def _hecke_orbit_reports(config: ExperimentConfig) -> list[ExperimentReport]:
    cells = fundamental_domain.cell_grid(config.x_bins, config.y_breaks)
    reports = []
    for n in config.n:
        points = hecke.hecke_orbit(config.p, n, config.start_point)
        degree = (config.p + 1) ** n
        total = sum(point.weight for point in points)
        reports.append(
            ExperimentReport(
                kind=config.kind.value,
                n=n,
                degree=degree,
                count=len(points),
                mass=total / degree,
                estimated_s=total / degree,
                cells=fundamental_domain.cell_report(points, cells, degree, 1.0),
                notes=[hecke.TORSION_NOTE],
            )
        )
    return reports


def level_oracle(n: int) -> Fraction:
    """Weighted elliptic count at determinant N from the class-number relation.

    Sum over t^2 < 4N of H(4N - t^2); the two t^2 = 4N terms of the relation
    contribute 2 H(0) = -1/6 when N is a square.
    """
    square = math.isqrt(n) ** 2 == n
    return divisor_oracle(n) + (Fraction(1, 6) if square else 0)


def divisor_oracle(n: int) -> Fraction:
    """sum over d | N of max(d, N/d) as a rational."""
    return Fraction(forms.divisor_side(n))


def primitive_level_oracle(p: int, j: int) -> Fraction:
    """Oracle for level j.

    Matrices of determinant p^j whose content is divisible by p are p times a
    matrix of determinant p^(j-2).
    """
    total = level_oracle(p**j)
    if j >= 2:
        total -= level_oracle(p ** (j - 2))
    return total


def _check_report(config: ExperimentConfig) -> ExperimentReport:
    checks = []
    table = forms.hurwitz_twelfths(4 * config.hurwitz_max)
    for n in range(1, config.hurwitz_max + 1):
        residual = forms.class_relation_check(n, table)
        checks.append(
            CheckRow(
                name=f"relation N={n}",
                value=str(residual),
                expected="0",
                passed=residual == 0,
            )
        )

    p = config.p
    top_ratio = 0.0
    for j in range(1, config.levels + 1):
        count = forms.weighted_count(hecke.level_fixed_points(p, j))
        expected = primitive_level_oracle(p, j)
        top_ratio = float(count / level_degree(p, j))
        checks.append(
            CheckRow(
                name=f"level p^{j} count (count/deg = {count / level_degree(p, j)})",
                value=str(count),
                expected=str(expected),
                passed=count == expected,
            )
        )

    for n in range(1, EXHAUSTIVE_CHECK_MAX_N + 1):
        if (p + 1) ** n > EXHAUSTIVE_CHECK_WORDS:
            break
        composed = hecke.power_decomposition(p, n, DecompositionMethod.COMPOSED)
        exhaustive = hecke.power_decomposition(p, n, DecompositionMethod.EXHAUSTIVE)
        checks.append(
            CheckRow(
                name=f"decomposition n={n}",
                value=str(composed.multiplicities),
                expected=str(exhaustive.multiplicities),
                passed=composed.multiplicities == exhaustive.multiplicities,
            )
        )

    failed = sum(not row.passed for row in checks)
    if failed:
        logger.error("%d of %d checks failed", failed, len(checks))
    return ExperimentReport(
        kind=config.kind.value,
        n=config.levels,
        degree=level_degree(p, config.levels),
        count=len(checks),
        mass=0.0,
        estimated_s=top_ratio,
        checks=checks,
        notes=[hecke.TORSION_NOTE],
    )


def run(config: ExperimentConfig, write: bool = True) -> RunOutcome:
    """Execute the configured experiment for every n and write its reports.

    Args:
        config: Validated configuration.
        write: Whether to write report files under ``config.output_dir``.

    Returns:
        The report bundle and the paths written.
    """
    logger.info("Running %s (%s)", config.name, config.kind.value)
    point_rows: list[PointRow] = []
    if config.kind.is_sphere:
        reports = _sphere_reports(config)
    elif config.kind is ExperimentKind.HECKE_FIX:
        reports = _hecke_fix_reports(config, point_rows)
    elif config.kind is ExperimentKind.HECKE_ORBIT:
        reports = _hecke_orbit_reports(config)
    else:
        reports = [_check_report(config)]

    notes = [hecke.TORSION_NOTE] if not config.kind.is_sphere else []
    bundle = ReportBundle(
        name=config.name, config=config.as_record(), notes=notes, reports=reports
    )
    outcome = RunOutcome(bundle)
    if write:
        outcome.paths = report_writer.write_reports(
            bundle, config.output_dir, point_rows
        )
    return outcome
