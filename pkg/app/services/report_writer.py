"""Report files: ``<name>.report.json``, ``<name>.report.csv`` and, for Hecke
fixed-point runs, ``<name>.points.csv``.

Exact quantities (degrees, ratios, coordinates) are written as strings.
"""

import csv
import logging
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import TYPE_CHECKING

from app.models.reports import ExperimentReport, ReportBundle

if TYPE_CHECKING:
    from app.services.runner import PointRow

logger = logging.getLogger(__name__)

POINT_COLUMNS = ("n", "level", "t", "a", "b", "c", "x", "y_squared", "weight")


def report_rows(report: ExperimentReport) -> Iterable[tuple[int, str, str]]:
    """Flatten one report into (n, statistic, value) rows."""
    n = report.n
    yield n, "degree", str(report.degree)
    yield n, "count", str(report.count)
    yield n, "mass", repr(report.mass)
    yield n, "estimated_s", repr(report.estimated_s)
    if report.ratio is not None:
        yield n, "ratio", report.ratio
        yield n, "weighted_count", report.weighted_count
        yield n, "unweighted_count", str(report.unweighted_count)
    for level, mult in sorted((report.decomposition or {}).items()):
        yield n, f"multiplicity[{level}]", str(mult)
    for l, value in enumerate(report.weyl_rms, start=1):
        yield n, f"weyl_rms[{l}]", repr(value)
    for l, value in enumerate(report.char, start=1):
        yield n, f"char[{l}]", repr(value)
    for i, cap in enumerate(report.caps):
        yield n, f"cap[{i}].empirical", repr(cap.empirical)
        yield n, f"cap[{i}].reference", repr(cap.reference)
        yield n, f"cap[{i}].residual", repr(cap.residual)
    for cell in report.cells:
        yield n, f"cell[{cell.label}].empirical", repr(cell.empirical)
        yield n, f"cell[{cell.label}].reference", repr(cell.reference)
        yield n, f"cell[{cell.label}].residual", repr(cell.residual)
        yield n, f"cell[{cell.label}].share", repr(cell.share)
    for check in report.checks:
        yield n, f"check[{check.name}]", "pass" if check.passed else "FAIL"
    for flag in report.flags:
        yield n, "flag", flag


def point_row(row: "PointRow") -> tuple:
    """CSV row for an exported fixed point, with exact rational coordinates."""
    fixed = row.fixed
    return (
        row.n,
        row.point.level,
        fixed.trace,
        fixed.form.a,
        fixed.form.b,
        fixed.form.c,
        str(fixed.x),
        str(fixed.y_squared),
        str(row.point.weight),
    )


def write_reports(
    bundle: ReportBundle, output_dir: Path, points: Sequence["PointRow"] = ()
) -> list[Path]:
    """Write the report files of one invocation.

    Args:
        bundle: Reports and resolved configuration.
        output_dir: Directory to write into; created if missing.
        points: Fixed points to export; no points file when empty.

    Returns:
        Paths written, JSON first.
    """
    output_dir.mkdir(parents=True, exist_ok=True)
    json_path = output_dir / f"{bundle.name}.report.json"
    json_path.write_text(bundle.model_dump_json(indent=2), encoding="utf-8")
    paths = [json_path]

    csv_path = output_dir / f"{bundle.name}.report.csv"
    with csv_path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(("n", "statistic", "value"))
        for report in bundle.reports:
            writer.writerows(report_rows(report))
    paths.append(csv_path)

    if points:
        points_path = output_dir / f"{bundle.name}.points.csv"
        with points_path.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(POINT_COLUMNS)
            writer.writerows(point_row(row) for row in points)
        paths.append(points_path)

    logger.info("Wrote %s", ", ".join(str(path) for path in paths))
    return paths
