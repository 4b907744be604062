"""Fundamental domain F of PSL(2,Z) and cell statistics against hyperbolic measure.

F = {|Re z| <= 1/2, |z| >= 1} with the boundary convention Re z in [-1/2, 1/2)
and Re z <= 0 on the unit circle. The reference measure is the normalised
hyperbolic area (3/pi) dx dy / y^2, of total mass 1 on F.
"""

import logging
import math
from collections.abc import Sequence

from app.config import get_settings
from app.errors import CellPartitionError, FundamentalDomainError
from app.models.arithmetic import FundDomainCell, WeightedPoint
from app.models.reports import CellRow

logger = logging.getLogger(__name__)

MIN_IMAGINARY = 1e-12
AREA_FACTOR = 3.0 / math.pi
_MEASURE_TOL = 1e-9
EDGE_TOL = 1e-9


def _translate(z: complex) -> complex:
    x = z.real - math.floor(z.real + 0.5 + EDGE_TOL)
    return complex(max(x, -0.5), z.imag)


def reduce_to_F(z: complex) -> complex:  # pylint: disable=invalid-name
    """Gamma-equivalent point of ``z`` in F.

    Alternates the translation Re z -> [-1/2, 1/2) with the inversion
    z -> -1/z while |z| < 1; a point on the unit circle with Re z > 0 is
    mirrored to Re z < 0. Both boundary tests allow ``EDGE_TOL`` of rounding,
    so Re z within it of 1/2 becomes -1/2 and |z| within it of 1 counts as
    on the circle.

    Raises:
        FundamentalDomainError: If Im z <= 1e-12 or the step guard is hit.
    """
    if not z.imag > MIN_IMAGINARY:
        raise FundamentalDomainError(f"{z} is not in the upper half-plane")
    max_steps = get_settings().budgets.reduction_steps
    for _ in range(max_steps):
        z = _translate(z)
        norm = z.real * z.real + z.imag * z.imag
        if norm < 1.0 - EDGE_TOL:
            z = -1.0 / z
            continue
        if norm <= 1.0 + EDGE_TOL and z.real > 0.0:
            z = complex(-z.real, z.imag)
        return z
    raise FundamentalDomainError(f"Reduction of {z} exceeded {max_steps} steps")


def in_closed_fundamental_domain(x_num: int, y_sq_num: int, denom: int) -> bool:
    """Exact membership of (x_num + i sqrt(y_sq_num)) / denom in the closed F."""
    return 2 * abs(x_num) <= denom and x_num * x_num + y_sq_num >= denom * denom


def cell_grid(
    x_bins: int = 4, y_breaks: Sequence[float] = (1.0, 2.0)
) -> list[FundDomainCell]:
    """Partition of F into rectangles above y = 1 plus the residual cell.

    Each band [y_i, y_{i+1}) is split into ``x_bins`` equal x-intervals; the
    top band [y_last, inf) is one full-width cell.
    """
    if x_bins < 1:
        raise ValueError(f"x_bins must be positive, got {x_bins}")
    breaks = sorted({1.0, *(float(y) for y in y_breaks)})
    if breaks[0] < 1.0:
        raise ValueError(f"y-breaks must be >= 1, got {breaks[0]}")

    width = 1.0 / x_bins
    edges = [-0.5 + k * width for k in range(x_bins)] + [0.5]
    cells = [
        FundDomainCell(edges[k], edges[k + 1], low, high)
        for low, high in zip(breaks, breaks[1:])
        for k in range(x_bins)
    ]
    cells.append(FundDomainCell(y1=breaks[-1]))
    cells.append(FundDomainCell.residual_cell())
    return cells


def cell_measure(cell: FundDomainCell) -> float:
    """Normalised hyperbolic measure of a cell."""
    if cell.whole:
        return 1.0
    if cell.residual:
        return 1.0 - AREA_FACTOR
    return AREA_FACTOR * (cell.x2 - cell.x1) * (1.0 / cell.y1 - 1.0 / cell.y2)


def _overlap(c1: FundDomainCell, c2: FundDomainCell) -> bool:
    return (
        c1.x1 < c2.x2 and c2.x1 < c1.x2 and c1.y1 < c2.y2 and c2.y1 < c1.y2
    )


def validate_partition(cells: Sequence[FundDomainCell]) -> None:
    """Check that the cells are disjoint and cover F.

    Raises:
        CellPartitionError: Otherwise.
    """
    if not cells:
        raise CellPartitionError("No cells given")
    if any(cell.whole for cell in cells):
        if len(cells) != 1:
            raise CellPartitionError("The whole-domain cell must stand alone")
        return
    residuals = [cell for cell in cells if cell.residual]
    if len(residuals) != 1:
        raise CellPartitionError(f"Expected one residual cell, got {len(residuals)}")

    rectangles = [cell for cell in cells if not cell.residual]
    for i, first in enumerate(rectangles):
        for second in rectangles[i + 1 :]:
            if _overlap(first, second):
                raise CellPartitionError(
                    f"Cells {first.label} and {second.label} overlap"
                )

    total = sum(cell_measure(cell) for cell in cells)
    if abs(total - 1.0) > _MEASURE_TOL:
        raise CellPartitionError(f"Cells cover measure {total!r}, not 1")


def _wrapped_distance(x: float, edge: float) -> float:
    """Distance from x to a vertical edge, with Re z = -1/2 and 1/2 identified."""
    return abs((x - edge + 0.5) % 1.0 - 0.5)


def _member(cell: FundDomainCell, z: complex) -> bool:
    if cell.whole:
        return True
    y = z.imag + EDGE_TOL
    if cell.residual:
        return y < 1.0
    if not cell.y1 <= y < cell.y2:
        return False
    if cell.x1 <= z.real < cell.x2:
        return True
    return (
        _wrapped_distance(z.real, cell.x1) <= EDGE_TOL
        or _wrapped_distance(z.real, cell.x2) <= EDGE_TOL
    )


def cell_report(
    points: Sequence[WeightedPoint],
    cells: Sequence[FundDomainCell],
    normalizer: int,
    s: float,
) -> list[CellRow]:
    """Empirical weight per cell against s times its measure.

    A point on a vertical edge shared by two cells (within ``EDGE_TOL``, with
    the sides Re z = -1/2 and 1/2 identified) puts half its weight in each.
    Horizontal edges follow the half-open rule.

    Args:
        points: Weighted points already in F.
        cells: A partition of F.
        normalizer: Divisor for the empirical column (the degree d_n).
        s: Expected mass of the limit (2 for fixed points, 1 for orbits).

    Returns:
        One row per cell, in the order given.

    Raises:
        CellPartitionError: If the cells do not partition F or miss a point.
    """
    validate_partition(cells)
    weights = [0.0] * len(cells)
    for point in points:
        members = [i for i, cell in enumerate(cells) if _member(cell, point.z)]
        if not members:
            raise CellPartitionError(f"Point {point.z} lies in no cell")
        share = float(point.weight) / len(members)
        for index in members:
            weights[index] += share

    total = sum(weights)
    rows = []
    for cell, weight in zip(cells, weights):
        measure = cell_measure(cell)
        empirical = weight / normalizer
        reference = s * measure
        rows.append(
            CellRow(
                label=cell.label,
                measure=measure,
                empirical=empirical,
                reference=reference,
                residual=empirical - reference,
                share=weight / total if total else 0.0,
            )
        )
    return rows
