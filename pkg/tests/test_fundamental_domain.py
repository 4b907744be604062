"""Tests for reduction to F and cell statistics."""

import math
import random

import pytest

from app.errors import CellPartitionError, FundamentalDomainError
from app.models.arithmetic import FundDomainCell, WeightedPoint
from app.services import fundamental_domain as fd


@pytest.mark.parametrize(
    "z, expected",
    [
        (1 + 1j, 1j),
        ((1 + 1j) / 2, 1j),
        (0.3 + 2j, 0.3 + 2j),
        ((1 + 2j) / 2, -0.5 + 1j),
        (4j, 4j),
    ],
)
def test_reduce_to_F_examples(z, expected):
    """Translation and inversion land in F with the half-open convention."""
    assert fd.reduce_to_F(z) == pytest.approx(expected, abs=1e-12)


def test_reduce_to_F_lands_in_F():
    """Random points of the upper half-plane reduce into F."""
    rng = random.Random(5)
    for _ in range(500):
        z = complex(rng.uniform(-10, 10), rng.uniform(0.01, 3))
        w = fd.reduce_to_F(z)
        assert -0.5 <= w.real < 0.5
        assert abs(w) >= 1 - 1e-12


def test_reduce_to_F_rejects_real_axis():
    """Points with Im z <= 1e-12 are refused."""
    with pytest.raises(FundamentalDomainError):
        fd.reduce_to_F(0.5 + 0j)


def test_reduce_to_F_step_guard(budget_env):
    """Running out of steps is an error."""
    budget_env("reduction_steps", 1)
    with pytest.raises(FundamentalDomainError):
        fd.reduce_to_F(0.5 + 0.5j)


def test_cell_measures():
    """Closed-form hyperbolic measures."""
    assert fd.cell_measure(FundDomainCell(y1=2.0)) == pytest.approx(3 / (2 * math.pi))
    assert fd.cell_measure(FundDomainCell(0.0, 0.5, 1.0, 2.0)) == pytest.approx(
        3 / (4 * math.pi)
    )
    assert fd.cell_measure(FundDomainCell.whole_domain()) == 1.0
    upper = fd.cell_measure(FundDomainCell())
    residual = fd.cell_measure(FundDomainCell.residual_cell())
    assert upper + residual == pytest.approx(1.0)


def test_cell_validation():
    """Rectangles must sit inside F above y = 1."""
    with pytest.raises(ValueError):
        FundDomainCell(-0.6, 0.5, 1.0, 2.0)
    with pytest.raises(ValueError):
        FundDomainCell(y1=0.9)


def test_default_grid_partitions_F():
    """Four x-quarters of 1 <= y < 2, the cap y >= 2 and the residual cell."""
    cells = fd.cell_grid(4, (1.0, 2.0))
    assert len(cells) == 6
    assert sum(fd.cell_measure(cell) for cell in cells) == pytest.approx(1.0)
    fd.validate_partition(cells)


def test_partition_errors():
    """Overlaps, gaps and a missing residual cell are rejected."""
    residual = FundDomainCell.residual_cell()
    with pytest.raises(CellPartitionError):
        fd.validate_partition([FundDomainCell(), FundDomainCell(y1=2.0), residual])
    with pytest.raises(CellPartitionError):
        fd.validate_partition([FundDomainCell(y1=2.0), residual])
    with pytest.raises(CellPartitionError):
        fd.validate_partition([FundDomainCell()])
    with pytest.raises(CellPartitionError):
        fd.validate_partition([FundDomainCell.whole_domain(), residual])


def test_cell_report_whole_domain():
    """A probability measure on the single cell F matches measure 1."""
    rows = fd.cell_report(
        [WeightedPoint(1j, 1)], [FundDomainCell.whole_domain()], 1, 1.0
    )
    assert rows[0].empirical == 1.0
    assert rows[0].reference == 1.0
    assert rows[0].share == 1.0


def test_cell_report_empty():
    """No points give an all-zero empirical column."""
    rows = fd.cell_report([], fd.cell_grid(), 10, 2.0)
    assert all(row.empirical == 0.0 and row.share == 0.0 for row in rows)
    assert all(row.residual == -row.reference for row in rows)


def test_cell_report_assigns_points():
    """Weights land in the cell containing each point; Re z = -1/2 is shared."""
    points = [
        WeightedPoint(-0.5 + 1j, 1),
        WeightedPoint(0.1 + 3j, 2),
        WeightedPoint(0.4 + 0.95j, 1),
    ]
    rows = fd.cell_report(points, fd.cell_grid(), 4, 1.0)
    by_label = {row.label: row for row in rows}
    assert by_label["x[-0.5,-0.25) y[1,2)"].empirical == 0.125
    assert by_label["x[0.25,0.5) y[1,2)"].empirical == 0.125
    assert by_label["x[-0.5,0.5) y[2,inf)"].empirical == 0.5
    assert by_label["F & y<1"].share == 0.25


def test_cell_report_splits_mirror_line():
    """A point on Re z = 0 counts half in each neighbouring quarter."""
    rows = fd.cell_report([WeightedPoint(1.5j, 2)], fd.cell_grid(), 2, 1.0)
    by_label = {row.label: row for row in rows}
    assert by_label["x[-0.25,0) y[1,2)"].empirical == 0.5
    assert by_label["x[0,0.25) y[1,2)"].empirical == 0.5
    assert sum(row.share for row in rows) == pytest.approx(1.0)


def test_cell_report_snaps_unit_circle_upwards():
    """A point a rounding error below y = 1 is counted above it."""
    rows = fd.cell_report(
        [WeightedPoint(complex(0.1, 1.0 - 1e-13), 1)], fd.cell_grid(), 1, 1.0
    )
    by_label = {row.label: row for row in rows}
    assert by_label["x[0,0.25) y[1,2)"].empirical == 1.0
    assert by_label["F & y<1"].empirical == 0.0


def test_reduce_to_F_snaps_right_edge():
    """Re z a rounding error below 1/2 is taken to the left edge."""
    w = fd.reduce_to_F(complex(0.5 - 1e-13, 2.0))
    assert w.real == -0.5
    assert w.imag == 2.0


@pytest.mark.parametrize(
    "z",
    [
        complex(0.28, 0.96 - 1e-13),
        complex(0.28, 0.96 + 1e-13),
        complex(-0.28, 0.96),
        complex(0.5, math.sqrt(3) / 2),
    ],
)
def test_reduce_to_F_settles_on_unit_circle(z):
    """Points within rounding of |z| = 1 land on the left half of the arc."""
    w = fd.reduce_to_F(z)
    assert -0.5 <= w.real <= 0.0
    assert abs(w) == pytest.approx(1.0, abs=1e-9)
