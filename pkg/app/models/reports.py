"""Pydantic models for experiment reports.

Reports are serialised to JSON (``ReportBundle``) and flattened to CSV rows
by ``app.services.report_writer``.
"""

from typing import Any

from pydantic import BaseModel, ConfigDict, Field, field_serializer

FORMAT_VERSION = 1


class CapRow(BaseModel):
    """Empirical versus reference mass of one spherical cap."""

    center: tuple[float, float, float]
    radius: float
    empirical: float = Field(description="Cap weight divided by the normaliser")
    reference: float = Field(description="s times the normalised cap area")
    residual: float


class CellRow(BaseModel):
    """Empirical versus reference mass of one fundamental-domain cell."""

    label: str
    measure: float = Field(description="Normalised hyperbolic measure of the cell")
    empirical: float = Field(description="Cell weight divided by the normaliser")
    reference: float = Field(description="s times the cell measure")
    residual: float
    share: float = Field(description="Cell weight divided by the total weight")


class CheckRow(BaseModel):
    """One exact identity verified by the ``check`` experiment."""

    name: str
    value: str
    expected: str
    passed: bool


class ExperimentReport(BaseModel):
    """Result of one experiment at one word length n."""

    model_config = ConfigDict(populate_by_name=True)

    kind: str
    n: int
    degree: int = Field(description="Normaliser d_n (number of branches)")
    count: int = Field(default=0, description="Number of accumulated points")
    mass: float = Field(description="Total weight divided by the normaliser")
    estimated_s: float
    weyl_rms: list[float] = Field(
        default_factory=list, description="Weyl RMS for degrees l = 1..L"
    )
    caps: list[CapRow] = Field(default_factory=list)
    cells: list[CellRow] = Field(default_factory=list)
    char: list[float] = Field(
        default_factory=list, description="Character averages for l = 1..l_max"
    )
    ratio: str | None = Field(
        default=None, description="Exact weighted fixed-point count over degree"
    )
    weighted_count: str | None = None
    unweighted_count: int | None = None
    decomposition: dict[int, int] | None = None
    checks: list[CheckRow] = Field(default_factory=list)
    flags: list[str] = Field(default_factory=list)
    notes: list[str] = Field(default_factory=list)

    @field_serializer("degree")
    def serialise_degree(self, value: int) -> str:
        """Exact integers are written as decimal strings."""
        return str(value)

    def worst_residual(self) -> float:
        """Largest absolute cap or cell residual (0 when there are none)."""
        residuals = [abs(row.residual) for row in self.caps]
        residuals += [abs(row.residual) for row in self.cells]
        return max(residuals, default=0.0)

    def summary_line(self) -> str:
        """One-line summary of n, degree, point count, mass (or ratio) and residual."""
        mass = self.ratio if self.ratio is not None else f"{self.mass!r}"
        return (
            f"{self.kind} n={self.n} degree={self.degree} points={self.count} "
            f"mass={mass} "
            f"worst_residual={self.worst_residual():.6g}"
        )


class ReportBundle(BaseModel):
    """Everything one invocation wrote: resolved config plus per-n reports."""

    format_version: int = FORMAT_VERSION
    name: str
    config: dict[str, Any]
    notes: list[str] = Field(default_factory=list)
    reports: list[ExperimentReport] = Field(default_factory=list)
