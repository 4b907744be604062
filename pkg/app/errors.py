"""Exception hierarchy shared by the services and the experiment runner.

The CLI maps these onto exit statuses: configuration problems exit with 2,
exhausted budgets with 3, everything else with 1.
"""


class LabError(Exception):
    """Base class for all laboratory errors."""


class ConfigError(LabError):
    """Raised when an experiment configuration is invalid.

    Attributes:
        field: Name of the offending configuration key, if known.
    """

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class BudgetExceededError(LabError):
    """Raised when a run would exceed a configured enumeration budget."""


class InternalInconsistencyError(LabError):
    """Raised when a computed quantity contradicts an invariant it must satisfy."""


class WordCountOverflowError(LabError):
    """Raised when a word count does not fit in a signed 64-bit integer."""


class PartitionError(LabError):
    """Raised for an invalid prefix partition (depth or task index)."""


class AccumulatorConfigError(LabError):
    """Raised when merging accumulators with different configurations."""


class EmptyAccumulatorError(LabError):
    """Raised when a statistic is requested from an accumulator with no mass."""


class NonPrimeError(LabError):
    """Raised when a Hecke correspondence is requested for a non-prime."""


class RegularityError(InternalInconsistencyError):
    """Raised when a decomposition tally is not constant across cosets of a level."""


class InvalidDiscriminantError(LabError):
    """Raised for a discriminant that is not negative and 0 or 1 mod 4."""


class FundamentalDomainError(LabError):
    """Raised when reduction to the fundamental domain fails."""


class CellPartitionError(LabError):
    """Raised when a list of cells does not partition the fundamental domain."""


class CheckFailedError(LabError):
    """Raised when an exact check of the ``check`` experiment fails."""
