"""Exception types shared across the package."""


class RatiorichError(Exception):
    """Base class for all errors raised by this package."""


class TableParseError(RatiorichError, ValueError):
    """A frequency-table file could not be parsed.

    Carries the 1-based line number of the offending row.
    """

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class StructureError(RatiorichError, ValueError):
    """The frequency table lacks the structure needed for estimation."""


class DomainError(RatiorichError, ValueError):
    """An argument is outside the mathematical domain of an operation."""


class SingularityError(RatiorichError, ArithmeticError):
    """The model denominator vanishes at a requested evaluation point."""


class WeightError(RatiorichError, ValueError):
    """Adaptive weights cannot be formed (fitted ratio non-positive in domain)."""


class CriteriaError(RatiorichError, ValueError):
    """A fit that does not satisfy the selection criteria was used where one is required."""


class NoEstimateError(RatiorichError, RuntimeError):
    """No richness estimate exists for this table (the fallback failed as well)."""
