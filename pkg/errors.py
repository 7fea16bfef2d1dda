"""
Exception hierarchy for the Sparse SARIMA Toolkit.

Every error carries a short ``kind`` token so the CLI can print a single
machine-parsable line (``error: <kind>: <message>``). Each class also
inherits the closest builtin so callers can catch ``ValueError`` and friends.
"""

from typing import Optional, Sequence


class SarimaToolkitError(Exception):
    """Base class for all toolkit errors."""
    kind = "error"


class SeriesLengthError(SarimaToolkitError, ValueError):
    """Series too short for the requested operation."""
    kind = "length"


class DiffContextError(SarimaToolkitError, ValueError):
    """Differencing context does not match the series it should invert."""
    kind = "context"


class IndexRangeError(SarimaToolkitError, IndexError):
    """Month or lag bounds outside the available range."""
    kind = "range"


class DegenerateInputError(SarimaToolkitError, ValueError):
    """Input without variance (constant series, tied sample)."""
    kind = "degenerate-input"


class NumericalError(SarimaToolkitError, ArithmeticError):
    """Numerical breakdown (singular regression, Durbin-Levinson failure)."""
    kind = "numerical"


class LikelihoodError(NumericalError):
    """Likelihood cannot be evaluated (non-stationary AR part, bad variance)."""
    kind = "likelihood"


class FitError(SarimaToolkitError, RuntimeError):
    """Maximum-likelihood fit failed after the full restart schedule."""
    kind = "fit"

    def __init__(
        self,
        message: str,
        best_params: Optional[Sequence[float]] = None,
        best_loglik: Optional[float] = None,
    ):
        super().__init__(message)
        self.best_params = None if best_params is None else list(best_params)
        self.best_loglik = best_loglik


class SimulationError(SarimaToolkitError, ValueError):
    kind = "simulation"


class SpecParseError(SarimaToolkitError, ValueError):
    """Malformed model notation; ``position`` is the 0-based offending column."""
    kind = "parse"

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class SpecValidationError(SarimaToolkitError, ValueError):
    kind = "validation"


class IngestionError(SarimaToolkitError, ValueError):
    """Traffic records that cannot be assembled into a gap-free series."""
    kind = "ingestion"


class CsvParseError(IngestionError):
    """Unparseable cell; ``row`` is the 1-based file line, ``column`` the header name."""
    kind = "parse"

    def __init__(self, message: str, row: int, column: str):
        super().__init__(f"{message} (row {row}, column '{column}')")
        self.row = row
        self.column = column


class ModelDocumentError(SarimaToolkitError, ValueError):
    kind = "model-document"


class UsageError(SarimaToolkitError):
    """Bad command line (unknown subcommand or flag)."""
    kind = "usage"
