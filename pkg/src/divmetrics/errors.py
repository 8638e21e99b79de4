"""Exception hierarchy shared by all divmetrics modules.

Three families matter to callers (and to the CLI's exit codes):
``ValidationError`` for bad inputs or bad data, ``NumericError`` for
computations that cannot produce a meaningful number, and plain
``OSError`` for I/O, which is deliberately left to the standard library.
"""


class DivMetricsError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(DivMetricsError):
    """Input data or parameters violate a documented precondition."""


class ParseError(ValidationError):
    """A tabular input file could not be parsed.

    Carries the source label and 1-based line number of the offending row.
    """

    def __init__(self, source: str, line: int, message: str):
        super().__init__(f"{source}, line {line}: {message}")
        self.source = source
        self.line = line


class IncompleteDataError(ValidationError):
    """A price series has a gap where a complete series is required."""

    def __init__(self, ticker: str, date, message: str | None = None):
        detail = message or "missing price"
        super().__init__(f"{ticker} on {date}: {detail}")
        self.ticker = ticker
        self.date = date


class EmptyUniverseError(ValidationError):
    """No ticker has complete data over the requested span."""


class DegenerateColumnError(ValidationError):
    """A return column has zero variance, so it cannot be normalized."""

    def __init__(self, ticker: str):
        super().__init__(f"zero-variance return column: {ticker}")
        self.ticker = ticker


class DegeneratePortfolioError(ValidationError):
    """Portfolio variance is zero; the diversification ratio is undefined."""


class InsufficientDataError(ValidationError):
    """Fewer observations than one rolling window requires."""


class CoverageError(ValidationError):
    """An index series does not cover a date the computation needs."""

    def __init__(self, date):
        super().__init__(f"index series has no value on {date}")
        self.date = date


class NumericError(DivMetricsError):
    """A numeric computation failed or is undefined for this input."""


class SingularMatrixError(NumericError):
    """Matrix is singular or too ill-conditioned to invert reliably.

    ``rcond`` holds the reciprocal condition estimate that tripped the guard.
    """

    def __init__(self, rcond: float):
        super().__init__(
            f"correlation matrix is numerically singular (rcond={rcond:.3e})"
        )
        self.rcond = rcond


class ConvergenceError(NumericError):
    """An iterative routine exhausted its iteration budget."""

    def __init__(self, iterations: int, what: str = "eigendecomposition"):
        super().__init__(f"{what} did not converge after {iterations} sweeps")
        self.iterations = iterations


class UndefinedStatisticError(NumericError):
    """A statistic reduces to 0/0 for this input (e.g. KMO of identity)."""
