"""Sample correlation/covariance matrices, partial correlations, and KMO.

The KMO (Kaiser-Meyer-Olkin) statistic compares how large the plain
pairwise correlations are relative to the partial correlations that
remain after controlling for every other variable:

    KMO = sum_{j!=k} r_jk^2 / (sum_{j!=k} r_jk^2 + sum_{j!=k} q_jk^2)

A value near 1 means the panel shares strong common variation; near 0
means the variables are close to mutually independent. Partial
correlations use the anti-image construction: with A = R^-1,

    q_jk = -a_jk / sqrt(a_jj * a_kk)
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    DegenerateColumnError,
    SingularMatrixError,
    UndefinedStatisticError,
    ValidationError,
)
from .market_data import ReturnPanel

__all__ = [
    "CorrelationMatrix",
    "CovarianceMatrix",
    "PartialCorrelationMatrix",
    "correlation_matrix",
    "covariance_matrix",
    "partial_correlations",
    "kmo",
    "write_matrix_csv",
]

# Reciprocal-condition floor below which a correlation matrix is treated
# as singular instead of being silently pseudo-inverted.
RCOND_FLOOR = 1e-12


def _freeze(a: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(a, dtype=np.float64)
    if out is a:
        out = out.copy()
    out.flags.writeable = False
    return out


def _check_square(tickers: tuple[str, ...], values: np.ndarray, what: str) -> None:
    p = len(tickers)
    if values.shape != (p, p):
        raise ValidationError(f"{what} must be {p}x{p}, got {values.shape}")
    if p == 0:
        raise ValidationError(f"{what} needs at least one ticker")
    if not np.all(np.isfinite(values)):
        raise ValidationError(f"{what} entries must be finite")


@dataclass(frozen=True)
class CorrelationMatrix:
    """Pearson sample correlation matrix with its ticker order."""

    tickers: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "tickers", tuple(self.tickers))
        object.__setattr__(self, "values", _freeze(self.values))
        v = self.values
        _check_square(self.tickers, v, "correlation matrix")
        if np.abs(v - v.T).max() > 1e-12:
            raise ValidationError("correlation matrix must be symmetric within 1e-12")
        if np.abs(np.diag(v) - 1.0).max() > 1e-12:
            raise ValidationError("correlation matrix diagonal must be 1 within 1e-12")
        if np.abs(v).max() > 1.0:
            raise ValidationError("correlation entries must lie in [-1, 1]")

    @property
    def p(self) -> int:
        return len(self.tickers)

    def restrict(self, keep: "list[int] | np.ndarray") -> "CorrelationMatrix":
        """Submatrix over the given ticker indices, in the given order."""
        keep = list(keep)
        tickers = tuple(self.tickers[i] for i in keep)
        return CorrelationMatrix(tickers, self.values[np.ix_(keep, keep)])


@dataclass(frozen=True)
class CovarianceMatrix:
    """Sample covariance matrix (divisor n-1) with its ticker order."""

    tickers: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "tickers", tuple(self.tickers))
        object.__setattr__(self, "values", _freeze(self.values))
        v = self.values
        _check_square(self.tickers, v, "covariance matrix")
        if np.abs(v - v.T).max() > 1e-12:
            raise ValidationError("covariance matrix must be symmetric within 1e-12")
        if np.any(np.diag(v) < 0):
            raise ValidationError("covariance diagonal must be >= 0")


@dataclass(frozen=True)
class PartialCorrelationMatrix:
    """Anti-image partial correlations with unit diagonal."""

    tickers: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "tickers", tuple(self.tickers))
        object.__setattr__(self, "values", _freeze(self.values))
        v = self.values
        _check_square(self.tickers, v, "partial-correlation matrix")
        if np.abs(v - v.T).max() > 1e-10:
            raise ValidationError("partial correlations must be symmetric within 1e-10")
        if np.abs(np.diag(v) - 1.0).max() > 1e-12:
            raise ValidationError("partial-correlation diagonal must be 1")
        if np.abs(v).max() > 1.0 + 1e-10:
            raise ValidationError("partial correlations must lie within [-1, 1] + 1e-10")


def _centered(window: ReturnPanel) -> np.ndarray:
    """Column-demeaned return matrix; constant columns become exact zeros."""
    x = window.returns
    if x.shape[0] < 2:
        raise ValidationError("need at least 2 return rows")
    centered = x - x.mean(axis=0)
    constant = x.max(axis=0) == x.min(axis=0)
    if constant.any():
        centered = centered.copy()
        centered[:, constant] = 0.0
    return centered


def _scatter(window: ReturnPanel) -> np.ndarray:
    """Symmetric cross-product matrix of the centered columns."""
    centered = _centered(window)
    s = centered.T @ centered
    return (s + s.T) / 2.0


def covariance_matrix(window: ReturnPanel) -> CovarianceMatrix:
    """Sample covariance over a return window, divisor n-1.

    A constant column is allowed here and yields an exactly-zero row and
    column; the correlation counterpart rejects it instead.
    """
    n = window.returns.shape[0]
    return CovarianceMatrix(window.tickers, _scatter(window) / (n - 1))


def correlation_matrix(window: ReturnPanel) -> CorrelationMatrix:
    """Pearson sample correlation over a return window.

    Normalizes the scatter matrix by sqrt(S_jj * S_kk) so that identical
    (or exactly opposite) columns come out at exactly +/-1, and the
    diagonal is exactly 1. A zero-variance column has no defined
    correlation and raises DegenerateColumnError.
    """
    if len(window.tickers) < 2:
        raise ValidationError("correlation needs at least 2 tickers")
    s = _scatter(window)
    var = np.diag(s)
    if np.any(var <= 0):
        j = int(np.argmax(var <= 0))
        raise DegenerateColumnError(window.tickers[j])
    r = s / np.sqrt(np.outer(var, var))
    r = np.clip(r, -1.0, 1.0)
    np.fill_diagonal(r, 1.0)
    return CorrelationMatrix(window.tickers, r)


def _inverse(r: CorrelationMatrix) -> np.ndarray:
    """Inverse of R with a reciprocal-condition guard on its spectrum."""
    eigenvalues = np.linalg.eigvalsh(r.values)
    largest = float(eigenvalues[-1])
    smallest = float(eigenvalues[0])
    rcond = smallest / largest if largest > 0 else 0.0
    if not np.isfinite(rcond) or rcond < RCOND_FLOOR:
        raise SingularMatrixError(rcond)
    return np.linalg.inv(r.values)


def partial_correlations(r: CorrelationMatrix) -> PartialCorrelationMatrix:
    """Partial correlations of every pair given all other variables.

    Uses the inverse-matrix (anti-image) construction. Requires R to be
    invertible with reciprocal condition number at least 1e-12.
    """
    a = _inverse(r)
    a = (a + a.T) / 2.0
    d = np.diag(a)
    q = -a / np.sqrt(np.outer(d, d))
    np.fill_diagonal(q, 1.0)
    return PartialCorrelationMatrix(r.tickers, q)


def _off_diagonal_sq_sum(values: np.ndarray) -> float:
    off = values.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.sum(off * off))


def kmo(r: CorrelationMatrix) -> float:
    """Kaiser-Meyer-Olkin measure of sampling adequacy, in (0, 1).

    Raises UndefinedStatisticError when every off-diagonal correlation is
    zero (the statistic is 0/0 there) and SingularMatrixError when R is
    not invertible.
    """
    q = partial_correlations(r)
    r2 = _off_diagonal_sq_sum(r.values)
    q2 = _off_diagonal_sq_sum(q.values)
    if r2 == 0.0:
        raise UndefinedStatisticError(
            "KMO is undefined: all off-diagonal correlations are zero"
        )
    return r2 / (r2 + q2)


def write_matrix_csv(matrix, destination) -> None:
    """Write a square matrix as CSV with a ticker header row and column.

    Accepts any of the matrix types above. Values carry 17 significant
    digits so a reader recovers the exact doubles.
    """
    tickers = matrix.tickers
    values = matrix.values
    close_after = isinstance(destination, (str, Path))
    stream = open(destination, "w", encoding="utf-8", newline="") if close_after \
        else destination
    try:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(("", *tickers))
        for ticker, row in zip(tickers, values):
            writer.writerow((ticker, *(format(x, ".17g") for x in row)))
    finally:
        if close_after:
            stream.close()
