"""Diversification ratio for long-only portfolios.

DR(w, S) = (w . sigma) / sqrt(w' S w), the weighted average of the
individual volatilities over the portfolio volatility. It is 1 when
nothing diversifies (one asset, or perfectly correlated equal-vol
assets) and sqrt(N) for N uncorrelated assets of equal volatility under
1/N weights.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePortfolioError, ValidationError
from .matrix_stats import CovarianceMatrix

__all__ = ["WeightVector", "equal_weights", "diversification_ratio"]


@dataclass(frozen=True)
class WeightVector:
    """Long-only portfolio weights summing to 1."""

    tickers: tuple[str, ...]
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "tickers", tuple(self.tickers))
        w = np.ascontiguousarray(self.weights, dtype=np.float64).copy()
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)
        if w.shape != (len(self.tickers),) or len(self.tickers) == 0:
            raise ValidationError("need one weight per ticker, at least one")
        if not np.all(np.isfinite(w)):
            raise ValidationError("weights must be finite")
        if np.any(w < 0):
            raise ValidationError("weights must be long-only (>= 0)")
        if abs(float(w.sum()) - 1.0) > 1e-12:
            raise ValidationError(f"weights must sum to 1, got {float(w.sum())!r}")


def equal_weights(tickers) -> WeightVector:
    """The 1/N portfolio over the given tickers."""
    tickers = tuple(tickers)
    if not tickers:
        raise ValidationError("cannot build equal weights over no tickers")
    return WeightVector(tickers, np.full(len(tickers), 1.0 / len(tickers)))


def diversification_ratio(w: WeightVector, s: CovarianceMatrix) -> float:
    """Weighted average volatility over portfolio volatility, >= 1.

    Volatilities are the square roots of the covariance diagonal, so the
    ratio is always consistent with the supplied matrix. A portfolio with
    zero variance has no defined ratio.
    """
    if w.tickers != s.tickers:
        raise ValidationError("weight and covariance tickers differ")
    diag = np.diag(s.values)
    if np.any(diag < 0):
        raise ValidationError("covariance diagonal must be >= 0")
    average_vol = float(w.weights @ np.sqrt(diag))
    variance = float(w.weights @ s.values @ w.weights)
    if variance <= 0.0:
        raise DegeneratePortfolioError(
            f"portfolio variance must be positive, got {variance!r}"
        )
    return average_vol / float(np.sqrt(variance))
