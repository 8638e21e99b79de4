"""Rolling-window diversification-potential measures for equity panels.

The package computes, over a sliding window of dividend-adjusted simple
returns: the KMO sampling-adequacy statistic, the share of variance
explained by the first principal component, the size of a PCA-selected
maximally-diversifying stock subset, and the diversification ratio of
the 1/N portfolio. A deterministic synthetic-market generator provides
panels with known population values for all four.
"""

from .diversification import WeightVector, diversification_ratio, equal_weights
from .errors import (
    ConvergenceError,
    CoverageError,
    DegenerateColumnError,
    DegeneratePortfolioError,
    DivMetricsError,
    EmptyUniverseError,
    IncompleteDataError,
    InsufficientDataError,
    NumericError,
    ParseError,
    SingularMatrixError,
    UndefinedStatisticError,
    ValidationError,
)
from .market_data import (
    IndexSeries,
    ReturnPanel,
    StockPanel,
    adjust_prices,
    complete_universe,
    dividend_factors,
    load_index,
    load_panel,
    simple_returns,
)
from .matrix_stats import (
    CorrelationMatrix,
    CovarianceMatrix,
    PartialCorrelationMatrix,
    correlation_matrix,
    covariance_matrix,
    kmo,
    partial_correlations,
    write_matrix_csv,
)
from .pca import (
    Spectrum,
    correlation_spectrum,
    eigendecompose,
    pc1_variance_explained,
    write_spectrum_csv,
)
from .rolling import (
    MEASURES,
    MetricsRow,
    MetricsSeries,
    WindowConfig,
    index_window_return,
    run_series,
    run_series_returns,
    run_window,
    window_schedule,
    write_metrics_csv,
)
from .selection import (
    SelectionCriteria,
    SelectionResult,
    marked_for_deletion,
    result_to_json,
    select_stocks,
)
from .synth import (
    FactorSpec,
    Regime,
    equicorrelated_returns,
    factor_model_returns,
    factor_spec_from_json,
    normal_stream,
    trading_dates,
    write_price_fixture,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # market data
    "StockPanel", "ReturnPanel", "IndexSeries",
    "load_panel", "load_index", "dividend_factors", "adjust_prices",
    "simple_returns", "complete_universe",
    # matrix statistics
    "CorrelationMatrix", "CovarianceMatrix", "PartialCorrelationMatrix",
    "correlation_matrix", "covariance_matrix", "partial_correlations",
    "kmo", "write_matrix_csv",
    # pca
    "Spectrum", "eigendecompose", "correlation_spectrum",
    "pc1_variance_explained", "write_spectrum_csv",
    # selection
    "SelectionCriteria", "SelectionResult", "marked_for_deletion",
    "select_stocks", "result_to_json",
    # diversification
    "WeightVector", "equal_weights", "diversification_ratio",
    # rolling
    "MEASURES", "WindowConfig", "MetricsRow", "MetricsSeries",
    "window_schedule", "index_window_return", "run_window",
    "run_series", "run_series_returns", "write_metrics_csv",
    # synthetic markets
    "Regime", "FactorSpec", "equicorrelated_returns", "factor_model_returns",
    "factor_spec_from_json", "normal_stream", "trading_dates",
    "write_price_fixture",
    # errors
    "DivMetricsError", "ValidationError", "ParseError", "IncompleteDataError",
    "EmptyUniverseError", "DegenerateColumnError", "DegeneratePortfolioError",
    "InsufficientDataError", "CoverageError", "NumericError",
    "SingularMatrixError", "ConvergenceError", "UndefinedStatisticError",
]
