"""Rolling-window evaluation of all four diversification measures.

A fixed-length window slides over the return panel at a fixed stride;
each position yields one row holding the KMO statistic, the PC1 variance
share, the PCA-selected stock count, the diversification ratio of the
1/N portfolio, and optionally the market index return over the window
span. A failure in one measure is recorded against that field and the
rest of the row still computes, so a single pathological window cannot
destroy a long series.
"""

from __future__ import annotations

import csv
from bisect import bisect_left
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Mapping

from .diversification import diversification_ratio, equal_weights
from .errors import CoverageError, DivMetricsError, InsufficientDataError, ValidationError
from .market_data import IndexSeries, ReturnPanel, StockPanel, simple_returns
from .matrix_stats import correlation_matrix, covariance_matrix, kmo
from .pca import correlation_spectrum, pc1_variance_explained
from .selection import SelectionCriteria, select_stocks

__all__ = [
    "MEASURES",
    "WindowConfig",
    "MetricsRow",
    "MetricsSeries",
    "window_schedule",
    "index_window_return",
    "run_window",
    "run_series",
    "run_series_returns",
    "write_metrics_csv",
]

# Measure field names in output-column order.
MEASURES = ("kmo", "pc1_pct", "n_selected", "dr")
_ALL_FIELDS = MEASURES + ("index_return",)
_CORRELATION_MEASURES = ("kmo", "pc1_pct", "n_selected")


@dataclass(frozen=True)
class WindowConfig:
    """Rolling schedule: window length in return rows, stride, and the
    selection criteria applied inside each window."""

    length: int = 504
    step: int = 5
    criteria: SelectionCriteria = SelectionCriteria()

    def __post_init__(self):
        if self.length < 2:
            raise ValidationError("window length must be at least 2 return rows")
        if self.step < 1:
            raise ValidationError("step must be at least 1")


@dataclass(frozen=True)
class MetricsRow:
    """One window's results. A None field was either not requested or
    failed; failures carry a message in ``errors`` under the field name."""

    window_end: date
    kmo: float | None = None
    pc1_pct: float | None = None
    n_selected: int | None = None
    dr: float | None = None
    index_return: float | None = None
    errors: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        unknown = set(self.errors) - set(_ALL_FIELDS)
        if unknown:
            raise ValidationError(f"unknown error fields: {sorted(unknown)}")


@dataclass(frozen=True)
class MetricsSeries:
    rows: tuple[MetricsRow, ...]

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        ends = [r.window_end for r in self.rows]
        if any(b <= a for a, b in zip(ends, ends[1:])):
            raise ValidationError("window_end dates must be strictly increasing")

    def __len__(self) -> int:
        return len(self.rows)

    def column(self, name: str) -> list:
        if name not in _ALL_FIELDS:
            raise ValidationError(f"unknown column {name!r}")
        return [getattr(r, name) for r in self.rows]


def window_schedule(t: int, cfg: WindowConfig) -> list[tuple[int, int]]:
    """Half-open row ranges [k*step, k*step + length) fitting in t rows.

    The count is floor((t - length)/step) + 1.
    """
    if t < cfg.length:
        raise InsufficientDataError(
            f"panel has {t} return rows, window needs {cfg.length}"
        )
    count = (t - cfg.length) // cfg.step + 1
    return [(k * cfg.step, k * cfg.step + cfg.length) for k in range(count)]


def index_window_return(index: IndexSeries, start: date, end: date) -> float:
    """Simple return of the index level from ``start`` to ``end``.

    Both dates must be present in the series.
    """
    values = []
    for d in (start, end):
        pos = bisect_left(index.dates, d)
        if pos == len(index.dates) or index.dates[pos] != d:
            raise CoverageError(d)
        values.append(float(index.values[pos]))
    return (values[1] - values[0]) / values[0]


def run_window(
    window: ReturnPanel,
    cfg: WindowConfig,
    index: IndexSeries | None = None,
    measures: tuple[str, ...] = MEASURES,
) -> MetricsRow:
    """Evaluate the requested measures on one window.

    The correlation matrix and its spectrum are computed once and shared
    by KMO, PC1, and selection; the covariance matrix separately feeds
    the diversification ratio.
    """
    unknown = set(measures) - set(MEASURES)
    if unknown:
        raise ValidationError(f"unknown measures: {sorted(unknown)}")
    out: dict = {"window_end": window.dates[-1]}
    errors: dict[str, str] = {}

    corr = None
    wanted_corr = [m for m in _CORRELATION_MEASURES if m in measures]
    if wanted_corr:
        try:
            corr = correlation_matrix(window)
        except DivMetricsError as e:
            for m in wanted_corr:
                errors[m] = str(e)
    if corr is not None:
        spectrum = None
        if "pc1_pct" in measures or "n_selected" in measures:
            try:
                spectrum = correlation_spectrum(corr)
            except DivMetricsError as e:
                for m in ("pc1_pct", "n_selected"):
                    if m in measures:
                        errors[m] = str(e)
        if "kmo" in measures:
            try:
                out["kmo"] = kmo(corr)
            except DivMetricsError as e:
                errors["kmo"] = str(e)
        if spectrum is not None:
            if "pc1_pct" in measures:
                try:
                    out["pc1_pct"] = pc1_variance_explained(spectrum, corr.p)
                except DivMetricsError as e:
                    errors["pc1_pct"] = str(e)
            if "n_selected" in measures:
                try:
                    result = select_stocks(corr, cfg.criteria, initial_spectrum=spectrum)
                    out["n_selected"] = result.n_selected
                except DivMetricsError as e:
                    errors["n_selected"] = str(e)
    if "dr" in measures:
        try:
            cov = covariance_matrix(window)
            out["dr"] = diversification_ratio(equal_weights(window.tickers), cov)
        except DivMetricsError as e:
            errors["dr"] = str(e)
    if index is not None:
        try:
            out["index_return"] = index_window_return(
                index, window.dates[0], window.dates[-1]
            )
        except DivMetricsError as e:
            errors["index_return"] = str(e)
    return MetricsRow(errors=errors, **out)


def run_series_returns(
    returns: ReturnPanel,
    cfg: WindowConfig,
    index: IndexSeries | None = None,
    measures: tuple[str, ...] = MEASURES,
    threads: int = 1,
) -> MetricsSeries:
    """Run every scheduled window over an already-built return panel.

    Windows are independent; with threads > 1 they evaluate in a thread
    pool, and results are always assembled in schedule order so the
    output is identical to a sequential run.
    """
    schedule = window_schedule(returns.n_dates, cfg)
    slices = [returns.rows(start, stop) for start, stop in schedule]

    def one(window: ReturnPanel) -> MetricsRow:
        return run_window(window, cfg, index, measures)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(one, slices))
    else:
        rows = [one(w) for w in slices]
    return MetricsSeries(tuple(rows))


def run_series(
    panel: StockPanel,
    cfg: WindowConfig,
    index: IndexSeries | None = None,
    measures: tuple[str, ...] = MEASURES,
    threads: int = 1,
) -> MetricsSeries:
    """Full pipeline from a price/dividend panel: returns, then windows."""
    return run_series_returns(simple_returns(panel), cfg, index, measures, threads)


def _format_field(value) -> str:
    if value is None:
        return ""
    if isinstance(value, int):
        return str(value)
    return format(value, ".17g")


def write_metrics_csv(series: MetricsSeries, metrics_destination, diagnostics_destination) -> None:
    """Write the series CSV and its diagnostics sibling.

    Metrics header: ``window_end,kmo,pc1_pct,n_selected,dr,index_return``;
    failed fields are empty and each failure becomes one
    ``window_end,field,error`` diagnostics row. The diagnostics file is
    always written, header included, even when empty.
    """

    def _open(dest):
        if isinstance(dest, (str, Path)):
            return open(dest, "w", encoding="utf-8", newline=""), True
        return dest, False

    stream, close_after = _open(metrics_destination)
    try:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(("window_end",) + _ALL_FIELDS)
        for row in series.rows:
            writer.writerow(
                (row.window_end.isoformat(),)
                + tuple(_format_field(getattr(row, f)) for f in _ALL_FIELDS)
            )
    finally:
        if close_after:
            stream.close()
    stream, close_after = _open(diagnostics_destination)
    try:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(("window_end", "field", "error"))
        for row in series.rows:
            for f in _ALL_FIELDS:
                if f in row.errors:
                    writer.writerow((row.window_end.isoformat(), f, row.errors[f]))
    finally:
        if close_after:
            stream.close()
