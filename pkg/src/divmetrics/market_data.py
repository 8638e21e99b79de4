"""Price/dividend panel ingestion and dividend-adjusted return calculation.

The input format is a pair of long CSV files:

* prices:    header ``date,ticker,close``  (one row per present price)
* dividends: header ``date,ticker,amount`` (cash dividends, may be empty)

Dates are ISO-8601, decimals use a dot, an absent price is an absent row.
Returns are total returns: each cash dividend is folded into the price via
a cumulative dividend factor before simple returns are taken, so a stock
whose price is flat across a dividend date still shows the payout as a
positive return.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import IO

import numpy as np

from .errors import (
    EmptyUniverseError,
    IncompleteDataError,
    ParseError,
    ValidationError,
)

__all__ = [
    "StockPanel",
    "ReturnPanel",
    "IndexSeries",
    "load_panel",
    "load_index",
    "dividend_factors",
    "adjust_prices",
    "simple_returns",
    "complete_universe",
]


def _freeze(a: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(a, dtype=np.float64)
    if out is a:
        out = out.copy()
    out.flags.writeable = False
    return out


def _check_dates(dates: tuple[date, ...]) -> None:
    for i in range(1, len(dates)):
        if dates[i] <= dates[i - 1]:
            raise ValidationError(
                f"dates must be strictly increasing: {dates[i - 1]} then {dates[i]}"
            )


@dataclass(frozen=True)
class StockPanel:
    """Aligned date-by-ticker grid of closing prices and cash dividends.

    ``close`` uses NaN for absent prices; ``dividend`` defaults to 0.
    Instances are immutable (the arrays are marked read-only) and safe to
    share across threads.
    """

    dates: tuple[date, ...]
    tickers: tuple[str, ...]
    close: np.ndarray
    dividend: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "dates", tuple(self.dates))
        object.__setattr__(self, "tickers", tuple(self.tickers))
        object.__setattr__(self, "close", _freeze(self.close))
        object.__setattr__(self, "dividend", _freeze(self.dividend))
        shape = (len(self.dates), len(self.tickers))
        if self.close.shape != shape or self.dividend.shape != shape:
            raise ValidationError(
                f"panel arrays must have shape {shape}, got close {self.close.shape}, "
                f"dividend {self.dividend.shape}"
            )
        _check_dates(self.dates)
        if len(set(self.tickers)) != len(self.tickers):
            raise ValidationError("duplicate tickers in panel")
        present = ~np.isnan(self.close)
        if not np.all(self.close[present] > 0):
            raise ValidationError("every present close price must be > 0")
        if np.isnan(self.dividend).any() or not np.all(self.dividend >= 0):
            raise ValidationError("dividends must be finite and >= 0")
        orphan = (self.dividend > 0) & ~present
        if orphan.any():
            t, j = np.argwhere(orphan)[0]
            raise ValidationError(
                f"dividend for {self.tickers[j]} on {self.dates[t]} has no close price"
            )

    @property
    def n_dates(self) -> int:
        return len(self.dates)

    @property
    def n_tickers(self) -> int:
        return len(self.tickers)

    def ticker_index(self, ticker: str) -> int:
        try:
            return self.tickers.index(ticker)
        except ValueError:
            raise ValidationError(f"unknown ticker: {ticker}") from None


@dataclass(frozen=True)
class ReturnPanel:
    """Date-by-ticker grid of simple total returns.

    The date on row ``t`` is the date of the first of the two prices the
    return was formed from, i.e. the first T-1 dates of the source panel.
    """

    dates: tuple[date, ...]
    tickers: tuple[str, ...]
    returns: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "dates", tuple(self.dates))
        object.__setattr__(self, "tickers", tuple(self.tickers))
        object.__setattr__(self, "returns", _freeze(self.returns))
        shape = (len(self.dates), len(self.tickers))
        if self.returns.shape != shape:
            raise ValidationError(
                f"returns array must have shape {shape}, got {self.returns.shape}"
            )
        _check_dates(self.dates)
        if not np.all(np.isfinite(self.returns)):
            raise ValidationError("returns must be finite")
        if not np.all(self.returns > -1.0):
            raise ValidationError("every simple return must exceed -1")

    @property
    def n_dates(self) -> int:
        return len(self.dates)

    def rows(self, start: int, stop: int) -> "ReturnPanel":
        """Contiguous row slice ``[start, stop)`` as a new panel."""
        if not (0 <= start < stop <= len(self.dates)):
            raise ValidationError(f"invalid row slice [{start}, {stop})")
        return ReturnPanel(self.dates[start:stop], self.tickers, self.returns[start:stop])


@dataclass(frozen=True)
class IndexSeries:
    """A market index level series (e.g. a capitalization index)."""

    dates: tuple[date, ...]
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "dates", tuple(self.dates))
        object.__setattr__(self, "values", _freeze(self.values))
        if self.values.shape != (len(self.dates),):
            raise ValidationError("index values must be one value per date")
        _check_dates(self.dates)
        if not np.all(np.isfinite(self.values)) or not np.all(self.values > 0):
            raise ValidationError("index values must be finite and > 0")


def _open_source(source) -> tuple[IO[str], str, bool]:
    """Return (stream, label, needs_close) for a path or file-like source."""
    if isinstance(source, (str, Path)):
        path = Path(source)
        return path.open("r", encoding="utf-8", newline=""), str(path), True
    label = getattr(source, "name", "<stream>")
    return source, str(label), False


def _read_rows(source, header: tuple[str, str, str]) -> list[tuple[date, str, float, int]]:
    """Parse a long CSV into (date, ticker, value, line) rows.

    The value column must be a finite float; the header must match exactly.
    """
    stream, label, needs_close = _open_source(source)
    try:
        reader = csv.reader(stream)
        try:
            first = next(reader)
        except StopIteration:
            raise ParseError(label, 1, "empty file, expected header "
                             + ",".join(header)) from None
        if tuple(first) != header:
            raise ParseError(label, 1, f"expected header {','.join(header)}, "
                             f"got {','.join(first)}")
        rows = []
        for row in reader:
            if not row:
                continue
            line = reader.line_num
            if len(row) != 3:
                raise ParseError(label, line, f"expected 3 fields, got {len(row)}")
            try:
                d = date.fromisoformat(row[0])
            except ValueError:
                raise ParseError(label, line, f"invalid date {row[0]!r}") from None
            ticker = row[1].strip()
            if not ticker:
                raise ParseError(label, line, "empty ticker")
            try:
                value = float(row[2])
            except ValueError:
                raise ParseError(label, line, f"invalid number {row[2]!r}") from None
            if not np.isfinite(value):
                raise ParseError(label, line, f"non-finite number {row[2]!r}")
            rows.append((d, ticker, value, line))
        return rows
    finally:
        if needs_close:
            stream.close()


def load_panel(prices_source, dividends_source=None) -> StockPanel:
    """Load a StockPanel from long-format price and dividend CSVs.

    Dates are the union of the price dates, sorted ascending; tickers are
    the sorted union of the price tickers. A duplicated dividend on one
    (date, ticker) is summed; a duplicated price row is an error, as is a
    dividend on a (date, ticker) that has no price.

    ``dividends_source`` may be None or a header-only file when there are
    no dividends.
    """
    price_rows = _read_rows(prices_source, ("date", "ticker", "close"))
    if not price_rows:
        raise ValidationError("price file contains no data rows")

    dates = tuple(sorted({r[0] for r in price_rows}))
    tickers = tuple(sorted({r[1] for r in price_rows}))
    date_pos = {d: i for i, d in enumerate(dates)}
    ticker_pos = {t: j for j, t in enumerate(tickers)}

    close = np.full((len(dates), len(tickers)), np.nan)
    for d, ticker, value, line in price_rows:
        if value <= 0:
            raise ValidationError(
                f"close price must be > 0: {ticker} on {d} (line {line})"
            )
        t, j = date_pos[d], ticker_pos[ticker]
        if not np.isnan(close[t, j]):
            raise ValidationError(f"duplicate price row for {ticker} on {d} (line {line})")
        close[t, j] = value

    dividend = np.zeros_like(close)
    if dividends_source is not None:
        for d, ticker, amount, line in _read_rows(
            dividends_source, ("date", "ticker", "amount")
        ):
            if amount < 0:
                raise ValidationError(
                    f"dividend must be >= 0: {ticker} on {d} (line {line})"
                )
            t = date_pos.get(d)
            j = ticker_pos.get(ticker)
            if t is None or j is None or np.isnan(close[t, j]):
                raise ValidationError(
                    f"dividend for {ticker} on {d} has no close price (line {line})"
                )
            dividend[t, j] += amount

    return StockPanel(dates, tickers, close, dividend)


def load_index(source) -> IndexSeries:
    """Load an IndexSeries from a CSV with header ``date,value``."""
    stream, label, needs_close = _open_source(source)
    try:
        reader = csv.reader(stream)
        try:
            first = next(reader)
        except StopIteration:
            raise ParseError(label, 1, "empty file, expected header date,value") from None
        if tuple(first) != ("date", "value"):
            raise ParseError(label, 1, f"expected header date,value, got {','.join(first)}")
        pairs = []
        for row in reader:
            if not row:
                continue
            line = reader.line_num
            if len(row) != 2:
                raise ParseError(label, line, f"expected 2 fields, got {len(row)}")
            try:
                d = date.fromisoformat(row[0])
                v = float(row[1])
            except ValueError:
                raise ParseError(label, line, f"invalid row {row!r}") from None
            pairs.append((d, v))
    finally:
        if needs_close:
            stream.close()
    pairs.sort(key=lambda p: p[0])
    if not pairs:
        raise ValidationError("index file contains no data rows")
    return IndexSeries(tuple(p[0] for p in pairs), np.array([p[1] for p in pairs]))


def dividend_factors(panel: StockPanel, ticker: str) -> tuple[np.ndarray, np.ndarray]:
    """Daily and cumulative dividend factors for one ticker.

    daily[t] is 1 with no dividend and 1 + D(t)/P(t) on a dividend date;
    cumulative[t] is the running product of daily[0..t]. The cumulative
    factor is non-decreasing and >= 1 everywhere.
    """
    j = panel.ticker_index(ticker)
    close = panel.close[:, j]
    div = panel.dividend[:, j]
    paying = div > 0
    bad = paying & np.isnan(close)
    if bad.any():
        t = int(np.argmax(bad))
        raise IncompleteDataError(ticker, panel.dates[t], "dividend with no close price")
    daily = np.ones(panel.n_dates)
    daily[paying] = 1.0 + div[paying] / close[paying]
    return daily, np.cumprod(daily)


def adjust_prices(panel: StockPanel, ticker: str) -> np.ndarray:
    """Dividend-adjusted (total-return) price series for one ticker.

    Multiplies each close by the cumulative dividend factor, so the
    adjusted price never falls below the raw close. Absent closes stay NaN.
    """
    _, cumulative = dividend_factors(panel, ticker)
    j = panel.ticker_index(ticker)
    return panel.close[:, j] * cumulative


def simple_returns(panel: StockPanel) -> ReturnPanel:
    """Simple total returns R(t) = (PNEW(t+1) - PNEW(t)) / PNEW(t).

    Requires at least two dates and a complete price series for every
    ticker over the whole panel span (restrict with complete_universe
    first). The result has T-1 rows dated by the first T-1 panel dates.
    """
    if panel.n_dates < 2:
        raise ValidationError("need at least 2 dates to compute returns")
    adjusted = np.empty_like(panel.close)
    for j, ticker in enumerate(panel.tickers):
        missing = np.isnan(panel.close[:, j])
        if missing.any():
            t = int(np.argmax(missing))
            raise IncompleteDataError(ticker, panel.dates[t])
        adjusted[:, j] = adjust_prices(panel, ticker)
    returns = (adjusted[1:] - adjusted[:-1]) / adjusted[:-1]
    return ReturnPanel(panel.dates[:-1], panel.tickers, returns)


def complete_universe(panel: StockPanel, start: date, end: date) -> StockPanel:
    """Sub-panel over [start, end] keeping only tickers with no price gaps.

    Mirrors the complete-series extraction used to build the study
    universe: any ticker missing a price on any trading date in the range
    is dropped entirely. Raises EmptyUniverseError if nothing survives.
    """
    if start >= end:
        raise ValidationError(f"start {start} must precede end {end}")
    if start < panel.dates[0] or end > panel.dates[-1]:
        raise ValidationError(
            f"[{start}, {end}] is outside the panel range "
            f"[{panel.dates[0]}, {panel.dates[-1]}]"
        )
    rows = [t for t, d in enumerate(panel.dates) if start <= d <= end]
    if not rows:
        raise EmptyUniverseError(f"no trading dates in [{start}, {end}]")
    close = panel.close[rows]
    keep = [j for j in range(panel.n_tickers) if not np.isnan(close[:, j]).any()]
    if not keep:
        raise EmptyUniverseError(f"no ticker has complete prices over [{start}, {end}]")
    dates = tuple(panel.dates[t] for t in rows)
    tickers = tuple(panel.tickers[j] for j in keep)
    return StockPanel(dates, tickers, close[:, keep], panel.dividend[np.ix_(rows, keep)])
