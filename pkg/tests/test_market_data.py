"""Panel ingestion and dividend-adjusted returns."""

import io
from datetime import date

import numpy as np
import numpy.testing as npt
import pytest

from divmetrics import (
    EmptyUniverseError,
    IncompleteDataError,
    IndexSeries,
    ParseError,
    ReturnPanel,
    StockPanel,
    ValidationError,
    adjust_prices,
    complete_universe,
    dividend_factors,
    load_index,
    load_panel,
    simple_returns,
)


def _csv(text: str) -> io.StringIO:
    return io.StringIO(text)


def make_panel(dates, tickers, close, dividend=None):
    close = np.asarray(close, dtype=float)
    if dividend is None:
        dividend = np.zeros_like(close)
    return StockPanel(dates, tickers, close, dividend)


D = [date(2020, 1, d) for d in (6, 7, 8, 9, 10)]


class TestLoadPanel:
    def test_two_tickers_three_dates_no_dividends(self):
        panel = load_panel(_csv(
            "date,ticker,close\n"
            "2020-01-06,A,10\n2020-01-06,B,20\n"
            "2020-01-07,A,11\n2020-01-07,B,21\n"
            "2020-01-08,A,12\n2020-01-08,B,22\n"
        ))
        assert panel.close.shape == (3, 2)
        assert panel.tickers == ("A", "B")
        assert panel.dates == tuple(D[:3])
        npt.assert_array_equal(panel.dividend, 0.0)

    def test_duplicate_dividend_rows_sum(self):
        panel = load_panel(
            _csv("date,ticker,close\n2020-01-06,A,10\n2020-01-07,A,11\n"),
            _csv("date,ticker,amount\n2020-01-06,A,0.5\n2020-01-06,A,0.5\n"),
        )
        assert panel.dividend[0, 0] == 1.0

    def test_invalid_date_names_row(self):
        with pytest.raises(ParseError) as exc:
            load_panel(_csv("date,ticker,close\n2001-13-01,A,10\n"))
        assert exc.value.line == 2
        assert "2001-13-01" in str(exc.value)

    def test_wrong_header(self):
        with pytest.raises(ParseError):
            load_panel(_csv("day,ticker,close\n2020-01-06,A,10\n"))

    def test_nonpositive_close_rejected(self):
        with pytest.raises(ValidationError):
            load_panel(_csv("date,ticker,close\n2020-01-06,A,0\n"))

    def test_dividend_without_price_rejected(self):
        with pytest.raises(ValidationError):
            load_panel(
                _csv("date,ticker,close\n2020-01-06,A,10\n"),
                _csv("date,ticker,amount\n2020-01-07,A,1\n"),
            )

    def test_duplicate_price_row_rejected(self):
        with pytest.raises(ValidationError):
            load_panel(_csv("date,ticker,close\n2020-01-06,A,10\n2020-01-06,A,10\n"))

    def test_bad_field_count(self):
        with pytest.raises(ParseError):
            load_panel(_csv("date,ticker,close\n2020-01-06,A\n"))

    def test_bad_number(self):
        with pytest.raises(ParseError):
            load_panel(_csv("date,ticker,close\n2020-01-06,A,ten\n"))

    def test_missing_price_is_absent(self):
        panel = load_panel(_csv(
            "date,ticker,close\n"
            "2020-01-06,A,10\n2020-01-06,B,20\n2020-01-07,B,21\n"
        ))
        assert np.isnan(panel.close[1, 0])
        assert panel.close[1, 1] == 21.0


class TestDividendFactors:
    def test_no_dividends_identity(self):
        panel = make_panel(D[:3], ("A",), [[10.0], [11.0], [12.0]])
        daily, cumulative = dividend_factors(panel, "A")
        npt.assert_array_equal(daily, 1.0)
        npt.assert_array_equal(cumulative, 1.0)

    def test_hand_oracle_single_dividend(self):
        panel = make_panel(
            D[:3], ("A",), [[100.0], [101.0], [102.0]],
            [[0.0], [1.0], [0.0]],
        )
        daily, cumulative = dividend_factors(panel, "A")
        npt.assert_allclose(daily, [1.0, 1.0 + 1.0 / 101.0, 1.0], rtol=0, atol=0)
        npt.assert_allclose(cumulative, [1.0, 102.0 / 101.0, 102.0 / 101.0],
                            rtol=1e-15)

    def test_successive_dividends_product(self):
        panel = make_panel(
            D[:4], ("A",), [[50.0], [52.0], [51.0], [53.0]],
            [[0.0], [0.5], [0.25], [0.0]],
        )
        daily, cumulative = dividend_factors(panel, "A")
        direct = np.cumprod(daily)
        npt.assert_array_equal(cumulative, direct)

    def test_cumulative_monotone_non_decreasing(self):
        rng = np.random.default_rng(5)
        close = 50.0 + rng.uniform(0, 10, size=(30, 1))
        div = np.where(rng.uniform(size=(30, 1)) < 0.2, 0.4, 0.0)
        panel = make_panel([date(2021, 1, 1 + i) for i in range(30)], ("A",),
                           close, div)
        _, cumulative = dividend_factors(panel, "A")
        assert np.all(np.diff(cumulative) >= 0)
        assert np.all(cumulative >= 1.0)

    def test_unknown_ticker(self):
        panel = make_panel(D[:2], ("A",), [[10.0], [11.0]])
        with pytest.raises(ValidationError):
            dividend_factors(panel, "Z")


class TestAdjustPrices:
    def test_no_dividends_equals_raw_exactly(self):
        panel = make_panel(D[:3], ("A",), [[10.0], [11.5], [12.25]])
        npt.assert_array_equal(adjust_prices(panel, "A"), panel.close[:, 0])

    def test_hand_oracle_100_102(self):
        panel = make_panel(D[:2], ("A",), [[100.0], [101.0]], [[0.0], [1.0]])
        npt.assert_allclose(adjust_prices(panel, "A"), [100.0, 102.0], rtol=1e-15)

    def test_single_date(self):
        panel = make_panel(D[:1], ("A",), [[10.0]])
        npt.assert_array_equal(adjust_prices(panel, "A"), [10.0])

    def test_adjusted_never_below_raw(self):
        rng = np.random.default_rng(6)
        close = 50.0 + rng.uniform(0, 10, size=(40, 1))
        div = np.where(rng.uniform(size=(40, 1)) < 0.3, 1.0, 0.0)
        panel = make_panel([date(2021, 2, 1 + i) for i in range(28)][:28], ("A",),
                           close[:28], div[:28])
        assert np.all(adjust_prices(panel, "A") >= panel.close[:, 0])


class TestSimpleReturns:
    def test_price_only_arithmetic(self):
        panel = make_panel(D[:2], ("A",), [[100.0], [102.0]])
        rp = simple_returns(panel)
        npt.assert_allclose(rp.returns, [[0.02]], rtol=0, atol=1e-12)
        assert rp.dates == (D[0],)

    def test_dividend_fixture_two_percent(self):
        panel = make_panel(D[:2], ("A",), [[100.0], [101.0]], [[0.0], [1.0]])
        rp = simple_returns(panel)
        assert abs(rp.returns[0, 0] - 0.02) <= 1e-12

    def test_constant_adjusted_prices_zero_returns(self):
        panel = make_panel(D[:4], ("A",), [[10.0]] * 4)
        npt.assert_array_equal(simple_returns(panel).returns, 0.0)

    def test_dividend_free_equals_raw_returns_exactly(self):
        rng = np.random.default_rng(7)
        close = 50.0 * np.exp(rng.normal(0, 0.01, size=(60, 3)).cumsum(axis=0))
        panel = make_panel([date(2021, 3, 1 + i) for i in range(31)][:31][:20],
                           ("A", "B", "C"), close[:20])
        raw = (close[1:20] - close[:19]) / close[:19]
        npt.assert_array_equal(simple_returns(panel).returns, raw)

    def test_total_return_property(self):
        # flat raw price, one dividend: cumulative return equals D/P
        panel = make_panel(D[:3], ("A",), [[40.0], [40.0], [40.0]],
                           [[0.0], [2.5], [0.0]])
        adjusted = adjust_prices(panel, "A")
        total = adjusted[-1] / adjusted[0] - 1.0
        assert abs(total - 2.5 / 40.0) <= 1e-12

    def test_gap_raises_incomplete(self):
        close = np.array([[10.0, 20.0], [11.0, np.nan], [12.0, 22.0]])
        panel = make_panel(D[:3], ("A", "B"), close)
        with pytest.raises(IncompleteDataError) as exc:
            simple_returns(panel)
        assert exc.value.ticker == "B"

    def test_needs_two_dates(self):
        with pytest.raises(ValidationError):
            simple_returns(make_panel(D[:1], ("A",), [[10.0]]))


class TestCompleteUniverse:
    def _panel(self):
        close = np.array([
            [10.0, 20.0, 30.0],
            [11.0, np.nan, 31.0],
            [12.0, 22.0, 32.0],
        ])
        return make_panel(D[:3], ("A", "B", "C"), close)

    def test_incomplete_ticker_dropped(self):
        sub = complete_universe(self._panel(), D[0], D[2])
        assert sub.tickers == ("A", "C")
        assert sub.n_dates == 3

    def test_all_complete_identity(self):
        panel = make_panel(D[:3], ("A", "B"), [[1.0, 2.0]] * 3)
        sub = complete_universe(panel, D[0], D[2])
        assert sub.tickers == panel.tickers
        npt.assert_array_equal(sub.close, panel.close)

    def test_mid_range_listing_excluded(self):
        close = np.array([[10.0, np.nan], [11.0, 20.0], [12.0, 21.0]])
        sub = complete_universe(make_panel(D[:3], ("A", "B"), close), D[0], D[2])
        assert sub.tickers == ("A",)

    def test_idempotent(self):
        sub = complete_universe(self._panel(), D[0], D[2])
        again = complete_universe(sub, D[0], D[2])
        assert again.tickers == sub.tickers
        npt.assert_array_equal(again.close, sub.close)

    def test_range_restriction(self):
        sub = complete_universe(self._panel(), D[1], D[2])
        assert sub.n_dates == 2
        assert sub.tickers == ("A", "C")

    def test_empty_universe(self):
        close = np.array([[np.nan, 10.0], [11.0, np.nan]])
        with pytest.raises(EmptyUniverseError):
            complete_universe(make_panel(D[:2], ("A", "B"), close), D[0], D[1])

    def test_bad_range(self):
        with pytest.raises(ValidationError):
            complete_universe(self._panel(), D[2], D[0])
        with pytest.raises(ValidationError):
            complete_universe(self._panel(), D[0], date(2030, 1, 1))


class TestTypes:
    def test_return_panel_rejects_minus_one(self):
        with pytest.raises(ValidationError):
            ReturnPanel((D[0],), ("A",), np.array([[-1.0]]))

    def test_return_panel_rejects_nan(self):
        with pytest.raises(ValidationError):
            ReturnPanel((D[0],), ("A",), np.array([[np.nan]]))

    def test_stock_panel_rejects_unsorted_dates(self):
        with pytest.raises(ValidationError):
            make_panel((D[1], D[0]), ("A",), [[1.0], [2.0]])

    def test_stock_panel_rejects_duplicate_tickers(self):
        with pytest.raises(ValidationError):
            make_panel(D[:2], ("A", "A"), [[1.0, 2.0], [3.0, 4.0]])

    def test_stock_panel_rejects_negative_dividend(self):
        with pytest.raises(ValidationError):
            make_panel(D[:1], ("A",), [[1.0]], [[-0.1]])

    def test_arrays_read_only(self):
        panel = make_panel(D[:2], ("A",), [[1.0], [2.0]])
        with pytest.raises(ValueError):
            panel.close[0, 0] = 5.0

    def test_return_panel_row_slice(self):
        rp = ReturnPanel(D[:3], ("A",), np.array([[0.1], [0.2], [0.3]]))
        sliced = rp.rows(1, 3)
        assert sliced.dates == (D[1], D[2])
        npt.assert_array_equal(sliced.returns, [[0.2], [0.3]])
        with pytest.raises(ValidationError):
            rp.rows(2, 2)

    def test_index_series_positive(self):
        with pytest.raises(ValidationError):
            IndexSeries(D[:2], np.array([1.0, -2.0]))


class TestLoadIndex:
    def test_basic(self):
        idx = load_index(_csv("date,value\n2020-01-07,110\n2020-01-06,100\n"))
        assert idx.dates == (D[0], D[1])  # sorted ascending
        npt.assert_array_equal(idx.values, [100.0, 110.0])

    def test_bad_header(self):
        with pytest.raises(ParseError):
            load_index(_csv("date,level\n2020-01-06,100\n"))

    def test_bad_row(self):
        with pytest.raises(ParseError):
            load_index(_csv("date,value\n2020-01-06,abc\n"))
