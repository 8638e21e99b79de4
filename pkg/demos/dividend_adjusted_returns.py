"""Dividend adjustment: from raw closes and cash dividends to total returns."""

from datetime import date

import numpy as np

from divmetrics import StockPanel, adjust_prices, dividend_factors, simple_returns

# A single stock over three days. It closes at 100, then 101, then 100.50,
# and pays a 1.00 dividend on the second day.
panel = StockPanel(
    dates=(date(2020, 1, 6), date(2020, 1, 7), date(2020, 1, 8)),
    tickers=("ACME",),
    close=np.array([[100.0], [101.0], [100.5]]),
    dividend=np.array([[0.0], [1.0], [0.0]]),
)

# On a dividend day the holder receives D on top of the price move, so the
# day's gross growth is scaled by (1 + D/P). The cumulative product of those
# daily factors converts every close into a total-return price.
daily, cumulative = dividend_factors(panel, "ACME")
print("daily factors     ", daily)
print("cumulative factors", cumulative)

adjusted = adjust_prices(panel, "ACME")
print("raw closes        ", panel.close[:, 0])
print("adjusted closes   ", adjusted)

# Simple returns computed on the adjusted series. The first return covers
# the 100 -> 101 move plus the 1.00 dividend: (101 + 1 - 100) / 100 = 2%.
returns = simple_returns(panel)
for d, r in zip(returns.dates, returns.returns[:, 0]):
    print(f"{d}  total return {r:+.6f}")

# Without dividends the adjustment is the identity and the returns are the
# plain price relatives.
bare = StockPanel(panel.dates, panel.tickers, panel.close,
                  np.zeros_like(panel.dividend))
print("dividend-free returns", simple_returns(bare).returns[:, 0])
