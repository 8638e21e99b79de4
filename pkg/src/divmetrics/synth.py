"""Deterministic synthetic return panels with known population structure.

These generators provide analytic ground truth for the measures: an
equicorrelated panel has a known correlation matrix, KMO, and spectrum,
and a regime-switching one-factor panel has a known per-regime PC1
variance share. They stand in for proprietary market data in tests and
demos.

Reproducibility contract (pinned, platform-independent):

* Bit source: Philox4x64-10 (Salmon et al. counter-based generator),
  key = (seed, purpose << 32 | stream), counter starting at 1. That is
  bit-identical to the raw word stream of ``numpy.random.Philox`` for
  the same key, which the tests use as an independent oracle.
* Every (purpose, stream) pair owns its own counter space, so adding
  stocks or lengthening the horizon never changes existing draws.
* Uniforms take the top 53 bits of each word: u = (word >> 11 + 0.5) * 2**-53.
* Normals are the inverse normal CDF of those uniforms
  (``scipy.special.ndtri``).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from datetime import date, timedelta
from pathlib import Path

import numpy as np
from scipy.special import ndtri

from .errors import ValidationError
from .market_data import ReturnPanel

__all__ = [
    "Regime",
    "FactorSpec",
    "equicorrelated_returns",
    "factor_model_returns",
    "factor_spec_from_json",
    "normal_stream",
    "trading_dates",
    "write_price_fixture",
]

_M0 = np.uint64(0xD2E7470EE14C6C93)
_M1 = np.uint64(0xCA5A826395121157)
_W0 = np.uint64(0x9E3779B97F4A7C15)
_W1 = np.uint64(0xBB67AE8584CAA73B)
_MASK32 = np.uint64(0xFFFFFFFF)
_SH32 = np.uint64(32)

_FACTOR_PURPOSE = 0
_IDIO_PURPOSE = 1

# Factor-model returns are scaled so that unit-variance loading specs
# correspond to ~1% daily moves; correlations, and therefore every
# measure in this package, are unaffected by the scale, but raw draws
# near or below -1 would not be valid simple returns.
FACTOR_RETURN_SCALE = 0.01


def _mulhilo(m: np.uint64, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Low and high words of the 128-bit product m * x, elementwise."""
    lo = m * x
    a_lo = m & _MASK32
    a_hi = m >> _SH32
    b_lo = x & _MASK32
    b_hi = x >> _SH32
    mid = (a_lo * b_lo >> _SH32) + (a_hi * b_lo & _MASK32) + (a_lo * b_hi & _MASK32)
    hi = a_hi * b_hi + (a_hi * b_lo >> _SH32) + (a_lo * b_hi >> _SH32) + (mid >> _SH32)
    return hi, lo


def _philox_words(key0: int, key1: int, n_words: int) -> np.ndarray:
    """The first n_words of the Philox4x64-10 stream for this key."""
    n_blocks = -(-n_words // 4)
    with np.errstate(over="ignore"):
        x0 = np.arange(1, 1 + n_blocks, dtype=np.uint64)
        x1 = np.zeros(n_blocks, dtype=np.uint64)
        x2 = np.zeros(n_blocks, dtype=np.uint64)
        x3 = np.zeros(n_blocks, dtype=np.uint64)
        k0 = np.uint64(key0)
        k1 = np.uint64(key1)
        for _ in range(10):
            hi0, lo0 = _mulhilo(_M0, x0)
            hi1, lo1 = _mulhilo(_M1, x2)
            x0, x1, x2, x3 = hi1 ^ x1 ^ k0, lo1, hi0 ^ x3 ^ k1, lo0
            k0 = k0 + _W0
            k1 = k1 + _W1
    out = np.empty(n_blocks * 4, dtype=np.uint64)
    out[0::4] = x0
    out[1::4] = x1
    out[2::4] = x2
    out[3::4] = x3
    return out[:n_words]


def normal_stream(seed: int, purpose: int, stream: int, count: int) -> np.ndarray:
    """``count`` standard-normal draws from the pinned (seed, purpose, stream)."""
    if not (0 <= seed < 2**64):
        raise ValidationError("seed must fit in an unsigned 64-bit integer")
    if not (0 <= purpose < 2**32 and 0 <= stream < 2**32):
        raise ValidationError("purpose and stream must fit in 32 bits")
    words = _philox_words(seed, (purpose << 32) | stream, count)
    uniforms = ((words >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53
    return ndtri(uniforms)


def trading_dates(count: int, start: date = date(2000, 1, 3)) -> tuple[date, ...]:
    """``count`` consecutive weekdays starting at ``start`` (a Monday)."""
    if count < 1:
        raise ValidationError("need at least one date")
    out = []
    d = start
    while len(out) < count:
        if d.weekday() < 5:
            out.append(d)
        d += timedelta(days=1)
    return tuple(out)


def _tickers(n: int) -> tuple[str, ...]:
    return tuple(f"S{i:04d}" for i in range(n))


def equicorrelated_returns(
    n: int, t: int, rho: float, vol: float, seed: int
) -> ReturnPanel:
    """Panel of n stocks over t days with pairwise population correlation rho.

    r_it = vol * (sqrt(rho) * f_t + sqrt(1 - rho) * e_it) with f and the
    e_i independent unit normals, so every pair correlates at exactly rho
    in population and each return has standard deviation vol.
    """
    if n < 2 or t < 2:
        raise ValidationError("need n >= 2 stocks and t >= 2 days")
    if not (0.0 <= rho < 1.0):
        raise ValidationError(f"rho must be in [0, 1), got {rho}")
    if not vol > 0.0:
        raise ValidationError(f"vol must be positive, got {vol}")
    factor = normal_stream(seed, _FACTOR_PURPOSE, 0, t)
    returns = np.empty((t, n))
    common = np.sqrt(rho) * factor
    idio_scale = np.sqrt(1.0 - rho)
    for i in range(n):
        e = normal_stream(seed, _IDIO_PURPOSE, i, t)
        returns[:, i] = vol * (common + idio_scale * e)
    return ReturnPanel(trading_dates(t), _tickers(n), returns)


@dataclass(frozen=True)
class Regime:
    """One contiguous segment of a factor model's parameters."""

    start_day: int
    beta: float
    idio_vol: float

    def __post_init__(self):
        if self.start_day < 0:
            raise ValidationError("regime start_day must be >= 0")
        if not (0.0 <= self.beta < 1.0):
            raise ValidationError(f"beta must be in [0, 1), got {self.beta}")
        if not self.idio_vol > 0.0:
            raise ValidationError(f"idio_vol must be positive, got {self.idio_vol}")

    @property
    def population_correlation(self) -> float:
        """Pairwise correlation implied by unit factor variance."""
        return self.beta**2 / (self.beta**2 + self.idio_vol**2)


@dataclass(frozen=True)
class FactorSpec:
    """A one-factor market in piecewise-constant regimes."""

    n_stocks: int
    horizon: int
    regimes: tuple[Regime, ...]
    seed: int

    def __post_init__(self):
        object.__setattr__(self, "regimes", tuple(self.regimes))
        if self.n_stocks < 2:
            raise ValidationError("need at least 2 stocks")
        if self.horizon < 2:
            raise ValidationError("need a horizon of at least 2 days")
        if not self.regimes:
            raise ValidationError("need at least one regime")
        if self.regimes[0].start_day != 0:
            raise ValidationError("first regime must start at day 0")
        starts = [r.start_day for r in self.regimes]
        if any(b <= a for a, b in zip(starts, starts[1:])):
            raise ValidationError("regime start days must be strictly increasing")
        if starts[-1] >= self.horizon:
            raise ValidationError("last regime starts beyond the horizon")


def factor_model_returns(spec: FactorSpec) -> ReturnPanel:
    """Returns r_it = 0.01 * (beta_t * f_t + idio_t * e_it) per regime.

    The 0.01 scale keeps draws in a plausible daily-return range; the
    population correlation within a regime is beta^2/(beta^2 + idio^2)
    regardless of scale, and the per-regime PC1 variance share is
    100*(1 + (n-1)*rho)/n.
    """
    t, n = spec.horizon, spec.n_stocks
    beta = np.empty(t)
    idio = np.empty(t)
    starts = [r.start_day for r in spec.regimes] + [t]
    for r, begin, end in zip(spec.regimes, starts, starts[1:]):
        beta[begin:end] = r.beta
        idio[begin:end] = r.idio_vol
    factor = normal_stream(spec.seed, _FACTOR_PURPOSE, 0, t)
    returns = np.empty((t, n))
    common = beta * factor
    for i in range(n):
        e = normal_stream(spec.seed, _IDIO_PURPOSE, i, t)
        returns[:, i] = FACTOR_RETURN_SCALE * (common + idio * e)
    return ReturnPanel(trading_dates(t), _tickers(n), returns)


def factor_spec_from_json(text: str) -> FactorSpec:
    """Parse a FactorSpec from its JSON form.

    Expected shape::

        {"n_stocks": 30, "horizon": 4000, "seed": 42,
         "regimes": [{"start_day": 0, "beta": 0.3, "idio_vol": 0.6}, ...]}
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValidationError(f"invalid spec JSON: {e}") from None
    if not isinstance(raw, dict):
        raise ValidationError("spec JSON must be an object")
    required = {"n_stocks", "horizon", "seed", "regimes"}
    missing = required - raw.keys()
    if missing:
        raise ValidationError(f"spec JSON missing keys: {sorted(missing)}")
    unknown = raw.keys() - required
    if unknown:
        raise ValidationError(f"spec JSON has unknown keys: {sorted(unknown)}")
    try:
        regimes = tuple(
            Regime(int(r["start_day"]), float(r["beta"]), float(r["idio_vol"]))
            for r in raw["regimes"]
        )
        return FactorSpec(
            n_stocks=int(raw["n_stocks"]),
            horizon=int(raw["horizon"]),
            regimes=regimes,
            seed=int(raw["seed"]),
        )
    except (TypeError, KeyError, ValueError) as e:
        raise ValidationError(f"malformed spec JSON: {e}") from None


def write_price_fixture(
    returns: ReturnPanel,
    prices_destination,
    dividends_destination,
    initial_price: float = 100.0,
) -> None:
    """Emit a return panel as a standard prices/dividends CSV pair.

    Prices start at ``initial_price`` and cumulate the returns; the
    dividend file is header-only. Feeding the pair back through the
    loader exercises the full ingestion path (up to the tiny rounding
    introduced by cumulating and re-differencing).
    """
    if not initial_price > 0:
        raise ValidationError("initial_price must be positive")
    t = returns.n_dates
    last = returns.dates[-1]
    extra = last + timedelta(days=1)
    while extra.weekday() >= 5:
        extra += timedelta(days=1)
    dates = returns.dates + (extra,)
    prices = np.empty((t + 1, len(returns.tickers)))
    prices[0] = initial_price
    np.cumprod(1.0 + returns.returns, axis=0, out=prices[1:])
    prices[1:] *= initial_price

    def _open(dest):
        if isinstance(dest, (str, Path)):
            return open(dest, "w", encoding="utf-8", newline=""), True
        return dest, False

    stream, close_after = _open(prices_destination)
    try:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(("date", "ticker", "close"))
        for row, d in enumerate(dates):
            iso = d.isoformat()
            for j, ticker in enumerate(returns.tickers):
                writer.writerow((iso, ticker, format(prices[row, j], ".17g")))
    finally:
        if close_after:
            stream.close()
    stream, close_after = _open(dividends_destination)
    try:
        csv.writer(stream, lineterminator="\n").writerow(("date", "ticker", "amount"))
    finally:
        if close_after:
            stream.close()
