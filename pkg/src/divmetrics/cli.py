"""Command-line front end.

Subcommands:

* ``run``     - full rolling pipeline to a metrics CSV plus diagnostics CSV
* ``synth``   - emit a synthetic prices/dividends fixture from a spec JSON
* ``inspect`` - print one window's matrices and spectrum

Exit codes: 0 ok, 1 validation error, 2 I/O error, 3 numeric error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

from .errors import DivMetricsError, NumericError, ValidationError
from .market_data import (
    IndexSeries,
    ReturnPanel,
    complete_universe,
    load_index,
    load_panel,
    simple_returns,
)
from .matrix_stats import correlation_matrix, covariance_matrix, partial_correlations, write_matrix_csv
from .pca import correlation_spectrum, write_spectrum_csv
from .rolling import (
    MEASURES,
    WindowConfig,
    run_series_returns,
    window_schedule,
    write_metrics_csv,
)
from .selection import SelectionCriteria
from .synth import factor_model_returns, factor_spec_from_json, write_price_fixture

__all__ = ["RunConfig", "main"]

# CLI measure flags to MetricsRow field names.
_MEASURE_FLAGS = {"kmo": "kmo", "pc1": "pc1_pct", "select": "n_selected", "dr": "dr"}


@dataclass(frozen=True)
class RunConfig:
    """Validated inputs for the run subcommand: exactly one return source
    (price CSVs or a synthetic spec), a window/criteria setup, and an
    output path."""

    output_path: Path
    prices_path: Path | None = None
    dividends_path: Path | None = None
    index_path: Path | None = None
    synth_spec_path: Path | None = None
    window_length: int = 504
    step: int = 5
    deletion: float = 0.7
    stop: float = 0.5
    min_retained: int = 2
    measures: tuple[str, ...] = MEASURES
    threads: int = 1

    def __post_init__(self):
        if (self.prices_path is None) == (self.synth_spec_path is None):
            raise ValidationError(
                "exactly one input source is required: --prices or --synth-spec"
            )
        if self.synth_spec_path is not None and (
            self.dividends_path is not None or self.index_path is not None
        ):
            raise ValidationError("--dividends and --index require --prices input")
        if self.threads < 1:
            raise ValidationError("--threads must be at least 1")

    @property
    def window_config(self) -> WindowConfig:
        criteria = SelectionCriteria(
            deletion_threshold=self.deletion,
            stop_threshold=self.stop,
            min_retained=self.min_retained,
        )
        return WindowConfig(length=self.window_length, step=self.step, criteria=criteria)


def _diagnostics_path(output: Path) -> Path:
    return output.with_name(output.stem + "_diagnostics" + output.suffix)


def _load_returns(
    prices_path: Path | None,
    dividends_path: Path | None,
    synth_spec_path: Path | None,
) -> ReturnPanel:
    if synth_spec_path is not None:
        return factor_model_returns(
            factor_spec_from_json(synth_spec_path.read_text(encoding="utf-8"))
        )
    panel = load_panel(prices_path, dividends_path)
    if panel.n_dates >= 2:
        before = panel.n_tickers
        panel = complete_universe(panel, panel.dates[0], panel.dates[-1])
        dropped = before - panel.n_tickers
        if dropped:
            print(
                f"note: dropped {dropped} ticker(s) with incomplete prices",
                file=sys.stderr,
            )
    return simple_returns(panel)


def _cmd_run(args: argparse.Namespace) -> int:
    if args.measure:
        seen = []
        for flag in args.measure:
            name = _MEASURE_FLAGS[flag]
            if name not in seen:
                seen.append(name)
        measures = tuple(m for m in MEASURES if m in seen)
    else:
        measures = MEASURES
    config = RunConfig(
        output_path=Path(args.output),
        prices_path=Path(args.prices) if args.prices else None,
        dividends_path=Path(args.dividends) if args.dividends else None,
        index_path=Path(args.index) if args.index else None,
        synth_spec_path=Path(args.synth_spec) if args.synth_spec else None,
        window_length=args.length,
        step=args.step,
        deletion=args.deletion,
        stop=args.stop,
        min_retained=args.min_retained,
        measures=measures,
        threads=args.threads,
    )
    returns = _load_returns(config.prices_path, config.dividends_path, config.synth_spec_path)
    index: IndexSeries | None = None
    if config.index_path is not None:
        index = load_index(config.index_path)
    series = run_series_returns(
        returns, config.window_config, index, config.measures, config.threads
    )
    diagnostics = _diagnostics_path(config.output_path)
    write_metrics_csv(series, config.output_path, diagnostics)
    failures = sum(len(r.errors) for r in series.rows)
    print(f"wrote {len(series)} rows to {config.output_path} "
          f"({failures} field failure(s), see {diagnostics.name})")
    return 0


def _cmd_synth(args: argparse.Namespace) -> int:
    spec = factor_spec_from_json(Path(args.spec).read_text(encoding="utf-8"))
    returns = factor_model_returns(spec)
    write_price_fixture(returns, args.prices, args.dividends)
    print(f"wrote {spec.n_stocks} tickers x {spec.horizon + 1} dates to {args.prices}")
    return 0


def _cmd_inspect(args: argparse.Namespace) -> int:
    returns = _load_returns(
        Path(args.prices) if args.prices else None,
        Path(args.dividends) if args.dividends else None,
        Path(args.synth_spec) if args.synth_spec else None,
    )
    cfg = WindowConfig(length=args.length, step=args.step)
    schedule = window_schedule(returns.n_dates, cfg)
    if not (0 <= args.window < len(schedule)):
        raise ValidationError(
            f"--window must be in [0, {len(schedule) - 1}], got {args.window}"
        )
    start, stop = schedule[args.window]
    window = returns.rows(start, stop)
    out = sys.stdout
    print(f"# window {args.window}: {window.dates[0]} -> {window.dates[-1]}", file=out)
    corr = correlation_matrix(window)
    print("# correlation", file=out)
    write_matrix_csv(corr, out)
    print("# covariance", file=out)
    write_matrix_csv(covariance_matrix(window), out)
    print("# partial_correlations", file=out)
    write_matrix_csv(partial_correlations(corr), out)
    print("# spectrum (eigenvalue row, then eigenvector columns)", file=out)
    write_spectrum_csv(correlation_spectrum(corr), out)
    return 0


class _Parser(argparse.ArgumentParser):
    """Argument errors are validation errors (exit 1), not usage exit 2."""

    def error(self, message):
        raise ValidationError(message)


def _add_input_options(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--prices", help="prices CSV (date,ticker,close)")
    sub.add_argument("--dividends", help="dividends CSV (date,ticker,amount)")
    sub.add_argument("--synth-spec", help="synthetic factor-model spec JSON")


def _add_window_options(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--length", type=int, default=504,
                     help="window length in return rows (default 504)")
    sub.add_argument("--step", type=int, default=5,
                     help="rows between window starts (default 5)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="divmetrics",
                     description="Rolling diversification measures over return panels")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="compute the rolling metrics series")
    _add_input_options(run)
    run.add_argument("--index", help="index CSV (date,value) for window returns")
    _add_window_options(run)
    run.add_argument("--deletion", type=float, default=0.7,
                     help="eigenvalue deletion threshold (default 0.7)")
    run.add_argument("--stop", type=float, default=0.5,
                     help="eigenvalue stop threshold (default 0.5)")
    run.add_argument("--min-retained", type=int, default=2,
                     help="selection floor (default 2)")
    run.add_argument("--measure", action="append", choices=sorted(_MEASURE_FLAGS),
                     help="restrict to one measure (repeatable; default all)")
    run.add_argument("--threads", type=int, default=1,
                     help="parallel window evaluation threads (default 1)")
    run.add_argument("--output", required=True, help="metrics CSV path")
    run.set_defaults(func=_cmd_run)

    synth = sub.add_parser("synth", help="emit a synthetic prices/dividends fixture")
    synth.add_argument("--spec", required=True, help="factor-model spec JSON")
    synth.add_argument("--prices", required=True, help="output prices CSV")
    synth.add_argument("--dividends", required=True, help="output dividends CSV")
    synth.set_defaults(func=_cmd_synth)

    inspect = sub.add_parser("inspect", help="print one window's matrices/spectrum")
    _add_input_options(inspect)
    _add_window_options(inspect)
    inspect.add_argument("--window", type=int, default=0,
                         help="window index in the schedule (default 0)")
    inspect.set_defaults(func=_cmd_inspect)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except NumericError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except DivMetricsError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
