"""
Sparse SARIMA Toolkit - command line

Subcommands: identify, fit, diagnose, forecast, accuracy, decompose, impact,
simulate. Reports go to stdout as delimited text (default) or one JSON
document (``--format json``); logs and errors go to stderr.

Exit status: 0 on success, 1 on a modelling/data error, 2 on a usage error.
Errors are printed as a single line ``error: <kind>: <message>``.
"""

import argparse
import logging
import sys
from typing import Dict, List, Optional, Sequence, TextIO, Tuple

from candidate_sweep import CandidateSweep
from config import RunConfig, build_config
from core_series import MonthIndex, MonthlySeries, difference_chain, slice_series
from decomposition import decompose, rank_seasonal_indices
from diagnostics import residual_diagnostics
from errors import SarimaToolkitError, UsageError
from estimation import FitOptions, fit
from forecasting import accuracy, fitted_values, forecast
from identification import AdfType, acf, adf_test, pacf
from impact import quantify_impact
from ingestion import load_csv
from model_store import load_model, save_model
from reporting import Report
from sarima import CANDIDATE_MODELS, FINAL_MODEL, CoefficientSet, FittedModel, simulate
from spec_notation import parse_spec, render_spec

logger = logging.getLogger("sarima-cli")

COMMANDS = ("identify", "fit", "diagnose", "forecast", "accuracy", "decompose", "impact", "simulate")


class ToolkitArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that raises UsageError instead of exiting."""

    def error(self, message):
        raise UsageError(message)


def _split_list(values: Optional[List[str]]) -> List[str]:
    items = []
    for value in values or []:
        items.extend(part.strip() for part in value.split(",") if part.strip())
    return items


def _parse_levels(text: str) -> Tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(","))
    except ValueError as e:
        raise UsageError(f"--levels expects comma-separated numbers, got '{text}'") from e


def _parse_coefficients(text: Optional[str]) -> Dict[str, float]:
    if not text:
        return {}
    values = {}
    for item in _split_list([text]):
        slot, _, raw = item.partition("=")
        try:
            values[slot.strip()] = float(raw)
        except ValueError as e:
            raise UsageError(f"--coef entries look like ma1=-0.5, got '{item}'") from e
    return values


def build_parser() -> ToolkitArgumentParser:
    parser = ToolkitArgumentParser(
        prog="sarima-toolkit",
        description="Sparse seasonal ARIMA toolkit - identification, fitting, diagnostics, forecasting, impact",
    )
    parser.add_argument("--verbose", action="store_true", help="Log progress (INFO)")
    parser.add_argument("--debug", action="store_true", help="Log optimizer detail (DEBUG)")
    subparsers = parser.add_subparsers(dest="command", parser_class=ToolkitArgumentParser)

    def add_common(sub, data: bool = True):
        if data:
            sub.add_argument("--input", type=str, help="Traffic CSV (year, month, arrivals/departures/total)")
            sub.add_argument("--column", type=str, default="total",
                             help="Traffic column to model (default: total)")
        sub.add_argument("--format", dest="output_format", default="text", choices=["text", "json"],
                         help="Output format (default: text)")

    def add_model_source(sub):
        sub.add_argument("--spec", type=str, help='Model notation, e.g. "(0,1,1)x(4,1,0)12[sar3=0]"')
        sub.add_argument("--mask", action="append", help="Extra zero-pinned slots (repeatable or comma-separated)")
        sub.add_argument("--train", type=str, help="Training window YYYY-MM:YYYY-MM")
        sub.add_argument("--model", type=str, help="Load a saved fitted-model document instead of fitting")
        sub.add_argument("--seed", type=int, default=0, help="Seed for jitter restarts")
        sub.add_argument("--restarts", type=int, default=3, help="Jitter restarts when no start converges")

    identify = subparsers.add_parser("identify", help="ACF/PACF and ADF unit-root tables")
    add_common(identify)
    identify.add_argument("--train", type=str, help="Window to analyse YYYY-MM:YYYY-MM")
    identify.add_argument("--d", type=int, default=0, help="Ordinary differences before analysis")
    identify.add_argument("--D", type=int, default=0, help="Seasonal differences before analysis")
    identify.add_argument("--period", type=int, default=12, help="Seasonal period (default: 12)")
    identify.add_argument("--max-lag", type=int, default=24, help="Correlogram lags (default: 24)")
    identify.add_argument("--adf-lag", type=int, default=4, help="ADF lags 0..N (default: 4)")

    fit_cmd = subparsers.add_parser("fit", help="Maximum-likelihood fit")
    add_common(fit_cmd)
    add_model_source(fit_cmd)
    fit_cmd.add_argument("--save-model", type=str, help="Write the fitted-model document here")

    diagnose = subparsers.add_parser("diagnose", help="Residual diagnostics")
    add_common(diagnose)
    add_model_source(diagnose)
    diagnose.add_argument("--max-lag", type=int, default=24, help="Ljung-Box / ACF lags (default: 24)")

    forecast_cmd = subparsers.add_parser("forecast", help="Interval forecasts")
    add_common(forecast_cmd)
    add_model_source(forecast_cmd)
    forecast_cmd.add_argument("--h", type=int, default=7, help="Forecast horizon (default: 7)")
    forecast_cmd.add_argument("--levels", type=str, default="0.80,0.95", help="Confidence levels")
    forecast_cmd.add_argument("--test", type=str, help="Truth window YYYY-MM:YYYY-MM to print alongside")
    forecast_cmd.add_argument("--fitted", action="store_true", help="Also emit in-sample fitted values")

    accuracy_cmd = subparsers.add_parser("accuracy", help="Out-of-sample accuracy across candidates")
    add_common(accuracy_cmd)
    accuracy_cmd.add_argument("--spec", action="append", help="Candidate spec (repeatable; default: catalogue)")
    accuracy_cmd.add_argument("--train", type=str, help="Training window YYYY-MM:YYYY-MM")
    accuracy_cmd.add_argument("--test", type=str, help="Evaluation window YYYY-MM:YYYY-MM")
    accuracy_cmd.add_argument("--workers", type=int, help="Concurrent fits (default: planned from load)")
    accuracy_cmd.add_argument("--seed", type=int, default=0)
    accuracy_cmd.add_argument("--restarts", type=int, default=3)

    decompose_cmd = subparsers.add_parser("decompose", help="Classical additive decomposition")
    add_common(decompose_cmd)
    decompose_cmd.add_argument("--train", type=str, help="Window to decompose YYYY-MM:YYYY-MM")
    decompose_cmd.add_argument("--period", type=int, default=12)

    impact_cmd = subparsers.add_parser("impact", help="Counterfactual event-loss report")
    add_common(impact_cmd)
    impact_cmd.add_argument("--spec", type=str, help="Model notation (default: final candidate)")
    impact_cmd.add_argument("--mask", action="append")
    impact_cmd.add_argument("--train-start", type=MonthIndex.parse, help="First training month YYYY-MM (default: series start)")
    impact_cmd.add_argument("--train-end", type=MonthIndex.parse, required=True, help="Last pre-event month YYYY-MM")
    impact_cmd.add_argument("--horizon", type=int, required=True, help="Event-window length in months")
    impact_cmd.add_argument("--levels", type=str, default="0.80,0.95")
    impact_cmd.add_argument("--seed", type=int, default=0)
    impact_cmd.add_argument("--restarts", type=int, default=3)

    simulate_cmd = subparsers.add_parser("simulate", help="Simulate a SARIMA path")
    add_common(simulate_cmd, data=False)
    simulate_cmd.add_argument("--spec", type=str, required=True)
    simulate_cmd.add_argument("--mask", action="append")
    simulate_cmd.add_argument("--coef", type=str, help="Coefficients, e.g. ma1=-0.5,sar1=-0.6")
    simulate_cmd.add_argument("--sigma2", type=float, default=1.0)
    simulate_cmd.add_argument("--n", type=int, required=True)
    simulate_cmd.add_argument("--seed", type=int, default=0)
    simulate_cmd.add_argument("--start", type=MonthIndex.parse, default=MonthIndex(2000, 1), help="First month YYYY-MM")

    return parser


def configure_logging(verbose: bool, debug: bool, stream: Optional[TextIO] = None) -> None:
    level = logging.DEBUG if debug else logging.INFO if verbose else logging.WARNING
    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=stream or sys.stderr,
        force=True,
    )


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    spec = getattr(args, "spec", None)
    settings = dict(
        input_path=getattr(args, "input", None),
        column=getattr(args, "column", "total"),
        train_window=getattr(args, "train", None),
        test_window=getattr(args, "test", None),
        spec=spec if isinstance(spec, str) else None,
        mask=_split_list(getattr(args, "mask", None)),
        output_format=args.output_format,
        max_lag=getattr(args, "max_lag", 24),
        seed=getattr(args, "seed", 0),
        restarts=getattr(args, "restarts", 3),
        workers=getattr(args, "workers", None),
    )
    if getattr(args, "levels", None):
        settings["levels"] = _parse_levels(args.levels)
    return build_config(**settings)


def _load_series(config: RunConfig) -> MonthlySeries:
    if not config.input_path:
        raise UsageError("--input is required for this command")
    return load_csv(config.input_path, config.column)


def _window(series: MonthlySeries, window: Optional[Tuple[MonthIndex, MonthIndex]]) -> MonthlySeries:
    return series if window is None else slice_series(series, *window)


def _fit_options(config: RunConfig) -> FitOptions:
    return FitOptions(restarts=config.restarts, seed=config.seed)


def _obtain_model(args, config: RunConfig) -> Tuple[FittedModel, Optional[MonthlySeries]]:
    """Saved model if ``--model`` was given, else a fresh fit; also the full series when loaded."""
    if getattr(args, "model", None):
        model = load_model(args.model)
        series = _load_series(config) if config.input_path else None
        return model, series
    series = _load_series(config)
    train = _window(series, config.train())
    return fit(config.sarima_spec(), train, options=_fit_options(config)), series


def _fit_records(model: FittedModel) -> List[Dict]:
    return [{
        "spec": render_spec(model.spec),
        "train": f"{model.train_start}:{model.train_end}",
        "n_effective": model.n_effective,
        "loglik": model.loglik,
        "sigma2": model.sigma2,
        "aic": model.aic,
        "bic": model.bic,
        "aicc": model.aicc,
        "converged": model.converged,
        "se_available": model.se_available,
    }]


def cmd_identify(args, config: RunConfig) -> Report:
    series = _window(_load_series(config), config.train())
    if args.d or args.D:
        series, _ = difference_chain(series, args.d, args.D, args.period)
    report = Report("identify")
    for result in (acf(series, args.max_lag), pacf(series, args.max_lag)):
        report.add(result.kind, [
            {"lag": int(k), result.kind: float(v), "band": result.band, "outside_band": bool(abs(v) > result.band)}
            for k, v in zip(result.lags, result.values)
        ])
    rows = []
    for adf_type in AdfType:
        for result in adf_test(series, args.adf_lag, adf_type):
            rows.append({
                "type": adf_type.value, "lag": result.lag, "statistic": result.statistic,
                "p_value": result.p_value, "p_display": result.p_display(),
                "nobs": result.nobs,
            })
    report.add("adf", rows)
    return report


def cmd_fit(args, config: RunConfig) -> Report:
    model, _ = _obtain_model(args, config)
    if args.save_model:
        save_model(model, args.save_model)
    report = Report("fit")
    report.add("coefficients", [row.to_dict() for row in model.coefficient_rows()])
    report.add("fit", _fit_records(model))
    return report


def cmd_diagnose(args, config: RunConfig) -> Report:
    model, _ = _obtain_model(args, config)
    bundle = residual_diagnostics(model, config.max_lag)
    report = Report("diagnose")
    report.add("ljung_box", bundle.ljung_box.records())
    report.add("normality", [bundle.normality.to_dict()])
    report.add("residual_acf", [
        {"lag": int(k), "acf": float(v), "band": bundle.residual_acf.band}
        for k, v in zip(bundle.residual_acf.lags, bundle.residual_acf.values)
    ])
    report.add("qq", [{"theoretical": t, "empirical": e} for t, e in bundle.qq])
    summary = bundle.summary()
    summary["rejected_lags"] = " ".join(str(k) for k in summary["rejected_lags"])
    report.add("summary", [summary])
    return report


def cmd_forecast(args, config: RunConfig) -> Report:
    if args.h < 1:
        raise UsageError("--h must be positive")
    model, series = _obtain_model(args, config)
    result = forecast(model, args.h, config.levels)
    truth = None
    if config.test() is not None:
        if series is None:
            raise UsageError("--test needs --input")
        truth = _window(series, config.test())
    report = Report("forecast")
    report.add("forecast", result.rows(truth))
    if args.fitted:
        fitted = fitted_values(model)
        report.add("fitted", [
            {"month": str(month), "observed": model.train.value_at(month), "fitted": float(value)}
            for month, value in zip(fitted.months(), fitted.values)
        ])
    return report


def cmd_accuracy(args, config: RunConfig) -> Report:
    series = _load_series(config)
    if config.train() is None or config.test() is None:
        raise UsageError("accuracy needs --train and --test windows")
    train = _window(series, config.train())
    truth = _window(series, config.test())
    if args.spec:
        candidates = {text: parse_spec(text).with_mask(config.mask) for text in args.spec}
    else:
        candidates = dict(CANDIDATE_MODELS)

    sweep = CandidateSweep(options=_fit_options(config)).run(train, candidates, workers=config.workers)
    models = sweep.models()
    if not models:
        raise SarimaToolkitError("no candidate model could be fitted")
    table = accuracy(list(models.values()), truth)
    best = table.best("rmse")
    report = Report("accuracy")
    report.add("accuracy", [dict(row, best=row["model"] == best.label) for row in table.records()])
    report.add("fits", [c.to_dict() for c in sweep.candidates])
    return report


def cmd_decompose(args, config: RunConfig) -> Report:
    series = _window(_load_series(config), config.train())
    result = decompose(series, args.period)
    report = Report("decompose")
    report.add("decomposition", result.rows())
    report.add("seasonal_ranking", [
        {"rank": rank, "position": position, "index": value}
        for rank, (position, value) in enumerate(rank_seasonal_indices(result), start=1)
    ])
    return report


def cmd_impact(args, config: RunConfig) -> Report:
    series = _load_series(config)
    spec = config.sarima_spec() if config.spec else CANDIDATE_MODELS[FINAL_MODEL].with_mask(config.mask)
    loss = quantify_impact(
        spec, series, args.train_end, args.horizon,
        train_start=args.train_start,
        options=_fit_options(config),
        levels=config.levels,
    )
    report = Report("impact")
    report.add("coefficients", [{"slot": slot, "coef": value} for slot, value in loss.coefficients.as_dict().items()])
    report.add("loss", loss.rows())
    if loss.counterfactual is not None:
        report.add("counterfactual", loss.counterfactual.rows())
    return report


def cmd_simulate(args, config: RunConfig) -> Report:
    spec = config.sarima_spec()
    coef = CoefficientSet.from_mapping(spec, _parse_coefficients(args.coef))
    series = simulate(spec, coef, args.sigma2, args.n, args.seed, start=args.start)
    report = Report("simulate")
    report.add("series", [{"month": str(m), "value": float(v)} for m, v in zip(series.months(), series.values)])
    return report


HANDLERS = {
    "identify": cmd_identify,
    "fit": cmd_fit,
    "diagnose": cmd_diagnose,
    "forecast": cmd_forecast,
    "accuracy": cmd_accuracy,
    "decompose": cmd_decompose,
    "impact": cmd_impact,
    "simulate": cmd_simulate,
}


def run_command(
    argv: Sequence[str],
    stdout: Optional[TextIO] = None,
    stderr: Optional[TextIO] = None,
) -> int:
    """Run one CLI invocation and return its exit status."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
        if args.command is None:
            raise UsageError(f"a subcommand is required ({', '.join(COMMANDS)})")
        configure_logging(args.verbose, args.debug, stderr)
        config = _config_from_args(args)
        report = HANDLERS[args.command](args, config)
        stdout.write(report.render(config.output_format))
        return 0
    except UsageError as e:
        stderr.write(f"error: {e.kind}: {e}\n")
        return 2
    except SarimaToolkitError as e:
        stderr.write(f"error: {e.kind}: {e}\n")
        return 1
    except (ValueError, IndexError, ArithmeticError) as e:
        stderr.write(f"error: invalid: {e}\n")
        return 1
    except SystemExit as e:       # --help
        return int(e.code or 0)


def main():
    """CLI entry point."""
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
