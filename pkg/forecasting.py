"""
Forecasting

Minimum-MSE forecasts of a fitted SARIMA model with Gaussian prediction
intervals on the original scale, in-sample one-step fitted values, and
forecast accuracy tables across candidate models.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import signal, stats

from core_series import MonthIndex, MonthlySeries, integrate
from errors import IndexRangeError
from sarima import FittedModel, companion_step, expand_polynomials, kalman_filter

logger = logging.getLogger(__name__)

DEFAULT_LEVELS = (0.80, 0.95)


def _check_levels(levels: Sequence[float]) -> Tuple[float, ...]:
    levels = tuple(sorted(float(level) for level in levels))
    if not levels:
        raise ValueError("at least one confidence level is required")
    for level in levels:
        if not 0.0 < level < 1.0:
            raise ValueError(f"confidence level must lie in (0, 1), got {level}")
    return levels


def z_value(level: float) -> float:
    return float(stats.norm.ppf(0.5 + level / 2.0))


@dataclass(frozen=True)
class ForecastResult:
    horizon: int
    months: List[MonthIndex]
    point: np.ndarray
    se: np.ndarray
    intervals: Dict[float, Tuple[np.ndarray, np.ndarray]]
    label: str = ""

    @property
    def levels(self) -> Tuple[float, ...]:
        return tuple(sorted(self.intervals))

    def lower(self, level: float) -> np.ndarray:
        return self.intervals[level][0]

    def upper(self, level: float) -> np.ndarray:
        return self.intervals[level][1]

    def as_series(self) -> MonthlySeries:
        return MonthlySeries(self.months[0], self.point)

    def rows(self, truth: Optional[MonthlySeries] = None) -> List[Dict]:
        """One record per step: month, point, se, per-level bounds and the truth when known."""
        records = []
        for i, month in enumerate(self.months):
            row = {"month": str(month), "point": float(self.point[i]), "se": float(self.se[i])}
            for level in self.levels:
                pct = f"{level * 100:g}"
                row[f"lower_{pct}"] = float(self.lower(level)[i])
                row[f"upper_{pct}"] = float(self.upper(level)[i])
            if truth is not None and truth.start <= month <= truth.end:
                row["truth"] = truth.value_at(month)
            records.append(row)
        return records


@dataclass(frozen=True)
class AccuracyRow:
    label: str
    n: int
    mse: float
    rmse: float
    mae: float

    def to_dict(self) -> Dict:
        return {"model": self.label, "n": self.n, "mse": self.mse, "rmse": self.rmse, "mae": self.mae}


@dataclass(frozen=True)
class AccuracyTable:
    window_start: MonthIndex
    window_end: MonthIndex
    rows: List[AccuracyRow] = field(default_factory=list)

    def best(self, metric: str = "rmse") -> AccuracyRow:
        return min(self.rows, key=lambda row: getattr(row, metric))

    def row(self, label: str) -> AccuracyRow:
        for row in self.rows:
            if row.label == label:
                return row
        raise KeyError(label)

    def records(self) -> List[Dict]:
        return [dict(row.to_dict(), window=f"{self.window_start}:{self.window_end}") for row in self.rows]


def psi_weights(model: FittedModel, h: int) -> np.ndarray:
    """psi_0..psi_{h-1} of the integrated model phi(B)Phi(B^s)(1-B)^d(1-B^s)^D."""
    ar_full, ma_full = expand_polynomials(model.spec, model.coef)
    ar_poly = np.r_[1.0, -ar_full]
    for _ in range(model.spec.d):
        ar_poly = np.convolve(ar_poly, [1.0, -1.0])
    seasonal = np.zeros(model.spec.s + 1)
    seasonal[0], seasonal[-1] = 1.0, -1.0
    for _ in range(model.spec.D):
        ar_poly = np.convolve(ar_poly, seasonal)
    impulse = np.zeros(h)
    impulse[0] = 1.0
    return signal.lfilter(np.r_[1.0, ma_full], ar_poly, impulse)


def arma_forecast(model: FittedModel, h: int) -> np.ndarray:
    """Forecasts of the differenced series from the filtered end-of-sample state."""
    if h < 1:
        raise IndexRangeError(f"forecast horizon must be positive, got {h}")
    ar_full, ma_full = expand_polynomials(model.spec, model.coef)
    out = kalman_filter(ar_full, ma_full, model.diffed.values)
    state = out.state
    predictions = np.empty(h)
    for j in range(h):
        predictions[j] = state[0]
        state = companion_step(out.transition_ar, state)
    return predictions


def forecast(model: FittedModel, h: int, levels: Sequence[float] = DEFAULT_LEVELS) -> ForecastResult:
    """h-step forecasts on the original scale with intervals point +- z se_h."""
    if h < 1:
        raise IndexRangeError(f"forecast horizon must be positive, got {h}")
    levels = _check_levels(levels)

    diffed = model.diffed
    extended = MonthlySeries(diffed.start, np.concatenate([diffed.values, arma_forecast(model, h)]))
    point = integrate(extended, model.ctx).values[-h:]

    psi = psi_weights(model, h)
    se = np.sqrt(model.sigma2 * np.cumsum(psi ** 2))
    intervals = {}
    for level in levels:
        half_width = z_value(level) * se
        intervals[level] = (point - half_width, point + half_width)

    months = [model.train_end.shift(j) for j in range(1, h + 1)]
    logger.debug(f"Forecast {model.label or 'model'}: {months[0]}..{months[-1]}")
    return ForecastResult(h, months, point, se, intervals, label=model.label)


def fitted_values(model: FittedModel) -> MonthlySeries:
    """In-sample one-step predictions on the original scale (first d + D*s months have none)."""
    ar_full, ma_full = expand_polynomials(model.spec, model.coef)
    out = kalman_filter(ar_full, ma_full, model.diffed.values)
    observed = model.train.values[model.spec.consumed:]
    return MonthlySeries(model.diffed.start, observed - out.innovations)


def error_metrics(actual: np.ndarray, predicted: np.ndarray) -> Tuple[float, float, float]:
    """(mse, rmse, mae)"""
    errors = np.asarray(predicted, dtype=float) - np.asarray(actual, dtype=float)
    mse = float(np.mean(errors ** 2))
    return mse, math.sqrt(mse), float(np.mean(np.abs(errors)))


def accuracy(models: Sequence[FittedModel], truth: MonthlySeries) -> AccuracyTable:
    """Out-of-sample errors of each model over the months covered by ``truth``."""
    rows = []
    for model in models:
        if truth.start <= model.train_end:
            raise IndexRangeError(
                f"evaluation window {truth.start}..{truth.end} overlaps training data ending {model.train_end}"
            )
        h = model.train_end.months_until(truth.end)
        result = forecast(model, h, levels=DEFAULT_LEVELS)
        predicted = result.point[-len(truth):]
        mse, rmse, mae = error_metrics(truth.values, predicted)
        rows.append(AccuracyRow(model.label, len(truth), mse, rmse, mae))
        logger.info(f"Accuracy {model.label}: rmse={rmse:.2f} mae={mae:.2f}")
    return AccuracyTable(truth.start, truth.end, rows)
