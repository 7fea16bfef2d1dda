"""
Event impact by counterfactual subtraction.

A model trained on pre-event months forecasts the event window; the gap
between that counterfactual and the observed values is the loss attributed
to the event.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from core_series import MonthIndex, MonthlySeries, slice_series
from errors import DegenerateInputError, IndexRangeError
from estimation import FitOptions, fit
from forecasting import DEFAULT_LEVELS, ForecastResult, forecast
from sarima import CoefficientSet, FittedModel, SarimaSpec

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LossReport:
    months: List[MonthIndex]
    actual: np.ndarray
    predicted: np.ndarray
    loss: np.ndarray              # predicted - actual
    retained: np.ndarray          # actual / predicted
    aggregate_actual: float
    aggregate_predicted: float
    aggregate_retained: float
    coefficients: Optional[CoefficientSet] = None
    counterfactual: Optional[ForecastResult] = field(default=None, repr=False)

    @classmethod
    def from_arrays(
        cls,
        months: Sequence[MonthIndex],
        actual: Sequence[float],
        predicted: Sequence[float],
        coefficients: Optional[CoefficientSet] = None,
        counterfactual: Optional[ForecastResult] = None,
    ) -> "LossReport":
        actual = np.asarray(actual, dtype=float)
        predicted = np.asarray(predicted, dtype=float)
        if not len(months) == actual.size == predicted.size:
            raise IndexRangeError("months, actual and predicted must have equal length")
        if np.any(predicted == 0.0):
            raise DegenerateInputError("retained fraction undefined for a zero counterfactual")
        aggregate_actual = float(np.sum(actual))
        aggregate_predicted = float(np.sum(predicted))
        return cls(
            months=list(months),
            actual=actual,
            predicted=predicted,
            loss=predicted - actual,
            retained=actual / predicted,
            aggregate_actual=aggregate_actual,
            aggregate_predicted=aggregate_predicted,
            aggregate_retained=aggregate_actual / aggregate_predicted,
            coefficients=coefficients,
            counterfactual=counterfactual,
        )

    @property
    def aggregate_loss(self) -> float:
        return self.aggregate_predicted - self.aggregate_actual

    def rows(self) -> List[Dict]:
        records = [
            {
                "month": str(month),
                "actual": float(a),
                "predicted": float(p),
                "loss": float(l),
                "retained": float(r),
            }
            for month, a, p, l, r in zip(self.months, self.actual, self.predicted, self.loss, self.retained)
        ]
        records.append({
            "month": "total",
            "actual": self.aggregate_actual,
            "predicted": self.aggregate_predicted,
            "loss": self.aggregate_loss,
            "retained": self.aggregate_retained,
        })
        return records


def _month(value: Union[MonthIndex, str]) -> MonthIndex:
    return MonthIndex.parse(value) if isinstance(value, str) else value


def report_for_model(model: FittedModel, full_series: MonthlySeries, horizon: int,
                     levels: Sequence[float] = DEFAULT_LEVELS) -> LossReport:
    """LossReport of an already fitted model against the months following its training window."""
    if horizon < 1:
        raise IndexRangeError(f"horizon must be positive, got {horizon}")
    last = model.train_end.shift(horizon)
    if last > full_series.end:
        raise IndexRangeError(f"horizon reaches {last}, actuals end at {full_series.end}")
    actual = slice_series(full_series, model.train_end.shift(1), last)
    counterfactual = forecast(model, horizon, levels)
    return LossReport.from_arrays(
        counterfactual.months, actual.values, counterfactual.point,
        coefficients=model.coef, counterfactual=counterfactual,
    )


def quantify_impact(
    spec: SarimaSpec,
    full_series: MonthlySeries,
    train_end: Union[MonthIndex, str],
    horizon: int,
    train_start: Optional[Union[MonthIndex, str]] = None,
    options: Optional[FitOptions] = None,
    label: str = "",
    levels: Sequence[float] = DEFAULT_LEVELS,
) -> LossReport:
    """Refit ``spec`` on train_start..train_end, forecast ``horizon`` months and compare with actuals."""
    train_end = _month(train_end)
    train_start = full_series.start if train_start is None else _month(train_start)
    if horizon < 1:
        raise IndexRangeError(f"horizon must be positive, got {horizon}")
    if train_end.shift(horizon) > full_series.end:
        raise IndexRangeError(
            f"horizon of {horizon} months after {train_end} extends past the data ending {full_series.end}"
        )
    train = slice_series(full_series, train_start, train_end)
    logger.info(f"Impact refit on {train_start}..{train_end}, horizon {horizon}")
    model = fit(spec, train, label=label, options=options)
    report = report_for_model(model, full_series, horizon, levels)
    logger.info(f"Aggregate retained fraction {report.aggregate_retained:.4f}")
    return report
