"""
Classical additive decomposition: observed = trend + seasonal + remainder.

The trend is a centred moving average over one period (2 x period with half
weights at the ends for even periods); it is undefined on the first and last
period//2 months.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from core_series import MonthlySeries
from errors import IndexRangeError, SeriesLengthError

logger = logging.getLogger(__name__)


def centred_weights(period: int) -> np.ndarray:
    if period % 2 == 0:
        weights = np.ones(period + 1)
        weights[0] = weights[-1] = 0.5
    else:
        weights = np.ones(period)
    return weights / period


@dataclass(frozen=True)
class Decomposition:
    observed: MonthlySeries
    trend: MonthlySeries          # interior months only
    seasonal: MonthlySeries
    remainder: MonthlySeries      # interior months only
    seasonal_indices: np.ndarray  # by position (month ordinal mod period)
    period: int

    @property
    def edge(self) -> int:
        return self.period // 2

    def _padded(self, interior: MonthlySeries) -> np.ndarray:
        out = np.full(len(self.observed), np.nan)
        out[self.edge:self.edge + len(interior)] = interior.values
        return out

    def rows(self) -> List[Dict[str, Optional[float]]]:
        """observed/trend/seasonal/remainder per month; undefined edges are None."""
        trend = self._padded(self.trend)
        remainder = self._padded(self.remainder)
        records = []
        for i, month in enumerate(self.observed.months()):
            records.append({
                "month": str(month),
                "observed": float(self.observed.values[i]),
                "trend": None if np.isnan(trend[i]) else float(trend[i]),
                "seasonal": float(self.seasonal.values[i]),
                "remainder": None if np.isnan(remainder[i]) else float(remainder[i]),
            })
        return records


def decompose(series: MonthlySeries, period: int = 12) -> Decomposition:
    if period < 2:
        raise IndexRangeError(f"period must be at least 2, got {period}")
    n = len(series)
    if n < 2 * period + 1:
        raise SeriesLengthError(f"decomposition with period {period} needs {2 * period + 1} observations, got {n}")

    x = series.values
    weights = centred_weights(period)
    edge = period // 2
    interior = np.convolve(x, weights[::-1], mode="valid")
    trend = np.full(n, np.nan)
    trend[edge:edge + interior.size] = interior

    positions = np.array([month.ordinal % period for month in series.months()])
    detrended = x - trend
    indices = np.array([np.nanmean(detrended[positions == m]) for m in range(period)])
    indices -= indices.mean()
    seasonal = indices[positions]
    remainder = x - trend - seasonal

    logger.debug(f"Decomposed {series!r} with period {period}")
    interior_start = series.start.shift(edge)
    return Decomposition(
        observed=series,
        trend=MonthlySeries(interior_start, interior),
        seasonal=MonthlySeries(series.start, seasonal),
        remainder=MonthlySeries(interior_start, remainder[edge:edge + interior.size]),
        seasonal_indices=indices,
        period=period,
    )


def rank_seasonal_indices(decomposition: Decomposition) -> List[Tuple[int, float]]:
    """
    Seasonal positions ordered by index, largest first.

    Positions are 1-based; with period 12 they are calendar months.
    """
    order = np.argsort(-decomposition.seasonal_indices, kind="stable")
    return [(int(m) + 1, float(decomposition.seasonal_indices[m])) for m in order]
