"""
Monthly Series Container

Gap-free monthly observations indexed by (year, month), with ordinary and
seasonal differencing and the exact inverse (integration).

Differencing chain convention:
    original --(lag 1) x d--> --(lag s) x D--> differenced
The DiffContext keeps the leading observations consumed by every pass so the
chain can be undone bit-for-bit (up to floating round-trip).
"""

import logging
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from errors import DiffContextError, IndexRangeError, SeriesLengthError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class MonthIndex:
    """A calendar month; ordering is (year, month) lexicographic."""
    year: int
    month: int

    def __post_init__(self):
        if not 1 <= self.month <= 12:
            raise ValueError(f"month must be in 1..12, got {self.month}")

    @classmethod
    def parse(cls, text: str) -> "MonthIndex":
        """Parse ``YYYY-MM``."""
        try:
            year_text, month_text = text.strip().split("-")
            return cls(int(year_text), int(month_text))
        except ValueError as e:
            raise ValueError(f"expected YYYY-MM, got '{text}'") from e

    @classmethod
    def from_ordinal(cls, ordinal: int) -> "MonthIndex":
        year, month0 = divmod(ordinal, 12)
        return cls(year, month0 + 1)

    @property
    def ordinal(self) -> int:
        """Absolute month count (year * 12 + month - 1)."""
        return self.year * 12 + self.month - 1

    def shift(self, months: int) -> "MonthIndex":
        return MonthIndex.from_ordinal(self.ordinal + months)

    def months_until(self, other: "MonthIndex") -> int:
        """Signed number of months from self to other."""
        return other.ordinal - self.ordinal

    def __str__(self) -> str:
        return f"{self.year:04d}-{self.month:02d}"


@dataclass(frozen=True, eq=False)
class MonthlySeries:
    """
    Ordered, gap-free monthly observations.

    Observation k belongs to ``start.shift(k)``. Values are stored as a
    read-only float64 array; counts ingest as integers but are reals here.
    """
    start: MonthIndex
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float).reshape(-1)
        if values.size < 1:
            raise SeriesLengthError("a monthly series needs at least one observation")
        if not np.all(np.isfinite(values)):
            raise ValueError("monthly series values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, MonthlySeries):
            return NotImplemented
        return self.start == other.start and np.array_equal(self.values, other.values)

    def __repr__(self) -> str:
        return f"MonthlySeries(start={self.start}, end={self.end}, n={len(self)})"

    @property
    def end(self) -> MonthIndex:
        return self.start.shift(len(self) - 1)

    def months(self) -> List[MonthIndex]:
        return [self.start.shift(k) for k in range(len(self))]

    def index_of(self, month: MonthIndex) -> int:
        k = self.start.months_until(month)
        if not 0 <= k < len(self):
            raise IndexRangeError(f"{month} outside series range {self.start}..{self.end}")
        return k

    def value_at(self, month: MonthIndex) -> float:
        return float(self.values[self.index_of(month)])

    def append(self, values: Iterable[float]) -> "MonthlySeries":
        """New series with ``values`` continuing after the last month."""
        extra = np.asarray(list(values), dtype=float)
        return MonthlySeries(self.start, np.concatenate([self.values, extra]))

    def to_pandas(self, name: str = "value") -> pd.Series:
        index = pd.period_range(start=str(self.start), periods=len(self), freq="M")
        return pd.Series(self.values, index=index, name=name)


@dataclass(frozen=True)
class DiffContext:
    """
    Bookkeeping needed to undo a differencing chain.

    ``retained_prefixes[i]`` holds the leading observations consumed by pass
    i (in application order: d ordinary passes, then D seasonal passes).
    """
    d: int
    D: int
    s: int
    retained_prefixes: Tuple[Tuple[float, ...], ...] = field(default_factory=tuple)
    origin: Optional[MonthIndex] = None

    def __post_init__(self):
        if self.d < 0 or self.D < 0:
            raise DiffContextError("differencing orders must be non-negative")
        if self.s < 1:
            raise DiffContextError(f"seasonal period must be positive, got {self.s}")

    @property
    def lags(self) -> List[int]:
        return [1] * self.d + [self.s] * self.D

    @property
    def consumed(self) -> int:
        """Leading observations lost to the chain: d + D*s."""
        return self.d + self.D * self.s


def difference(series: MonthlySeries, lag: int) -> MonthlySeries:
    """output[k] = input[k + lag] - input[k]; start moves forward by ``lag`` months."""
    if lag < 1:
        raise ValueError(f"lag must be positive, got {lag}")
    if len(series) <= lag:
        raise SeriesLengthError(
            f"series of length {len(series)} is too short for a lag-{lag} difference"
        )
    values = series.values
    return MonthlySeries(series.start.shift(lag), values[lag:] - values[:-lag])


def difference_chain(
    series: MonthlySeries, d: int, D: int, s: int
) -> Tuple[MonthlySeries, DiffContext]:
    """Apply d ordinary then D seasonal differences, returning the context to undo them."""
    current = series
    prefixes = []
    for lag in [1] * d + [s] * D:
        prefixes.append(tuple(float(v) for v in current.values[:lag]))
        current = difference(current, lag)
    ctx = DiffContext(d=d, D=D, s=s, retained_prefixes=tuple(prefixes), origin=series.start)
    return current, ctx


def _undo_pass(diffed: np.ndarray, prefix: np.ndarray, lag: int) -> np.ndarray:
    out = np.empty(lag + diffed.size)
    out[:lag] = prefix
    # x[k + lag] = x[k] + y[k] runs independently along each residue class
    for r in range(lag):
        out[lag + r::lag] = prefix[r] + np.cumsum(diffed[r::lag])
    return out


def integrate(diffed: MonthlySeries, ctx: DiffContext) -> MonthlySeries:
    """Exact inverse of ``difference_chain``; the series may extend past the original end."""
    lags = ctx.lags
    if len(ctx.retained_prefixes) != len(lags):
        raise DiffContextError(
            f"context holds {len(ctx.retained_prefixes)} prefixes for {len(lags)} passes"
        )
    for lag, prefix in zip(lags, ctx.retained_prefixes):
        if len(prefix) != lag:
            raise DiffContextError(
                f"prefix of length {len(prefix)} cannot undo a lag-{lag} difference"
            )
    start = diffed.start.shift(-ctx.consumed)
    if ctx.origin is not None and start != ctx.origin:
        raise DiffContextError(
            f"differenced series starting {diffed.start} does not follow origin {ctx.origin}"
        )

    values = diffed.values
    for lag, prefix in reversed(list(zip(lags, ctx.retained_prefixes))):
        values = _undo_pass(values, np.asarray(prefix, dtype=float), lag)
    return MonthlySeries(start, values)


def slice_series(
    series: MonthlySeries,
    start: Union[MonthIndex, str],
    end: Union[MonthIndex, str],
) -> MonthlySeries:
    """Inclusive sub-series ``start..end``."""
    if isinstance(start, str):
        start = MonthIndex.parse(start)
    if isinstance(end, str):
        end = MonthIndex.parse(end)
    if end < start:
        raise IndexRangeError(f"slice end {end} precedes start {start}")
    if start < series.start or end > series.end:
        raise IndexRangeError(
            f"slice {start}..{end} outside series range {series.start}..{series.end}"
        )
    i = series.index_of(start)
    j = series.index_of(end)
    return MonthlySeries(start, series.values[i:j + 1])


slice = slice_series  # noqa: A001  (core_series.slice)
