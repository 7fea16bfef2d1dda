#!/usr/bin/env python3
"""
Tests for the monthly series container, differencing and integration.

Usage:
    python test_core_series.py
"""

import sys

import numpy as np
import pytest

from core_series import (
    DiffContext,
    MonthIndex,
    MonthlySeries,
    difference,
    difference_chain,
    integrate,
    slice_series,
)
from errors import DiffContextError, IndexRangeError, SeriesLengthError


def monthly(values, start="2004-01"):
    return MonthlySeries(MonthIndex.parse(start), values)


# =============================================================================
# MonthIndex
# =============================================================================

def test_month_index_parse_and_format():
    month = MonthIndex.parse("2009-01")
    assert month == MonthIndex(2009, 1)
    assert str(month) == "2009-01"


def test_month_index_rejects_bad_month():
    with pytest.raises(ValueError):
        MonthIndex(2019, 13)
    with pytest.raises(ValueError):
        MonthIndex.parse("2019/01")


def test_month_index_ordering_and_shift():
    assert MonthIndex(2018, 12) < MonthIndex(2019, 1)
    assert MonthIndex(2019, 1) < MonthIndex(2019, 2)
    assert MonthIndex(2018, 12).shift(1) == MonthIndex(2019, 1)
    assert MonthIndex(2019, 1).shift(-13) == MonthIndex(2017, 12)
    assert MonthIndex(2009, 1).months_until(MonthIndex(2018, 12)) == 119


# =============================================================================
# MonthlySeries
# =============================================================================

def test_series_months_are_gap_free():
    series = monthly([1.0, 2.0, 3.0], start="2018-11")
    assert [str(m) for m in series.months()] == ["2018-11", "2018-12", "2019-01"]
    assert series.end == MonthIndex(2019, 1)
    assert series.value_at(MonthIndex(2018, 12)) == 2.0


def test_series_values_read_only():
    series = monthly([1.0, 2.0])
    with pytest.raises(ValueError):
        series.values[0] = 5.0


def test_series_rejects_empty_and_non_finite():
    with pytest.raises(SeriesLengthError):
        monthly([])
    with pytest.raises(ValueError):
        monthly([1.0, np.nan])


def test_series_to_pandas_uses_monthly_periods():
    frame = monthly([1.0, 2.0], start="2019-12").to_pandas("total")
    assert frame.name == "total"
    assert str(frame.index[1]) == "2020-01"


# =============================================================================
# difference / integrate
# =============================================================================

def test_first_difference_by_hand():
    out = difference(monthly([5, 7, 10]), 1)
    assert out.values.tolist() == [2.0, 3.0]
    assert out.start == MonthIndex(2004, 2)


def test_constant_series_differences_to_zero():
    for lag in (1, 4, 12):
        out = difference(monthly([3.5] * 30), lag)
        assert np.all(out.values == 0.0)


def test_difference_too_short():
    with pytest.raises(SeriesLengthError):
        difference(monthly([1.0, 2.0]), 2)


def test_train_window_loses_thirteen_observations():
    series = monthly(np.arange(120.0) ** 1.5, start="2009-01")
    diffed, ctx = difference_chain(series, 1, 1, 12)
    assert len(diffed) == 107
    assert ctx.consumed == 13
    assert diffed.start == MonthIndex(2010, 2)


def test_integrate_zeros_with_prefix():
    ctx = DiffContext(d=1, D=0, s=12, retained_prefixes=((4.0,),))
    out = integrate(monthly([0.0] * 5, start="2004-02"), ctx)
    assert out.values.tolist() == [4.0] * 6
    assert out.start == MonthIndex(2004, 1)


def test_integrate_inverts_hand_example():
    ctx = DiffContext(d=1, D=0, s=12, retained_prefixes=((5.0,),))
    assert integrate(monthly([2, 3], start="2004-02"), ctx).values.tolist() == [5.0, 7.0, 10.0]


@pytest.mark.parametrize("d", [0, 1, 2])
@pytest.mark.parametrize("D", [0, 1])
@pytest.mark.parametrize("s", [4, 12])
def test_difference_then_integrate_is_identity(d, D, s):
    rng = np.random.default_rng(100 * d + 10 * D + s)
    series = monthly(rng.normal(1000.0, 50.0, size=50))
    diffed, ctx = difference_chain(series, d, D, s)
    assert len(diffed) == 50 - d - D * s
    restored = integrate(diffed, ctx)
    assert restored.start == series.start
    np.testing.assert_allclose(restored.values, series.values, rtol=1e-12, atol=1e-9)


def test_differencing_commutes_across_lags():
    rng = np.random.default_rng(7)
    series = monthly(rng.normal(size=60).cumsum())
    a = difference(difference(series, 1), 12)
    b = difference(difference(series, 12), 1)
    assert a.start == b.start
    np.testing.assert_allclose(a.values, b.values, rtol=1e-12, atol=1e-12)


def test_integrate_rejects_inconsistent_context():
    diffed, ctx = difference_chain(monthly(np.arange(30.0)), 1, 1, 12)
    broken = DiffContext(d=1, D=1, s=12, retained_prefixes=ctx.retained_prefixes[:1], origin=ctx.origin)
    with pytest.raises(DiffContextError):
        integrate(diffed, broken)
    wrong_length = DiffContext(d=1, D=1, s=12, retained_prefixes=((1.0,), (1.0,)), origin=ctx.origin)
    with pytest.raises(DiffContextError):
        integrate(diffed, wrong_length)


def test_integrate_extends_past_original_end():
    series = monthly(np.arange(1.0, 31.0))
    diffed, ctx = difference_chain(series, 1, 0, 12)
    extended = integrate(diffed.append([1.0, 1.0]), ctx)
    assert extended.values[-2:].tolist() == [31.0, 32.0]


# =============================================================================
# slice
# =============================================================================

def test_slice_full_range_is_identity():
    series = monthly(np.arange(24.0))
    assert slice_series(series, series.start, series.end) == series


def test_slice_train_window():
    series = monthly(np.arange(204.0), start="2004-01")
    train = slice_series(series, "2009-01", "2018-12")
    assert len(train) == 120
    assert train.start == MonthIndex(2009, 1)
    assert train.values[0] == 60.0


def test_slice_single_month_and_range_errors():
    series = monthly(np.arange(24.0))
    assert len(slice_series(series, "2004-05", "2004-05")) == 1
    with pytest.raises(IndexRangeError):
        slice_series(series, "2003-12", "2004-05")
    with pytest.raises(IndexRangeError):
        slice_series(series, "2004-05", "2004-04")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
