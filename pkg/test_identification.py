#!/usr/bin/env python3
"""
Tests for correlograms and the augmented Dickey-Fuller test.

Usage:
    python test_identification.py
"""

import sys

import numpy as np
import pytest
from scipy.signal import lfilter

from core_series import MonthIndex, MonthlySeries
from errors import DegenerateInputError, IndexRangeError, SeriesLengthError
from identification import (
    AdfType,
    acf,
    adf_p_value,
    adf_table,
    adf_test,
    durbin_levinson,
    pacf,
    sample_autocorrelations,
)


def ar1(phi, n, seed):
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(n + 200)
    return lfilter([1.0], [1.0, -phi], noise)[200:]


# =============================================================================
# ACF / PACF
# =============================================================================

def test_acf_band_and_lags():
    rng = np.random.default_rng(0)
    result = acf(rng.standard_normal(500), 20)
    assert result.lags.tolist() == list(range(1, 21))
    assert result.band == pytest.approx(1.959964 / np.sqrt(500), rel=1e-5)
    assert np.all(np.abs(result.values) <= 1.0)


def test_acf_white_noise_inside_wide_band():
    rng = np.random.default_rng(1)
    values = acf(rng.standard_normal(500), 20).values
    assert np.all(np.abs(values) < 3.0 / np.sqrt(500) * 1.5)


def test_acf_ar1_first_lag():
    assert acf(ar1(0.5, 5000, seed=2), 5).values[0] == pytest.approx(0.5, abs=0.05)


def test_acf_accepts_monthly_series():
    series = MonthlySeries(MonthIndex(2009, 1), ar1(0.5, 120, seed=3))
    assert acf(series, 24).n == 120


def test_acf_constant_series_is_degenerate():
    with pytest.raises(DegenerateInputError):
        acf(np.full(50, 4.0), 5)


def test_acf_max_lag_range():
    with pytest.raises(IndexRangeError):
        acf(np.arange(10.0), 10)
    with pytest.raises(IndexRangeError):
        acf(np.arange(10.0), 0)


def test_acf_affine_invariance():
    x = ar1(0.3, 300, seed=4)
    np.testing.assert_allclose(acf(x, 12).values, acf(-3.0 * x + 17.0, 12).values, atol=1e-10)


def test_pacf_first_lag_equals_acf():
    x = ar1(0.7, 200, seed=5)
    assert pacf(x, 10).values[0] == acf(x, 10).values[0]


def test_pacf_ar1_cuts_off():
    result = pacf(ar1(0.5, 5000, seed=6), 10)
    assert result.values[0] == pytest.approx(0.5, abs=0.05)
    assert np.all(np.abs(result.values[1:]) < 4.0 / np.sqrt(5000))


def test_durbin_levinson_exact_ar2():
    # population ACF of AR(2) with phi = (0.5, 0.2)
    phi1, phi2 = 0.5, 0.2
    r1 = phi1 / (1 - phi2)
    r2 = phi1 * r1 + phi2
    r3 = phi1 * r2 + phi2 * r1
    partial = durbin_levinson(np.array([1.0, r1, r2, r3]))
    assert partial[1] == pytest.approx(phi2, abs=1e-12)
    assert partial[2] == pytest.approx(0.0, abs=1e-12)


def test_sample_autocorrelations_lag_zero():
    assert sample_autocorrelations(np.arange(20.0), 3)[0] == 1.0


# =============================================================================
# ADF
# =============================================================================

def test_adf_p_value_monotone_in_statistic():
    stats = np.linspace(-5.0, 3.0, 60)
    for adf_type in AdfType:
        p = [adf_p_value(s, adf_type, 120)[0] for s in stats]
        assert np.all(np.diff(p) >= 0.0)


def test_adf_p_value_clamped_with_flag():
    p, at_boundary, _ = adf_p_value(-19.26, AdfType.NO_DRIFT_NO_TREND, 106)
    assert p == 0.01
    assert at_boundary
    p, at_boundary, _ = adf_p_value(0.0, AdfType.NO_DRIFT_NO_TREND, 106)
    assert 0.01 < p < 0.99
    assert not at_boundary


def test_adf_one_result_per_lag():
    results = adf_test(ar1(0.5, 200, seed=7), 4, AdfType.DRIFT_NO_TREND)
    assert [r.lag for r in results] == [0, 1, 2, 3, 4]
    assert [r.nobs for r in results] == [199 - lag for lag in range(5)]
    assert all(np.isfinite(r.statistic) and 0.0 < r.p_value < 1.0 for r in results)


def test_adf_sweep_entries_match_single_lag_runs():
    x = np.cumsum(ar1(0.3, 150, seed=12))
    sweep = adf_test(x, 4, AdfType.NO_DRIFT_NO_TREND)
    for lag in (0, 2, 4):
        alone = adf_test(x, lag, AdfType.NO_DRIFT_NO_TREND)[lag]
        assert sweep[lag].statistic == pytest.approx(alone.statistic, rel=1e-12)
        assert sweep[lag].nobs == alone.nobs


def test_adf_accepts_integer_type():
    assert adf_test(ar1(0.5, 100, seed=8), 0, 3)[0].type is AdfType.DRIFT_AND_TREND


def test_adf_type1_scale_invariant():
    x = np.cumsum(ar1(0.2, 150, seed=9)) + 5.0
    a = adf_test(x, 2, AdfType.NO_DRIFT_NO_TREND)
    b = adf_test(250.0 * x, 2, AdfType.NO_DRIFT_NO_TREND)
    for left, right in zip(a, b):
        assert left.statistic == pytest.approx(right.statistic, rel=1e-8)


def test_adf_random_walk_size_and_noise_power():
    walk_rejections = 0
    noise_rejections = 0
    seeds = range(40)
    for seed in seeds:
        rng = np.random.default_rng(1000 + seed)
        steps = rng.standard_normal(500)
        walk_rejections += adf_test(np.cumsum(steps), 0)[0].rejects(0.05)
        noise_rejections += adf_test(steps, 0)[0].rejects(0.05)
    assert walk_rejections <= 0.2 * len(seeds)
    assert noise_rejections >= 0.9 * len(seeds)


def test_adf_insufficient_observations():
    with pytest.raises(SeriesLengthError):
        adf_test(np.arange(8.0) ** 2, 4, AdfType.DRIFT_AND_TREND)


def test_adf_constant_series_is_degenerate():
    with pytest.raises(DegenerateInputError):
        adf_test(np.full(100, 2.0), 2)


def test_adf_table_covers_all_types():
    table = adf_table(np.cumsum(ar1(0.1, 120, seed=10)), 4)
    assert set(table) == set(AdfType)
    assert all(len(rows) == 5 for rows in table.values())
    row = table[AdfType.DRIFT_AND_TREND][0]
    assert row.critical_values["1%"] < row.critical_values["5%"] < row.critical_values["10%"]


def test_p_display_marks_boundary():
    result = adf_test(ar1(0.0, 300, seed=11), 0)[0]
    assert result.p_display() == "<=0.01"


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
