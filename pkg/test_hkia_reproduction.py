#!/usr/bin/env python3
"""
Reproduction checks against the published Hong Kong International Airport
monthly passenger series (2004-01 .. 2020-12).

The published-figure checks at the top run everywhere. The series checks
below them read data/hkia_passengers.csv (see data/README.md) and are
skipped, with the reason shown, when that file is missing.

Usage:
    python test_hkia_reproduction.py
"""

import sys
from pathlib import Path

import numpy as np
import pytest

from core_series import MonthIndex, difference_chain, slice_series
from decomposition import decompose, rank_seasonal_indices
from diagnostics import residual_diagnostics
from estimation import fit
from forecasting import accuracy, error_metrics, forecast, z_value
from identification import AdfType, adf_test
from impact import LossReport, quantify_impact
from ingestion import load_csv
from sarima import CANDIDATE_MODELS

DATA = Path(__file__).parent / "data" / "hkia_passengers.csv"

needs_data = pytest.mark.skipif(
    not DATA.exists(),
    reason="required dataset data/hkia_passengers.csv is missing; see data/README.md",
)

TRUTH_2019 = [6460193, 5866706, 6396906, 6464336, 6209935, 6319690, 6702076]
PREDICTED_2019 = [6431575, 5884746, 6331132, 6413993, 6164378, 6285538, 6787117]
BAND_80_2019 = [(6238776, 6624374), (5683235, 6086257), (6121270, 6540993), (6196101, 6631886),
                (5938740, 6390016), (6052412, 6518664), (6546736, 7027498)]
BAND_95_2019 = [(6136715, 6726436), (5576561, 6192930), (6010176, 6652088), (6080755, 6747232),
                (5819295, 6509462), (5929003, 6642074), (6419486, 7154748)]
TRUTH_2020 = [1877718, 575825, 31739, 37423, 59199, 96028, 83807, 99805, 79360, 81001, 90531]
COUNTERFACTUAL_2020 = [5191726, 5673103, 5883236, 5616262, 5597481, 6077110,
                       5986478, 4833198, 5442955, 5234962, 5701242]
RETAINED_2020 = [0.361675, 0.10150, 0.00539, 0.00666, 0.01058, 0.01580,
                 0.01400, 0.02065, 0.01458, 0.01547, 0.01588]
MODEL3_PUBLISHED = {"ma1": -0.6960, "sar1": -0.6535, "sar2": -0.3670, "sar4": -0.2897}
MODEL3_REFIT = {"ma1": -0.3925, "sar1": -0.6385, "sar2": -0.4025, "sar4": -0.2848}


# =============================================================================
# Published figures
# =============================================================================

def test_published_loss_accounting():
    months = [MonthIndex(2020, m) for m in range(2, 13)]
    report = LossReport.from_arrays(months, TRUTH_2020, COUNTERFACTUAL_2020)
    np.testing.assert_allclose(report.retained, RETAINED_2020, rtol=2e-3)
    assert report.aggregate_actual == 3112436
    assert report.aggregate_predicted == 61237753
    assert report.aggregate_loss == 58125317
    assert report.aggregate_retained == pytest.approx(0.0508, abs=5e-5)
    assert 0.040 <= report.aggregate_retained <= 0.062
    assert months[int(np.argmin(report.retained))] == MonthIndex(2020, 4)
    assert report.retained[months.index(MonthIndex(2020, 4))] < 0.01
    assert report.rows()[-1]["month"] == "total"


def test_published_intervals_are_normal_bands_around_the_point():
    point = np.array(PREDICTED_2019, dtype=float)
    inner = np.array(BAND_80_2019, dtype=float)
    outer = np.array(BAND_95_2019, dtype=float)
    np.testing.assert_allclose(inner.mean(axis=1), point, atol=1.0)
    np.testing.assert_allclose(outer.mean(axis=1), point, atol=1.0)
    se_inner = (inner[:, 1] - inner[:, 0]) / (2.0 * z_value(0.80))
    se_outer = (outer[:, 1] - outer[:, 0]) / (2.0 * z_value(0.95))
    np.testing.assert_allclose(se_inner, se_outer, rtol=1e-3)
    assert np.all(np.diff(se_outer) >= 0.0)


def test_published_forecast_covers_truth_with_expected_error():
    truth = np.array(TRUTH_2019, dtype=float)
    outer = np.array(BAND_95_2019, dtype=float)
    assert np.all(outer[:, 0] <= truth)
    assert np.all(truth <= outer[:, 1])
    _, rmse, mae = error_metrics(truth, np.array(PREDICTED_2019, dtype=float))
    assert 40000.0 <= rmse <= 65000.0
    assert mae <= rmse


# =============================================================================
# Series fixtures
# =============================================================================

@pytest.fixture(scope="module")
def series():
    return load_csv(DATA, "total")


@pytest.fixture(scope="module")
def train(series):
    return slice_series(series, MonthIndex(2009, 1), MonthIndex(2018, 12))


@pytest.fixture(scope="module")
def candidates(train):
    return {label: fit(spec, train, label=label) for label, spec in CANDIDATE_MODELS.items()}


# =============================================================================
# Identification
# =============================================================================

@needs_data
def test_levels_keep_a_unit_root(train):
    result = adf_test(train, 0, AdfType.NO_DRIFT_NO_TREND)[0]
    assert result.statistic == pytest.approx(0.196, abs=0.05)
    assert result.p_value > 0.10


@needs_data
def test_doubly_differenced_series_is_stationary(train):
    diffed, _ = difference_chain(train, 1, 1, 12)
    result = adf_test(diffed, 0, AdfType.NO_DRIFT_NO_TREND)[0]
    assert result.statistic == pytest.approx(-19.26, abs=0.5)
    assert result.rejects(0.01)


@needs_data
def test_summer_months_lead_the_seasonal_profile(series):
    window = slice_series(series, MonthIndex(2004, 1), MonthIndex(2018, 12))
    ranking = rank_seasonal_indices(decompose(window, 12))
    assert [position for position, _ in ranking[:2]] == [8, 7]


# =============================================================================
# Estimation
# =============================================================================

@needs_data
def test_every_candidate_fits(candidates):
    assert list(candidates) == list(CANDIDATE_MODELS)


@needs_data
def test_final_model_coefficients_and_criteria(candidates):
    model = candidates["Model3"]
    for slot, published in MODEL3_PUBLISHED.items():
        assert model.coef.value(slot) == pytest.approx(published, abs=0.03), slot
    assert model.aic == pytest.approx(2877.09, abs=3.0)
    assert model.bic == pytest.approx(2890.46, abs=3.0)


@needs_data
def test_dropped_terms_are_insignificant(candidates):
    assert candidates["Model0"].is_significant("ma2") is False
    assert candidates["Model1"].is_significant("ma2") is False
    assert candidates["Model1"].is_significant("sar3") is False
    assert candidates["Model2"].is_significant("sar3") is False


@needs_data
def test_residual_adequacy(candidates):
    final = residual_diagnostics(candidates["Model3"], 24)
    assert final.normality.shapiro_p > 0.05
    assert final.normality.jb_p > 0.05
    first = residual_diagnostics(candidates["Model0"], 24)
    assert first.ljung_box.min_p_value() < 0.05


# =============================================================================
# Forecasting
# =============================================================================

@needs_data
def test_2019_forecast_tracks_published_values(series, candidates):
    truth = slice_series(series, MonthIndex(2019, 1), MonthIndex(2019, 7))
    np.testing.assert_array_equal(truth.values, TRUTH_2019)
    result = forecast(candidates["Model3"], 7)
    np.testing.assert_allclose(result.point, PREDICTED_2019, rtol=0.01)
    assert np.all(result.lower(0.95) <= truth.values)
    assert np.all(truth.values <= result.upper(0.95))


@needs_data
def test_final_model_has_lowest_rmse(series, candidates):
    truth = slice_series(series, MonthIndex(2019, 1), MonthIndex(2019, 7))
    table = accuracy(list(candidates.values()), truth)
    assert table.best("rmse").label == "Model3"
    assert 40000.0 <= table.row("Model3").rmse <= 65000.0


# =============================================================================
# Impact
# =============================================================================

@needs_data
def test_2020_collapse(series):
    report = quantify_impact(CANDIDATE_MODELS["Model3"], series, "2020-01", 11, train_start="2009-01")
    np.testing.assert_array_equal(report.actual, TRUTH_2020)
    for slot, published in MODEL3_REFIT.items():
        assert report.coefficients.value(slot) == pytest.approx(published, abs=0.05), slot
    assert 0.040 <= report.aggregate_retained <= 0.062
    assert report.retained[report.months.index(MonthIndex(2020, 4))] < 0.01
    assert np.all(report.loss > 0.0)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
