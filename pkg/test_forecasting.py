#!/usr/bin/env python3
"""
Tests for interval forecasts, fitted values and accuracy tables.

Usage:
    python test_forecasting.py
"""

import math
import sys

import numpy as np
import pytest

from core_series import MonthIndex, MonthlySeries, difference_chain
from errors import IndexRangeError
from forecasting import (
    accuracy,
    arma_forecast,
    error_metrics,
    fitted_values,
    forecast,
    psi_weights,
    z_value,
)
from sarima import CANDIDATE_MODELS, CoefficientSet, SarimaSpec, assemble_model, simulate

MODEL3_COEF = {"ma1": -0.6960, "sar1": -0.6535, "sar2": -0.3670, "sar4": -0.2897}


def model3(n=120, seed=0, label="Model3"):
    spec = CANDIDATE_MODELS["Model3"]
    coef = CoefficientSet.from_mapping(spec, MODEL3_COEF)
    train = simulate(spec, coef, 2500.0, n, seed=seed, start=MonthIndex(2009, 1))
    return assemble_model(spec, coef, train, label=label)


def test_z_values():
    assert z_value(0.95) == pytest.approx(1.959963985, abs=1e-9)
    assert z_value(0.80) == pytest.approx(1.281551566, abs=1e-9)


def test_intervals_nest_and_bracket_point():
    result = forecast(model3(), 7, levels=(0.95, 0.80))
    assert result.levels == (0.80, 0.95)
    assert [str(m) for m in result.months][:2] == ["2019-01", "2019-02"]
    assert result.as_series().start == MonthIndex(2019, 1)
    assert len(result.as_series()) == 7
    for level in result.levels:
        assert np.all(result.lower(level) <= result.point)
        assert np.all(result.point <= result.upper(level))
    assert np.all(result.lower(0.95) <= result.lower(0.80))
    assert np.all(result.upper(0.80) <= result.upper(0.95))
    assert np.all(np.diff(result.upper(0.95) - result.lower(0.95)) >= 0.0)


def test_one_step_variance_equals_sigma2():
    model = model3()
    result = forecast(model, 3)
    assert result.se[0] ** 2 == pytest.approx(model.sigma2, rel=1e-12)
    assert psi_weights(model, 3)[0] == 1.0


def test_white_noise_forecast():
    spec = SarimaSpec()
    train = simulate(spec, CoefficientSet.zeros(spec), 1.0, 100, seed=1)
    model = assemble_model(spec, CoefficientSet.zeros(spec), train, sigma2=1.0)
    result = forecast(model, 5)
    assert np.all(result.point == 0.0)
    np.testing.assert_allclose(result.se, 1.0)
    np.testing.assert_allclose(result.upper(0.95) - result.point, z_value(0.95))


def test_integrated_forecast_differences_back_to_arma_forecast():
    model = model3(seed=2)
    h = 12
    result = forecast(model, h)
    extended = model.train.append(result.point)
    diffed, _ = difference_chain(extended, 1, 1, 12)
    np.testing.assert_allclose(diffed.values[-h:], arma_forecast(model, h), rtol=1e-8, atol=1e-6)


def test_forecast_horizon_must_be_positive():
    with pytest.raises(IndexRangeError):
        forecast(model3(), 0)


def test_empirical_coverage_of_one_step_intervals():
    spec = SarimaSpec(1, 0, 0)
    coef = CoefficientSet(ar=(0.5,))
    covered = 0
    trials = 800
    for seed in range(trials):
        path = simulate(spec, coef, 1.0, 61, seed=10_000 + seed)
        train = MonthlySeries(path.start, path.values[:-1])
        result = forecast(assemble_model(spec, coef, train, sigma2=1.0), 1, levels=(0.95,))
        covered += result.lower(0.95)[0] <= path.values[-1] <= result.upper(0.95)[0]
    assert covered / trials == pytest.approx(0.95, abs=0.025)


def test_rows_carry_levels_and_truth():
    model = model3()
    result = forecast(model, 2)
    truth = MonthlySeries(MonthIndex(2019, 1), [1.0, 2.0])
    rows = result.rows(truth)
    assert set(rows[0]) == {"month", "point", "se", "lower_80", "upper_80", "lower_95", "upper_95", "truth"}
    assert rows[1]["truth"] == 2.0


def test_fitted_values_span_differenced_window():
    model = model3()
    fitted = fitted_values(model)
    assert len(fitted) == model.n_effective
    assert fitted.start == MonthIndex(2010, 2)


# =============================================================================
# Accuracy
# =============================================================================

def test_error_metrics_by_hand():
    assert error_metrics(np.ones(4), np.ones(4)) == (0.0, 0.0, 0.0)
    mse, rmse, mae = error_metrics(np.zeros(3), np.full(3, -2.0))
    assert (mse, rmse, mae) == (4.0, 2.0, 2.0)


def test_accuracy_perfect_and_biased_forecasts():
    model = model3()
    point = forecast(model, 7).point
    perfect = accuracy([model], MonthlySeries(MonthIndex(2019, 1), point))
    assert perfect.row("Model3").rmse == pytest.approx(0.0, abs=1e-9)

    biased = accuracy([model], MonthlySeries(MonthIndex(2019, 1), point - 500.0))
    row = biased.row("Model3")
    assert row.rmse == pytest.approx(500.0)
    assert row.mae == pytest.approx(500.0)
    assert row.mse == pytest.approx(250000.0)
    assert row.rmse == pytest.approx(math.sqrt(row.mse), abs=1e-10)


def test_accuracy_window_may_start_later():
    model = model3()
    point = forecast(model, 7).point
    table = accuracy([model], MonthlySeries(MonthIndex(2019, 3), point[2:]))
    assert table.row("Model3").n == 5
    assert table.row("Model3").rmse == pytest.approx(0.0, abs=1e-9)


def test_accuracy_best_model():
    good = model3(label="good")
    spec = SarimaSpec(0, 1, 0, 0, 1, 0, 12)
    naive = assemble_model(spec, CoefficientSet.zeros(spec), good.train, label="naive")
    truth = MonthlySeries(MonthIndex(2019, 1), forecast(good, 7).point + 10.0)
    table = accuracy([naive, good], truth)
    assert table.best("rmse").label == "good"
    assert [r["model"] for r in table.records()] == ["naive", "good"]


def test_accuracy_rejects_overlap():
    model = model3()
    with pytest.raises(IndexRangeError):
        accuracy([model], MonthlySeries(MonthIndex(2018, 12), [1.0, 2.0]))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
