"""
Sparse SARIMA Toolkit

Seasonal ARIMA identification, sparse maximum-likelihood fitting,
diagnostics, interval forecasting and counterfactual impact reports
for monthly traffic series.
"""

__version__ = "1.0.1"
__author__ = "Anywave Creations"

from .core_series import (
    MonthIndex,
    MonthlySeries,
    DiffContext,
    difference,
    difference_chain,
    integrate,
    slice_series,
)
from .sarima import (
    SarimaSpec,
    CoefficientSet,
    FittedModel,
    CANDIDATE_MODELS,
    FINAL_MODEL,
    expand_polynomials,
    log_likelihood,
    information_criteria,
    simulate,
)
from .identification import AdfType, AdfResult, acf, pacf, adf_test, adf_table
from .estimation import FitOptions, fit, fit_candidates
from .diagnostics import ljung_box, shapiro_wilk, jarque_bera, residual_diagnostics
from .forecasting import ForecastResult, AccuracyTable, forecast, accuracy
from .decomposition import Decomposition, decompose
from .impact import LossReport, quantify_impact
from .spec_notation import parse_spec, render_spec
from .ingestion import parse_csv, load_csv
from .model_store import save_model, load_model
from .candidate_sweep import CandidateSweep

__all__ = [
    "MonthIndex",
    "MonthlySeries",
    "DiffContext",
    "difference",
    "difference_chain",
    "integrate",
    "slice_series",
    "SarimaSpec",
    "CoefficientSet",
    "FittedModel",
    "CANDIDATE_MODELS",
    "FINAL_MODEL",
    "expand_polynomials",
    "log_likelihood",
    "information_criteria",
    "simulate",
    "AdfType",
    "AdfResult",
    "acf",
    "pacf",
    "adf_test",
    "adf_table",
    "FitOptions",
    "fit",
    "fit_candidates",
    "ljung_box",
    "shapiro_wilk",
    "jarque_bera",
    "residual_diagnostics",
    "ForecastResult",
    "AccuracyTable",
    "forecast",
    "accuracy",
    "Decomposition",
    "decompose",
    "LossReport",
    "quantify_impact",
    "parse_spec",
    "render_spec",
    "parse_csv",
    "load_csv",
    "save_model",
    "load_model",
    "CandidateSweep",
]
