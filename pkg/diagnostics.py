"""
Residual Diagnostics

Ljung-Box portmanteau curve, Shapiro-Wilk and Jarque-Bera normality tests,
residual correlogram and normal Q-Q coordinates for a fitted model.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np
from scipy import stats

from core_series import MonthlySeries
from errors import DegenerateInputError, IndexRangeError, SeriesLengthError
from identification import CorrelogramResult, sample_autocorrelations, acf
from sarima import FittedModel

logger = logging.getLogger(__name__)

DEFAULT_MAX_LAG = 24     # two seasonal cycles
ALPHA = 0.05


def _sample(values: Union[MonthlySeries, Sequence[float], np.ndarray]) -> np.ndarray:
    if isinstance(values, MonthlySeries):
        return values.values
    return np.asarray(values, dtype=float).reshape(-1)


@dataclass(frozen=True)
class LjungBoxCurve:
    lags: np.ndarray
    statistics: np.ndarray
    p_values: np.ndarray       # NaN where lag <= fitdf
    defined: np.ndarray        # bool mask of lags with a p-value
    fitdf: int
    n: int

    def min_p_value(self) -> float:
        return float(np.min(self.p_values[self.defined])) if self.defined.any() else float("nan")

    def rejected_lags(self, alpha: float = ALPHA) -> List[int]:
        return [int(k) for k, p, ok in zip(self.lags, self.p_values, self.defined) if ok and p < alpha]

    def records(self) -> List[Dict]:
        return [
            {"lag": int(k), "statistic": float(q), "p_value": float(p) if ok else None, "defined": bool(ok)}
            for k, q, p, ok in zip(self.lags, self.statistics, self.p_values, self.defined)
        ]


@dataclass(frozen=True)
class NormalityReport:
    n: int
    shapiro_w: float
    shapiro_p: float
    jb_stat: float
    jb_p: float
    skewness: float
    kurtosis: float            # Pearson kurtosis (3 for a normal)

    def is_normal(self, alpha: float = ALPHA) -> bool:
        return self.shapiro_p >= alpha and self.jb_p >= alpha

    def to_dict(self) -> Dict:
        return {
            "n": self.n, "shapiro_w": self.shapiro_w, "shapiro_p": self.shapiro_p,
            "jb_stat": self.jb_stat, "jb_p": self.jb_p,
            "skewness": self.skewness, "kurtosis": self.kurtosis,
        }


@dataclass(frozen=True)
class DiagnosticsBundle:
    ljung_box: LjungBoxCurve
    normality: NormalityReport
    residual_acf: CorrelogramResult
    qq: List[Tuple[float, float]]

    def summary(self, alpha: float = ALPHA) -> Dict:
        """Adequacy verdict: no residual correlation left and Gaussian-looking residuals."""
        white_noise = not self.ljung_box.rejected_lags(alpha)
        normal = self.normality.is_normal(alpha)
        return {
            "white_noise": white_noise,
            "normal": normal,
            "adequate": white_noise and normal,
            "min_ljung_box_p": self.ljung_box.min_p_value(),
            "rejected_lags": self.ljung_box.rejected_lags(alpha),
            "shapiro_p": self.normality.shapiro_p,
            "jb_p": self.normality.jb_p,
        }


def ljung_box(residuals, max_lag: int, fitdf: int = 0) -> LjungBoxCurve:
    """Q(L) = n(n+2) sum r_k^2/(n-k), chi-square with L - fitdf degrees of freedom."""
    x = _sample(residuals)
    if max_lag < 1:
        raise IndexRangeError(f"max_lag must be positive, got {max_lag}")
    if fitdf < 0:
        raise IndexRangeError(f"fitdf must be non-negative, got {fitdf}")
    n = x.size
    r = sample_autocorrelations(x, max_lag)[1:]
    lags = np.arange(1, max_lag + 1)
    statistics = n * (n + 2) * np.cumsum(r ** 2 / (n - lags))
    dof = lags - fitdf
    defined = dof > 0
    p_values = np.full(max_lag, np.nan)
    p_values[defined] = stats.chi2.sf(statistics[defined], dof[defined])
    return LjungBoxCurve(lags, statistics, p_values, defined, fitdf, n)


def shapiro_wilk(sample) -> Tuple[float, float]:
    """Shapiro-Wilk W and p-value (Royston approximation, 3 <= n <= 5000)."""
    x = _sample(sample)
    if not 3 <= x.size <= 5000:
        raise IndexRangeError(f"Shapiro-Wilk needs 3..5000 observations, got {x.size}")
    if np.ptp(x) == 0.0:
        raise DegenerateInputError("Shapiro-Wilk undefined for a zero-variance sample")
    result = stats.shapiro(x)
    return float(result.statistic), float(result.pvalue)


def _moments(x: np.ndarray) -> Tuple[float, float]:
    if np.ptp(x) == 0.0:
        raise DegenerateInputError("moments undefined for a zero-variance sample")
    return float(stats.skew(x, bias=True)), float(stats.kurtosis(x, fisher=False, bias=True))


def jarque_bera_from_moments(n: int, skewness: float, kurtosis: float) -> float:
    return n / 6.0 * (skewness ** 2 + (kurtosis - 3.0) ** 2 / 4.0)


def jarque_bera(sample) -> Tuple[float, float]:
    """JB = n/6 (S^2 + (K-3)^2/4), upper tail of chi-square(2)."""
    x = _sample(sample)
    if x.size < 8:
        raise SeriesLengthError(f"Jarque-Bera needs at least 8 observations, got {x.size}")
    skewness, kurtosis = _moments(x)
    jb = jarque_bera_from_moments(x.size, skewness, kurtosis)
    return float(jb), float(stats.chi2.sf(jb, 2))


def normality_report(sample) -> NormalityReport:
    x = _sample(sample)
    w, w_p = shapiro_wilk(x)
    jb, jb_p = jarque_bera(x)
    skewness, kurtosis = _moments(x)
    return NormalityReport(x.size, w, w_p, jb, jb_p, skewness, kurtosis)


def qq_pairs(sample) -> List[Tuple[float, float]]:
    """(theoretical, empirical) quantiles at plotting positions (i - 0.5)/n."""
    x = np.sort(_sample(sample))
    n = x.size
    theoretical = stats.norm.ppf((np.arange(1, n + 1) - 0.5) / n)
    return [(float(t), float(e)) for t, e in zip(theoretical, x)]


def residual_diagnostics(model: FittedModel, max_lag: int = DEFAULT_MAX_LAG) -> DiagnosticsBundle:
    residuals = model.residuals.values
    max_lag = min(max_lag, residuals.size - 1)
    fitdf = model.spec.n_free
    logger.info(f"Residual diagnostics for {model.label or 'model'}: n={residuals.size}, max_lag={max_lag}, fitdf={fitdf}")
    return DiagnosticsBundle(
        ljung_box=ljung_box(residuals, max_lag, fitdf),
        normality=normality_report(residuals),
        residual_acf=acf(residuals, max_lag),
        qq=qq_pairs(residuals),
    )
