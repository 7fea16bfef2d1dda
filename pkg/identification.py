"""
Model Identification

Sample ACF / PACF correlograms and the augmented Dickey-Fuller unit-root test
in its three classic forms:

    Type 1: no drift, no trend     dy_t = rho*y_{t-1} + sum b_j dy_{t-j} + e_t
    Type 2: drift, no trend        dy_t = a + rho*y_{t-1} + ...
    Type 3: drift and trend        dy_t = a + c*t + rho*y_{t-1} + ...

The ADF statistic is the t-ratio of rho; p-values are interpolated in the
Fuller percentile tables and clamped to [0.01, 0.99] with a boundary flag.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Sequence, Union

import numpy as np
from scipy import stats

from core_series import MonthlySeries
from errors import DegenerateInputError, IndexRangeError, NumericalError, SeriesLengthError

logger = logging.getLogger(__name__)


class AdfType(Enum):
    """Deterministic terms in the ADF regression."""
    NO_DRIFT_NO_TREND = 1
    DRIFT_NO_TREND = 2
    DRIFT_AND_TREND = 3

    @property
    def label(self) -> str:
        return {
            AdfType.NO_DRIFT_NO_TREND: "no-drift-no-trend",
            AdfType.DRIFT_NO_TREND: "drift-no-trend",
            AdfType.DRIFT_AND_TREND: "drift-and-trend",
        }[self]


@dataclass(frozen=True)
class CorrelogramResult:
    """Sample ACF or PACF at lags 1..L with the white-noise band +-z/sqrt(n)."""
    kind: str                # "acf" or "pacf"
    lags: np.ndarray
    values: np.ndarray
    band: float
    level: float
    n: int

    def outside_band(self) -> List[int]:
        """Lags whose correlation lies outside the white-noise band."""
        return [int(k) for k, v in zip(self.lags, self.values) if abs(v) > self.band]

    def to_dict(self) -> Dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "level": self.level,
            "band": self.band,
            "lags": [int(k) for k in self.lags],
            "values": [float(v) for v in self.values],
        }


@dataclass(frozen=True)
class AdfResult:
    type: AdfType
    lag: int
    statistic: float
    p_value: float
    p_at_boundary: bool      # p clamped to the table edge (printed as <= 0.01 / >= 0.99)
    nobs: int
    critical_values: Dict[str, float]

    def rejects(self, alpha: float = 0.05) -> bool:
        """Unit-root null rejected at ``alpha``."""
        return self.p_value <= alpha

    def p_display(self) -> str:
        if self.p_at_boundary and self.p_value <= 0.01:
            return "<=0.01"
        if self.p_at_boundary and self.p_value >= 0.99:
            return ">=0.99"
        return f"{self.p_value:.4f}"

    def to_dict(self) -> Dict:
        return {
            "type": self.type.value,
            "type_label": self.type.label,
            "lag": self.lag,
            "statistic": self.statistic,
            "p_value": self.p_value,
            "p_at_boundary": self.p_at_boundary,
            "nobs": self.nobs,
            "critical_values": dict(self.critical_values),
        }


# Fuller (1976) empirical percentiles of the Dickey-Fuller t-statistic.
# Rows: sample sizes; columns: cumulative probabilities in _ADF_PROBS.
_ADF_SIZES = np.array([25, 50, 100, 250, 500, 100000], dtype=float)
_ADF_PROBS = np.array([0.01, 0.025, 0.05, 0.10, 0.90, 0.95, 0.975, 0.99])
_ADF_TABLES = {
    AdfType.NO_DRIFT_NO_TREND: np.array([
        [-2.66, -2.26, -1.95, -1.60, 0.92, 1.33, 1.70, 2.16],
        [-2.62, -2.25, -1.95, -1.61, 0.91, 1.31, 1.66, 2.08],
        [-2.60, -2.24, -1.95, -1.61, 0.90, 1.29, 1.64, 2.03],
        [-2.58, -2.23, -1.95, -1.62, 0.89, 1.29, 1.63, 2.01],
        [-2.58, -2.23, -1.95, -1.62, 0.89, 1.28, 1.62, 2.00],
        [-2.58, -2.23, -1.95, -1.62, 0.89, 1.28, 1.62, 2.00],
    ]),
    AdfType.DRIFT_NO_TREND: np.array([
        [-3.75, -3.33, -3.00, -2.63, -0.37, 0.00, 0.34, 0.72],
        [-3.58, -3.22, -2.93, -2.60, -0.40, -0.03, 0.29, 0.66],
        [-3.51, -3.17, -2.89, -2.58, -0.42, -0.05, 0.26, 0.63],
        [-3.46, -3.14, -2.88, -2.57, -0.42, -0.06, 0.24, 0.62],
        [-3.44, -3.13, -2.87, -2.57, -0.43, -0.07, 0.24, 0.61],
        [-3.43, -3.12, -2.86, -2.57, -0.44, -0.07, 0.23, 0.60],
    ]),
    AdfType.DRIFT_AND_TREND: np.array([
        [-4.38, -3.95, -3.60, -3.24, -1.14, -0.80, -0.50, -0.15],
        [-4.15, -3.80, -3.50, -3.18, -1.19, -0.87, -0.58, -0.24],
        [-4.04, -3.73, -3.45, -3.15, -1.22, -0.90, -0.62, -0.28],
        [-3.99, -3.69, -3.43, -3.13, -1.23, -0.92, -0.64, -0.31],
        [-3.98, -3.68, -3.42, -3.13, -1.24, -0.93, -0.65, -0.32],
        [-3.96, -3.66, -3.41, -3.12, -1.25, -0.94, -0.66, -0.33],
    ]),
}


def _values(series: Union[MonthlySeries, Sequence[float], np.ndarray]) -> np.ndarray:
    if isinstance(series, MonthlySeries):
        return series.values
    return np.asarray(series, dtype=float).reshape(-1)


def _band(n: int, level: float) -> float:
    if not 0 < level < 1:
        raise ValueError(f"confidence level must lie in (0, 1), got {level}")
    z = stats.norm.ppf(0.5 + level / 2)
    return float(z / np.sqrt(n))


def sample_autocorrelations(x: np.ndarray, max_lag: int) -> np.ndarray:
    """r_0..r_L with the biased (divide-by-n) autocovariance."""
    n = x.size
    if max_lag >= n:
        raise IndexRangeError(f"max_lag {max_lag} must be smaller than the series length {n}")
    centred = x - x.mean()
    c0 = float(np.dot(centred, centred)) / n
    if c0 <= 0.0:
        raise DegenerateInputError("autocorrelation undefined for a zero-variance series")
    r = np.empty(max_lag + 1)
    r[0] = 1.0
    for k in range(1, max_lag + 1):
        r[k] = float(np.dot(centred[k:], centred[:-k])) / n / c0
    return r


def acf(series, max_lag: int, level: float = 0.95) -> CorrelogramResult:
    """Sample autocorrelations r_1..r_L (biased covariance estimator)."""
    if max_lag < 1:
        raise IndexRangeError(f"max_lag must be positive, got {max_lag}")
    x = _values(series)
    r = sample_autocorrelations(x, max_lag)
    return CorrelogramResult(
        kind="acf",
        lags=np.arange(1, max_lag + 1),
        values=r[1:],
        band=_band(x.size, level),
        level=level,
        n=x.size,
    )


def durbin_levinson(r: np.ndarray) -> np.ndarray:
    """
    Partial autocorrelations from autocorrelations r_0..r_L.

    Returns phi_kk for k = 1..L; phi_11 is r_1 exactly.
    """
    max_lag = r.size - 1
    pacf_values = np.empty(max_lag)
    phi = np.zeros(0)
    for k in range(1, max_lag + 1):
        if k == 1:
            phi_kk = r[1]
        else:
            numerator = r[k] - np.dot(phi, r[k - 1:0:-1])
            denominator = 1.0 - np.dot(phi, r[1:k])
            if abs(denominator) < 1e-12:
                raise NumericalError(f"Durbin-Levinson breakdown at lag {k}")
            phi_kk = numerator / denominator
        phi = np.concatenate([phi - phi_kk * phi[::-1], [phi_kk]])
        pacf_values[k - 1] = phi_kk
    return pacf_values


def pacf(series, max_lag: int, level: float = 0.95) -> CorrelogramResult:
    """Sample partial autocorrelations via Durbin-Levinson on the sample ACF."""
    if max_lag < 1:
        raise IndexRangeError(f"max_lag must be positive, got {max_lag}")
    x = _values(series)
    r = sample_autocorrelations(x, max_lag)
    return CorrelogramResult(
        kind="pacf",
        lags=np.arange(1, max_lag + 1),
        values=durbin_levinson(r),
        band=_band(x.size, level),
        level=level,
        n=x.size,
    )


def _critical_row(adf_type: AdfType, nobs: int) -> np.ndarray:
    table = _ADF_TABLES[adf_type]
    return np.array([
        np.interp(nobs, _ADF_SIZES, table[:, j]) for j in range(_ADF_PROBS.size)
    ])


def adf_p_value(statistic: float, adf_type: AdfType, nobs: int):
    """Interpolated p-value, boundary flag and the row of critical values."""
    row = _critical_row(adf_type, nobs)
    p_value = float(np.interp(statistic, row, _ADF_PROBS))
    at_boundary = statistic <= row[0] or statistic >= row[-1]
    return p_value, at_boundary, row


def _regressors(y: np.ndarray, lag: int, first_row: int, adf_type: AdfType):
    dy = np.diff(y)
    rows = np.arange(first_row, dy.size)
    columns = [y[rows]]                                   # y_{t-1}
    if adf_type in (AdfType.DRIFT_NO_TREND, AdfType.DRIFT_AND_TREND):
        columns.append(np.ones(rows.size))
    if adf_type is AdfType.DRIFT_AND_TREND:
        columns.append(rows + 1.0)
    for j in range(1, lag + 1):
        columns.append(dy[rows - j])
    return dy[rows], np.column_stack(columns)


def _adf_statistic(response: np.ndarray, design: np.ndarray) -> float:
    nobs, n_regressors = design.shape
    if np.linalg.matrix_rank(design) < n_regressors:
        raise NumericalError("singular ADF regression")
    beta, _, _, _ = np.linalg.lstsq(design, response, rcond=None)
    residuals = response - design @ beta
    dof = nobs - n_regressors
    sigma2 = float(np.dot(residuals, residuals)) / dof
    if sigma2 <= 0.0:
        raise NumericalError("ADF regression fits exactly; t-ratio undefined")
    xtx_inv = np.linalg.inv(design.T @ design)
    return float(beta[0] / np.sqrt(sigma2 * xtx_inv[0, 0]))


def adf_test(
    series,
    max_lag: int,
    adf_type: Union[AdfType, int] = AdfType.NO_DRIFT_NO_TREND,
) -> List[AdfResult]:
    """
    ADF tests for lags 0..max_lag.

    Each lag uses its own effective sample (rows from ``lag`` onward), so
    entry k equals ``adf_test(series, k, adf_type)[k]`` and carries its own
    ``nobs``.
    """
    adf_type = AdfType(adf_type)
    if max_lag < 0:
        raise ValueError(f"max_lag must be non-negative, got {max_lag}")
    y = _values(series)
    deterministic = {AdfType.NO_DRIFT_NO_TREND: 0, AdfType.DRIFT_NO_TREND: 1,
                     AdfType.DRIFT_AND_TREND: 2}[adf_type]
    n_regressors = 1 + max_lag + deterministic
    if y.size <= max_lag + 2 + n_regressors:
        raise SeriesLengthError(
            f"ADF with max_lag={max_lag} ({adf_type.label}) needs more than "
            f"{max_lag + 2 + n_regressors} observations, got {y.size}"
        )
    if np.ptp(y) == 0.0:
        raise DegenerateInputError("ADF test undefined for a constant series")

    results = []
    for lag in range(max_lag + 1):
        response, design = _regressors(y, lag, lag, adf_type)
        statistic = _adf_statistic(response, design)
        nobs = response.size
        p_value, at_boundary, row = adf_p_value(statistic, adf_type, nobs)
        results.append(AdfResult(
            type=adf_type,
            lag=lag,
            statistic=statistic,
            p_value=p_value,
            p_at_boundary=at_boundary,
            nobs=nobs,
            critical_values={"1%": float(row[0]), "5%": float(row[2]), "10%": float(row[3])},
        ))
        logger.debug(f"ADF {adf_type.label} lag {lag}: stat={statistic:.4f} p={p_value:.4f}")
    return results


def adf_table(series, max_lag: int = 4) -> Dict[AdfType, List[AdfResult]]:
    """All three ADF types over lags 0..max_lag."""
    return {adf_type: adf_test(series, max_lag, adf_type) for adf_type in AdfType}
