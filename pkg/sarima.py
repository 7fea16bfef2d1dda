"""
Sparse Seasonal ARIMA

Specification, coefficient sets, the multiplicative polynomial expansion and
the exact Gaussian likelihood of the differenced ARMA(p+sP, q+sQ) process.

State-space form (Harvey):
    y_t       = Z a_t,                 Z = (1, 0, ..., 0)
    a_{t+1}   = T a_t + R e_{t+1},     T = [phi | I; 0],  R = (1, theta_1, ..., theta_{r-1})
with r = max(len(phi), len(theta) + 1) and a stationary initial covariance
solving P0 = T P0 T' + R R'. The filter runs with unit innovation variance so
sigma2 can be concentrated out of the likelihood.

Sign conventions: AR polynomial 1 - sum(phi_i B^i), MA polynomial 1 + sum(theta_i B^i).
"""

import logging
import math
import re
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg, signal

from core_series import DiffContext, MonthIndex, MonthlySeries, difference_chain, integrate
from errors import LikelihoodError, SeriesLengthError, SimulationError, SpecValidationError

logger = logging.getLogger(__name__)

SLOT_KINDS = ("ar", "ma", "sar", "sma")
_SLOT_PATTERN = re.compile(r"^(ar|ma|sar|sma)([1-9][0-9]*)$")

# Stationarity margin for root checks
ROOT_TOLERANCE = 1e-8


def slot_name(kind: str, index: int) -> str:
    return f"{kind}{index}"


def split_slot(slot: str) -> Tuple[str, int]:
    """``"sar3"`` -> ``("sar", 3)``."""
    match = _SLOT_PATTERN.match(slot)
    if not match:
        raise SpecValidationError(f"'{slot}' is not a coefficient slot (expected ar/ma/sar/sma + index)")
    return match.group(1), int(match.group(2))


@dataclass(frozen=True)
class SarimaSpec:
    """
    Orders (p,d,q)x(P,D,Q)_s plus the set of coefficient slots pinned to zero.
    """
    p: int = 0
    d: int = 0
    q: int = 0
    P: int = 0
    D: int = 0
    Q: int = 0
    s: int = 12
    mask: FrozenSet[str] = field(default_factory=frozenset)

    def __post_init__(self):
        for name in ("p", "d", "q", "P", "D", "Q"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or value < 0:
                raise SpecValidationError(f"order {name} must be a non-negative integer, got {value!r}")
        if self.s < 1:
            raise SpecValidationError(f"seasonal period must be >= 1, got {self.s}")
        mask = frozenset(self.mask)
        for slot in mask:
            kind, index = split_slot(slot)
            if index > self.order_of(kind):
                raise SpecValidationError(
                    f"mask slot {slot} exceeds the {kind} order {self.order_of(kind)}"
                )
        object.__setattr__(self, "mask", mask)

    def order_of(self, kind: str) -> int:
        return {"ar": self.p, "ma": self.q, "sar": self.P, "sma": self.Q}[kind]

    def slots(self) -> List[str]:
        """All coefficient slots in canonical order (ar, ma, sar, sma)."""
        return [slot_name(kind, i) for kind in SLOT_KINDS for i in range(1, self.order_of(kind) + 1)]

    def free_slots(self) -> List[str]:
        return [slot for slot in self.slots() if slot not in self.mask]

    @property
    def n_free(self) -> int:
        return self.p + self.q + self.P + self.Q - len(self.mask)

    @property
    def consumed(self) -> int:
        """Observations lost to differencing."""
        return self.d + self.D * self.s

    def lag_of(self, slot: str) -> int:
        """Backshift power at which a slot enters its factor."""
        kind, index = split_slot(slot)
        return index * self.s if kind in ("sar", "sma") else index

    def with_mask(self, extra: Iterable[str]) -> "SarimaSpec":
        return SarimaSpec(self.p, self.d, self.q, self.P, self.D, self.Q, self.s,
                          self.mask | frozenset(extra))


@dataclass(frozen=True)
class CoefficientSet:
    """Coefficient values per factor; masked entries are exactly zero."""
    ar: Tuple[float, ...] = ()
    ma: Tuple[float, ...] = ()
    sar: Tuple[float, ...] = ()
    sma: Tuple[float, ...] = ()

    def __post_init__(self):
        for kind in SLOT_KINDS:
            object.__setattr__(self, kind, tuple(float(v) for v in getattr(self, kind)))

    @classmethod
    def zeros(cls, spec: SarimaSpec) -> "CoefficientSet":
        return cls(ar=(0.0,) * spec.p, ma=(0.0,) * spec.q, sar=(0.0,) * spec.P, sma=(0.0,) * spec.Q)

    @classmethod
    def from_mapping(cls, spec: SarimaSpec, values: Mapping[str, float]) -> "CoefficientSet":
        """Build from ``{slot: value}``; absent slots are zero, masked slots must stay zero."""
        unknown = set(values) - set(spec.slots())
        if unknown:
            raise SpecValidationError(f"unknown coefficient slots: {sorted(unknown)}")
        factors = {kind: [0.0] * spec.order_of(kind) for kind in SLOT_KINDS}
        for slot, value in values.items():
            kind, index = split_slot(slot)
            factors[kind][index - 1] = float(value)
        coef = cls(**factors)
        coef.check(spec)
        return coef

    @classmethod
    def from_free(cls, spec: SarimaSpec, free_values: Sequence[float]) -> "CoefficientSet":
        """Build from values for ``spec.free_slots()`` in order."""
        free = spec.free_slots()
        if len(free_values) != len(free):
            raise SpecValidationError(f"expected {len(free)} free coefficients, got {len(free_values)}")
        return cls.from_mapping(spec, dict(zip(free, free_values)))

    def check(self, spec: SarimaSpec) -> None:
        for kind in SLOT_KINDS:
            if len(getattr(self, kind)) != spec.order_of(kind):
                raise SpecValidationError(
                    f"{kind} has {len(getattr(self, kind))} coefficients, spec order is {spec.order_of(kind)}"
                )
        for slot in spec.mask:
            if self.value(slot) != 0.0:
                raise SpecValidationError(f"masked slot {slot} must be exactly zero")

    def value(self, slot: str) -> float:
        kind, index = split_slot(slot)
        return getattr(self, kind)[index - 1]

    def as_dict(self) -> Dict[str, float]:
        return {slot_name(kind, i + 1): v for kind in SLOT_KINDS for i, v in enumerate(getattr(self, kind))}

    def free_vector(self, spec: SarimaSpec) -> np.ndarray:
        return np.array([self.value(slot) for slot in spec.free_slots()])


def _seasonal_factor(coefficients: Sequence[float], s: int, sign: float) -> np.ndarray:
    poly = np.zeros(len(coefficients) * s + 1)
    poly[0] = 1.0
    for j, c in enumerate(coefficients, start=1):
        poly[j * s] = sign * c
    return poly


def expand_polynomials(spec: SarimaSpec, coef: CoefficientSet) -> Tuple[np.ndarray, np.ndarray]:
    """
    Multiply out phi(B)Phi(B^s) and theta(B)Theta(B^s).

    Returns (ar_full, ma_full) such that the AR polynomial is
    1 - sum(ar_full[i-1] B^i) and the MA polynomial 1 + sum(ma_full[i-1] B^i).
    Trailing zero coefficients are dropped.
    """
    coef.check(spec)
    ar_poly = np.convolve(_seasonal_factor(coef.ar, 1, -1.0), _seasonal_factor(coef.sar, spec.s, -1.0))
    ma_poly = np.convolve(_seasonal_factor(coef.ma, 1, 1.0), _seasonal_factor(coef.sma, spec.s, 1.0))
    ar_full = np.trim_zeros(-ar_poly[1:], "b")
    ma_full = np.trim_zeros(ma_poly[1:], "b")
    return ar_full, ma_full


def roots_outside_unit_circle(lag_coefficients: np.ndarray, sign: float = -1.0) -> bool:
    """True if 1 + sign*sum(c_i z^i) has all roots strictly outside |z| = 1."""
    lag_coefficients = np.trim_zeros(np.asarray(lag_coefficients, dtype=float), "b")
    if lag_coefficients.size == 0:
        return True
    poly = np.concatenate([[1.0], sign * lag_coefficients])
    roots = np.roots(poly[::-1])
    return bool(np.all(np.abs(roots) > 1.0 + ROOT_TOLERANCE))


def is_stationary(ar_full: np.ndarray) -> bool:
    return roots_outside_unit_circle(ar_full, sign=-1.0)


def is_invertible(ma_full: np.ndarray) -> bool:
    return roots_outside_unit_circle(ma_full, sign=1.0)


@dataclass
class FilterOutput:
    """Kalman filter run with unit innovation variance."""
    innovations: np.ndarray      # v_t
    variances: np.ndarray        # F_t (in units of sigma2)
    state: np.ndarray            # predicted state a_{n+1}
    covariance: np.ndarray       # P_{n+1} (in units of sigma2)
    transition_ar: np.ndarray    # first column of T
    selection: np.ndarray        # R

    @property
    def standardized(self) -> np.ndarray:
        """Innovations scaled to variance sigma2."""
        return self.innovations / np.sqrt(self.variances)


def _companion_left(phi: np.ndarray, M: np.ndarray) -> np.ndarray:
    """T @ M for the companion-form transition with first column ``phi``."""
    out = np.outer(phi, M[0])
    out[:-1] += M[1:]
    return out


def companion_step(phi: np.ndarray, a: np.ndarray) -> np.ndarray:
    out = phi * a[0]
    out[:-1] += a[1:]
    return out


def state_space(ar_full: np.ndarray, ma_full: np.ndarray):
    r = max(len(ar_full), len(ma_full) + 1)
    phi = np.zeros(r)
    phi[:len(ar_full)] = ar_full
    selection = np.zeros(r)
    selection[0] = 1.0
    selection[1:len(ma_full) + 1] = ma_full
    return phi, selection


def kalman_filter(ar_full: np.ndarray, ma_full: np.ndarray, y: np.ndarray) -> FilterOutput:
    """Exact innovations of an ARMA process started from its stationary distribution."""
    ar_full = np.asarray(ar_full, dtype=float)
    ma_full = np.asarray(ma_full, dtype=float)
    y = np.asarray(y, dtype=float)
    if not is_stationary(ar_full):
        raise LikelihoodError("AR polynomial has a root on or inside the unit circle")

    phi, selection = state_space(ar_full, ma_full)
    r = phi.size
    rr = np.outer(selection, selection)
    transition = np.zeros((r, r))
    transition[:, 0] = phi
    transition[:-1, 1:] = np.eye(r - 1)
    try:
        P = linalg.solve_discrete_lyapunov(transition, rr)
    except (linalg.LinAlgError, ValueError) as e:
        raise LikelihoodError(f"stationary state covariance unavailable: {e}") from e
    P = (P + P.T) / 2

    n = y.size
    innovations = np.empty(n)
    variances = np.empty(n)
    a = np.zeros(r)
    steady = False
    for t in range(n):
        F = P[0, 0]
        if not F > 0.0 or not np.isfinite(F):
            raise LikelihoodError(f"non-positive prediction variance at step {t}")
        v = y[t] - a[0]
        innovations[t] = v
        variances[t] = F
        gain = P[:, 0] / F
        a = companion_step(phi, a + gain * v)
        if not steady:
            P_filtered = P - np.outer(P[:, 0], gain)
            P_next = _companion_left(phi, _companion_left(phi, P_filtered).T) + rr
            P_next = (P_next + P_next.T) / 2
            steady = np.max(np.abs(P_next - P)) < 1e-13 * max(1.0, abs(F))
            P = P_next
    return FilterOutput(innovations, variances, a, P, phi, selection)


def _values(series: Union[MonthlySeries, Sequence[float], np.ndarray]) -> np.ndarray:
    if isinstance(series, MonthlySeries):
        return series.values
    return np.asarray(series, dtype=float).reshape(-1)


def log_likelihood(spec: SarimaSpec, coef: CoefficientSet, sigma2: float, diffed) -> float:
    """Exact Gaussian log-likelihood of the ARMA model on the differenced series."""
    if not sigma2 > 0.0:
        raise LikelihoodError(f"innovation variance must be positive, got {sigma2}")
    ar_full, ma_full = expand_polynomials(spec, coef)
    out = kalman_filter(ar_full, ma_full, _values(diffed))
    F = out.variances
    v = out.innovations
    return float(-0.5 * np.sum(
        np.log(2 * np.pi) + np.log(sigma2) + np.log(F) + v * v / (sigma2 * F)
    ))


def concentrated_log_likelihood(ar_full, ma_full, y) -> Tuple[float, float, FilterOutput]:
    """Profile log-likelihood with sigma2 replaced by its closed-form MLE."""
    y = np.asarray(y, dtype=float)
    out = kalman_filter(ar_full, ma_full, y)
    n = y.size
    sigma2 = float(np.sum(out.innovations ** 2 / out.variances) / n)
    if not sigma2 > 0.0:
        raise LikelihoodError("zero innovation variance; series is perfectly predictable")
    loglik = -0.5 * n * (np.log(2 * np.pi) + np.log(sigma2) + 1.0) - 0.5 * float(np.sum(np.log(out.variances)))
    return float(loglik), sigma2, out


def information_criteria(loglik: float, k: int, n: int) -> Tuple[float, float, float]:
    """(aic, bic, aicc); k counts free coefficients plus the innovation variance."""
    if n <= k + 1:
        raise SeriesLengthError(f"AICc undefined for n={n} with k={k} parameters")
    aic = -2.0 * loglik + 2.0 * k
    bic = -2.0 * loglik + k * math.log(n)
    aicc = aic + 2.0 * k * (k + 1) / (n - k - 1)
    return aic, bic, aicc


@dataclass(frozen=True)
class CoefficientRow:
    slot: str
    coef: float
    se: float
    masked: bool
    significant: Optional[bool]

    def to_dict(self) -> Dict:
        return {"slot": self.slot, "coef": self.coef, "se": self.se,
                "masked": self.masked, "significant": self.significant}


@dataclass(frozen=True, eq=False)
class FittedModel:
    spec: SarimaSpec
    coef: CoefficientSet
    se: Dict[str, float]
    sigma2: float
    loglik: float
    aic: float
    bic: float
    aicc: float
    residuals: MonthlySeries
    ctx: DiffContext
    n_effective: int
    train: MonthlySeries
    diffed: MonthlySeries
    label: str = ""
    converged: bool = True
    se_available: bool = True
    initial_loglik: Optional[float] = None

    @property
    def k(self) -> int:
        return self.spec.n_free + 1

    @property
    def train_start(self) -> MonthIndex:
        return self.train.start

    @property
    def train_end(self) -> MonthIndex:
        return self.train.end

    def is_significant(self, slot: str) -> Optional[bool]:
        """|coef| >= 2 se; None for masked slots or unavailable errors."""
        if slot in self.spec.mask:
            return None
        se = self.se.get(slot, float("nan"))
        if not np.isfinite(se):
            return None
        return abs(self.coef.value(slot)) >= 2.0 * se

    def coefficient_rows(self) -> List[CoefficientRow]:
        rows = []
        for slot in self.spec.slots():
            masked = slot in self.spec.mask
            rows.append(CoefficientRow(
                slot=slot,
                coef=self.coef.value(slot),
                se=0.0 if masked else self.se.get(slot, float("nan")),
                masked=masked,
                significant=self.is_significant(slot),
            ))
        return rows

    def __repr__(self) -> str:
        name = f"{self.label} " if self.label else ""
        return f"FittedModel({name}loglik={self.loglik:.4f}, aic={self.aic:.4f}, n={self.n_effective})"


def assemble_model(
    spec: SarimaSpec,
    coef: CoefficientSet,
    train: MonthlySeries,
    sigma2: Optional[float] = None,
    se: Optional[Mapping[str, float]] = None,
    label: str = "",
    converged: bool = True,
    initial_loglik: Optional[float] = None,
) -> FittedModel:
    """
    FittedModel from known coefficients, without optimisation.

    ``sigma2`` defaults to its maximum-likelihood value given the coefficients.
    """
    coef.check(spec)
    if len(train) <= spec.consumed:
        raise SeriesLengthError(
            f"train series of length {len(train)} does not survive {spec.consumed} differenced observations"
        )
    diffed, ctx = difference_chain(train, spec.d, spec.D, spec.s)
    ar_full, ma_full = expand_polynomials(spec, coef)
    concentrated, sigma2_hat, out = concentrated_log_likelihood(ar_full, ma_full, diffed.values)
    if sigma2 is None:
        sigma2 = sigma2_hat
        loglik = concentrated
    else:
        loglik = log_likelihood(spec, coef, sigma2, diffed)
    n = len(diffed)
    aic, bic, aicc = information_criteria(loglik, spec.n_free + 1, n)

    if se is None:
        se_values = {slot: float("nan") for slot in spec.free_slots()}
        se_available = False
    else:
        se_values = {slot: float(se[slot]) for slot in spec.free_slots()}
        se_available = all(np.isfinite(v) for v in se_values.values())
    for slot in spec.mask:
        se_values[slot] = 0.0

    residuals = MonthlySeries(diffed.start, out.standardized)
    return FittedModel(
        spec=spec, coef=coef, se=se_values, sigma2=float(sigma2), loglik=loglik,
        aic=aic, bic=bic, aicc=aicc, residuals=residuals, ctx=ctx, n_effective=n,
        train=train, diffed=diffed, label=label, converged=converged,
        se_available=se_available,
        initial_loglik=loglik if initial_loglik is None else initial_loglik,
    )


def simulate(
    spec: SarimaSpec,
    coef: CoefficientSet,
    sigma2: float,
    n: int,
    seed: int,
    start: MonthIndex = MonthIndex(2000, 1),
) -> MonthlySeries:
    """
    Draw a SARIMA path of length ``n``.

    The ARMA part is generated on the differenced scale after a burn-in and
    integrated from zero initial levels.
    """
    if n < 1:
        raise SimulationError(f"n must be positive, got {n}")
    if not sigma2 > 0.0:
        raise SimulationError(f"innovation variance must be positive, got {sigma2}")
    ar_full, ma_full = expand_polynomials(spec, coef)
    if not is_stationary(ar_full):
        raise SimulationError("cannot simulate a non-stationary AR polynomial")
    n_arma = n - spec.consumed
    if n_arma < 1:
        raise SimulationError(
            f"n={n} leaves no observations after {spec.consumed} differenced values"
        )

    burn_in = 10 * (len(ar_full) + len(ma_full) + 1)
    rng = np.random.default_rng(seed)
    shocks = rng.normal(0.0, math.sqrt(sigma2), size=burn_in + n_arma)
    arma = signal.lfilter(np.r_[1.0, ma_full], np.r_[1.0, -ar_full], shocks)[burn_in:]

    if spec.consumed == 0:
        return MonthlySeries(start, arma)
    ctx = DiffContext(
        d=spec.d, D=spec.D, s=spec.s,
        retained_prefixes=tuple((0.0,) * lag for lag in [1] * spec.d + [spec.s] * spec.D),
        origin=start,
    )
    return integrate(MonthlySeries(start.shift(spec.consumed), arma), ctx)


# Candidate specifications compared for the monthly passenger series
CANDIDATE_MODELS: Dict[str, SarimaSpec] = {
    "Model0": SarimaSpec(0, 1, 2, 1, 1, 0, 12),
    "Model1": SarimaSpec(0, 1, 2, 4, 1, 0, 12),
    "Model2": SarimaSpec(0, 1, 1, 4, 1, 0, 12),
    "Model3": SarimaSpec(0, 1, 1, 4, 1, 0, 12, frozenset({"sar3"})),
    "OverSAR": SarimaSpec(0, 1, 1, 5, 1, 0, 12, frozenset({"sar3"})),
    "OverSMA": SarimaSpec(0, 1, 1, 4, 1, 1, 12, frozenset({"sar3"})),
    "Model4": SarimaSpec(0, 1, 1, 4, 1, 1, 12, frozenset({"sar2", "sar3"})),
    "Model5": SarimaSpec(0, 1, 1, 4, 1, 1, 12, frozenset({"sar1", "sar2", "sar3"})),
}
FINAL_MODEL = "Model3"
