"""
Maximum-likelihood estimation for sparse SARIMA models.

Pipeline:
    1. Difference the training window (no mean term: d + D >= 1 removes it).
    2. Minimise the mean negative concentrated log-likelihood over the free
       coefficients, from an all-zero start and a Hannan-Rissanen start.
    3. If no start converges, jitter the best iterate and retry; finally
       polish with Nelder-Mead.
    4. Standard errors from a central-difference Hessian in coefficient space.

Factors without masked slots are optimised through the partial-autocorrelation
(Monahan) reparameterisation, so every iterate is stationary/invertible.
Factors with pinned slots cannot be expressed that way; they are optimised on
the raw coefficients and out-of-region iterates receive a large penalty.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy import optimize

from core_series import MonthlySeries, difference_chain
from errors import FitError, LikelihoodError, SeriesLengthError
from sarima import (
    SLOT_KINDS,
    CoefficientSet,
    FittedModel,
    SarimaSpec,
    assemble_model,
    concentrated_log_likelihood,
    expand_polynomials,
    is_invertible,
    is_stationary,
    slot_name,
)
from spec_notation import render_spec

logger = logging.getLogger(__name__)

PENALTY = 1e10
GRADIENT_TOLERANCE = 1e-3     # max-norm of the per-observation score accepted as converged
FD_STEP = 1e-5
HESSIAN_STEP = 1e-4
PACF_BOUND = 0.9999


@dataclass
class FitOptions:
    restarts: int = 3
    seed: int = 0
    max_iter: int = 500
    jitter: float = 0.1


def pacf_to_coefficients(u: np.ndarray) -> np.ndarray:
    """Map unconstrained values to stationary AR coefficients (1 - sum phi_i B^i)."""
    partial = np.clip(np.tanh(np.asarray(u, dtype=float)), -PACF_BOUND, PACF_BOUND)
    phi = np.zeros(0)
    for r_k in partial:
        phi = np.concatenate([phi - r_k * phi[::-1], [r_k]])
    return phi


def coefficients_to_pacf(phi: np.ndarray) -> np.ndarray:
    """Inverse of ``pacf_to_coefficients`` for a stationary coefficient vector."""
    phi = np.asarray(phi, dtype=float).copy()
    partial = np.zeros(phi.size)
    for k in range(phi.size, 0, -1):
        r_k = np.clip(phi[k - 1], -PACF_BOUND, PACF_BOUND)
        partial[k - 1] = r_k
        head = phi[:k - 1]
        phi = (head + r_k * head[::-1]) / (1.0 - r_k * r_k)
    return np.arctanh(partial)


class ParameterMap:
    """Translate between the optimiser vector and a CoefficientSet."""

    def __init__(self, spec: SarimaSpec):
        self.spec = spec
        self.blocks: List[Tuple[str, bool, List[int]]] = []
        for kind in SLOT_KINDS:
            order = spec.order_of(kind)
            if order == 0:
                continue
            free_idx = [i for i in range(1, order + 1) if slot_name(kind, i) not in spec.mask]
            if not free_idx:
                continue
            transformed = len(free_idx) == order
            self.blocks.append((kind, transformed, free_idx))
        self.size = sum(len(idx) for _, _, idx in self.blocks)

    @property
    def has_raw_blocks(self) -> bool:
        return any(not transformed for _, transformed, _ in self.blocks)

    def to_coefficients(self, x: np.ndarray) -> CoefficientSet:
        factors = {kind: [0.0] * self.spec.order_of(kind) for kind in SLOT_KINDS}
        pos = 0
        for kind, transformed, free_idx in self.blocks:
            chunk = np.asarray(x[pos:pos + len(free_idx)], dtype=float)
            pos += len(free_idx)
            if transformed:
                values = pacf_to_coefficients(chunk)
                if kind in ("ma", "sma"):
                    values = -values
            else:
                values = chunk
            for i, v in zip(free_idx, values):
                factors[kind][i - 1] = float(v)
        return CoefficientSet(**factors)

    def from_coefficients(self, coef: CoefficientSet) -> np.ndarray:
        parts = []
        for kind, transformed, free_idx in self.blocks:
            values = np.array(getattr(coef, kind), dtype=float)
            if transformed:
                if kind in ("ma", "sma"):
                    values = -values
                parts.append(coefficients_to_pacf(values))
            else:
                parts.append(values[[i - 1 for i in free_idx]])
        return np.concatenate(parts) if parts else np.zeros(0)

    def in_region(self, coef: CoefficientSet) -> bool:
        """Stationary and invertible, checked per factor."""
        spec = self.spec
        return (
            is_stationary(np.array(coef.ar))
            and is_stationary(_seasonal_lags(coef.sar, spec.s))
            and is_invertible(np.array(coef.ma))
            and is_invertible(_seasonal_lags(coef.sma, spec.s))
        )


def _seasonal_lags(values, s: int) -> np.ndarray:
    out = np.zeros(len(values) * s)
    for j, v in enumerate(values, start=1):
        out[j * s - 1] = v
    return out


def _shrink_into_region(values: np.ndarray, stable: Callable[[np.ndarray], bool]) -> np.ndarray:
    for _ in range(20):
        if stable(values):
            return values
        values = values * 0.5
    return np.zeros_like(values)


def hannan_rissanen(spec: SarimaSpec, y: np.ndarray) -> CoefficientSet:
    """
    Two-stage regression start.

    A long autoregression supplies innovation estimates; the free AR slots are
    then regressed on their lagged values and the free MA slots on lagged
    innovations (seasonal factors treated additively).
    """
    n = y.size
    free = spec.free_slots()
    if not free:
        return CoefficientSet.zeros(spec)
    long_order = min(max(10, 2 * (spec.p + spec.s * spec.P + spec.q + spec.s * spec.Q)), n // 4)
    has_ma = any(slot.startswith(("ma", "sma")) for slot in free)

    innovations = np.zeros(n)
    if has_ma:
        if long_order < 1:
            return CoefficientSet.zeros(spec)
        lagged = np.column_stack([y[long_order - j:n - j] for j in range(1, long_order + 1)])
        beta, _, _, _ = np.linalg.lstsq(lagged, y[long_order:], rcond=None)
        innovations[long_order:] = y[long_order:] - lagged @ beta

    lags = [spec.lag_of(slot) for slot in free]
    first = max(lags) + (long_order if has_ma else 0)
    if n - first <= len(free) + 1:
        logger.debug("Hannan-Rissanen start skipped: too few observations")
        return CoefficientSet.zeros(spec)
    columns = []
    for slot, lag in zip(free, lags):
        source = innovations if slot.startswith(("ma", "sma")) else y
        columns.append(source[first - lag:n - lag])
    design = np.column_stack(columns)
    beta, _, _, _ = np.linalg.lstsq(design, y[first:], rcond=None)
    values = dict(zip(free, beta))

    factors = {}
    for kind in SLOT_KINDS:
        order = spec.order_of(kind)
        vec = np.array([values.get(slot_name(kind, i), 0.0) for i in range(1, order + 1)])
        period = spec.s if kind in ("sar", "sma") else 1

        def stable(v: np.ndarray, kind: str = kind, period: int = period) -> bool:
            lags = _seasonal_lags(v, period)
            return is_stationary(lags) if kind in ("ar", "sar") else is_invertible(lags)

        factors[kind] = _shrink_into_region(vec, stable)
    return CoefficientSet(**factors)


def central_gradient(f: Callable[[np.ndarray], float], x: np.ndarray, step: float = FD_STEP) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    grad = np.zeros(x.size)
    for i in range(x.size):
        h = step * max(1.0, abs(x[i]))
        e = np.zeros(x.size)
        e[i] = h
        grad[i] = (f(x + e) - f(x - e)) / (2 * h)
    return grad


def central_hessian(f: Callable[[np.ndarray], float], x: np.ndarray, rel_step: float = HESSIAN_STEP) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    k = x.size
    steps = rel_step * np.maximum(1.0, np.abs(x))
    hessian = np.zeros((k, k))
    f0 = f(x)
    for i in range(k):
        ei = np.zeros(k)
        ei[i] = steps[i]
        hessian[i, i] = (f(x + ei) - 2 * f0 + f(x - ei)) / steps[i] ** 2
        for j in range(i + 1, k):
            ej = np.zeros(k)
            ej[j] = steps[j]
            value = (f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej)) / (4 * steps[i] * steps[j])
            hessian[i, j] = hessian[j, i] = value
    return hessian


class LikelihoodObjective:
    """Mean negative concentrated log-likelihood over the optimiser vector."""

    def __init__(self, spec: SarimaSpec, y: np.ndarray):
        self.spec = spec
        self.y = y
        self.n = y.size
        self.pmap = ParameterMap(spec)

    def loglik(self, coef: CoefficientSet) -> float:
        ar_full, ma_full = expand_polynomials(self.spec, coef)
        loglik, _, _ = concentrated_log_likelihood(ar_full, ma_full, self.y)
        return loglik

    def __call__(self, x: np.ndarray) -> float:
        if not np.all(np.isfinite(x)):
            return PENALTY
        coef = self.pmap.to_coefficients(x)
        if self.pmap.has_raw_blocks and not self.pmap.in_region(coef):
            return PENALTY
        try:
            value = -self.loglik(coef) / self.n
        except (LikelihoodError, np.linalg.LinAlgError, ValueError):
            return PENALTY
        return value if np.isfinite(value) else PENALTY

    def gradient(self, x: np.ndarray) -> np.ndarray:
        return central_gradient(self, x)

    def coefficient_objective(self, free_values: np.ndarray) -> float:
        """Negative log-likelihood as a function of the free coefficients themselves."""
        coef = CoefficientSet.from_free(self.spec, free_values)
        try:
            return -self.loglik(coef)
        except (LikelihoodError, np.linalg.LinAlgError, ValueError):
            return np.nan


@dataclass
class _Attempt:
    name: str
    x0: np.ndarray
    x: np.ndarray
    value: float
    initial_value: float
    converged: bool


def _run_bfgs(objective: LikelihoodObjective, name: str, x0: np.ndarray, options: FitOptions) -> _Attempt:
    initial = objective(x0)
    result = optimize.minimize(
        objective, x0, jac=objective.gradient, method="BFGS",
        options={"gtol": 1e-6, "maxiter": options.max_iter},
    )
    grad_norm = float(np.max(np.abs(objective.gradient(result.x)))) if result.x.size else 0.0
    converged = result.fun < PENALTY and (result.success or grad_norm < GRADIENT_TOLERANCE)
    logger.debug(
        f"{name} start: f0={initial:.6f} -> f={result.fun:.6f}, |g|={grad_norm:.2e}, "
        f"iterations={result.nit}, status={result.status}"
    )
    return _Attempt(name, x0, result.x, float(result.fun), initial, converged)


def _polish(objective: LikelihoodObjective, attempt: _Attempt, options: FitOptions) -> _Attempt:
    result = optimize.minimize(
        objective, attempt.x, method="Nelder-Mead",
        options={"xatol": 1e-8, "fatol": 1e-12, "maxiter": options.max_iter * 8},
    )
    x, value = (result.x, float(result.fun)) if result.fun <= attempt.value else (attempt.x, attempt.value)
    grad_norm = float(np.max(np.abs(objective.gradient(x)))) if x.size else 0.0
    converged = value < PENALTY and grad_norm < GRADIENT_TOLERANCE
    logger.debug(f"Nelder-Mead polish: f={value:.6f}, |g|={grad_norm:.2e}")
    return _Attempt(f"{attempt.name}+polish", attempt.x0, x, value, attempt.initial_value, converged)


def standard_errors(objective: LikelihoodObjective, coef: CoefficientSet) -> Optional[np.ndarray]:
    """Square roots of the inverse observed-information diagonal, or None if not positive definite."""
    free = coef.free_vector(objective.spec)
    if free.size == 0:
        return np.zeros(0)
    hessian = central_hessian(objective.coefficient_objective, free)
    if not np.all(np.isfinite(hessian)):
        return None
    try:
        np.linalg.cholesky(hessian)
    except np.linalg.LinAlgError:
        return None
    covariance = np.linalg.inv(hessian)
    diag = np.diag(covariance)
    if np.any(diag <= 0):
        return None
    return np.sqrt(diag)


def fit(
    spec: SarimaSpec,
    train: MonthlySeries,
    label: str = "",
    options: Optional[FitOptions] = None,
) -> FittedModel:
    """Exact maximum-likelihood fit of ``spec`` to ``train``."""
    options = options or FitOptions()
    if len(train) <= spec.consumed:
        raise SeriesLengthError(
            f"train series of length {len(train)} is consumed by differencing ({spec.consumed})"
        )
    diffed, _ = difference_chain(train, spec.d, spec.D, spec.s)
    y = diffed.values
    if y.size <= spec.n_free + 5:
        raise SeriesLengthError(
            f"{y.size} differenced observations are too few for {spec.n_free} free coefficients"
        )

    objective = LikelihoodObjective(spec, y)
    pmap = objective.pmap
    name = label or render_spec(spec)
    logger.info(f"Fitting {name}: {spec.n_free} free coefficients, n_effective={y.size}")
    if pmap.size == 0:
        return assemble_model(spec, CoefficientSet.zeros(spec), train, se={}, label=label)

    starts = [("zero", np.zeros(pmap.size))]
    try:
        starts.append(("hannan-rissanen", pmap.from_coefficients(hannan_rissanen(spec, y))))
    except (np.linalg.LinAlgError, ValueError) as e:
        logger.warning(f"{name}: Hannan-Rissanen start unavailable ({e})")

    attempts = [_run_bfgs(objective, start_name, x0, options) for start_name, x0 in starts]
    best = min(attempts, key=lambda a: a.value)

    if not any(a.converged for a in attempts):
        rng = np.random.default_rng(options.seed)
        for i in range(options.restarts):
            x0 = best.x + rng.uniform(-options.jitter, options.jitter, size=best.x.size)
            logger.warning(f"{name}: no start converged, jitter restart {i + 1}/{options.restarts}")
            attempt = _run_bfgs(objective, f"jitter-{i + 1}", x0, options)
            attempts.append(attempt)
            if attempt.value < best.value:
                best = attempt
            if attempt.converged:
                break

    converged_attempts = [a for a in attempts if a.converged]
    if converged_attempts:
        best = min(converged_attempts, key=lambda a: a.value)
    else:
        logger.warning(f"{name}: BFGS did not converge, polishing with Nelder-Mead")
        best = _polish(objective, best, options)

    if not best.value < PENALTY:
        raise FitError(f"likelihood of {name} could not be evaluated at any start")
    coef = pmap.to_coefficients(best.x)
    if not best.converged:
        raise FitError(
            f"optimizer did not converge for {name} after {len(attempts)} attempts",
            best_params=list(coef.free_vector(spec)),
            best_loglik=-best.value * y.size,
        )

    se = standard_errors(objective, coef)
    if se is None:
        logger.warning(f"{name}: Hessian not positive definite; standard errors unavailable")
        se_map = None
    else:
        se_map = dict(zip(spec.free_slots(), se))

    initial_loglik = None
    if best.initial_value < PENALTY:
        initial_loglik = objective.loglik(pmap.to_coefficients(best.x0))
    model = assemble_model(
        spec, coef, train, se=se_map, label=label, converged=True, initial_loglik=initial_loglik,
    )
    logger.info(f"Fitted {name}: loglik={model.loglik:.4f}, aic={model.aic:.4f}, bic={model.bic:.4f}")
    return model


def objective_gradient(model: FittedModel) -> np.ndarray:
    """Per-observation score of the concentrated likelihood over the free coefficients."""
    objective = LikelihoodObjective(model.spec, model.diffed.values)
    free = model.coef.free_vector(model.spec)
    return central_gradient(lambda v: objective.coefficient_objective(v) / objective.n, free)


def fit_candidates(
    train: MonthlySeries,
    candidates: Dict[str, SarimaSpec],
    options: Optional[FitOptions] = None,
) -> Dict[str, FittedModel]:
    """Sequential fit of labelled specs (see ``candidate_sweep`` for the concurrent path)."""
    return {label: fit(spec, train, label=label, options=options) for label, spec in candidates.items()}
