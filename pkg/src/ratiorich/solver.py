"""Weighted nonlinear least squares for rational ratio models.

The fitting engine is a self-contained damped Gauss-Newton (Levenberg-
Marquardt) iteration with the analytic Jacobian of the rational model: no
external optimizer, so results are deterministic and portable.  The weight
matrix is held fixed within a fit; re-weighting happens between fits in the
outer estimation procedure.

Steps that would move the denominator through zero anywhere on ``[0, J]``
are rejected by raising the damping, never by aborting the fit.  Weights are
normalized to unit mean diagonal internally, which makes estimates and
reported parameter covariances invariant to rescaling of any weight scheme.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .freqtab import RatioSeries
from .model import RationalRatioModel
from .weights import WeightScheme

__all__ = [
    "FitResult",
    "fit_ols_base",
    "fit_wnls",
    "sequential_fit_ladder",
    "DEFAULT_LADDER",
]

DEFAULT_LADDER = ((1, 0), (1, 1), (2, 1), (2, 2), (3, 2), (3, 3), (4, 3), (4, 4))

MAX_ITERATIONS = 200
GRADIENT_TOL = 1e-8
RELATIVE_DECREASE_TOL = 1e-10
INITIAL_DAMPING = 1e-3
DAMPING_FACTOR = 10.0
MAX_DAMPING = 1e14


@dataclass(frozen=True, eq=False)
class FitResult:
    """One fitted model with its convergence state and uncertainty."""

    model: RationalRatioModel
    converged: bool
    objective: float
    param_cov: np.ndarray
    residuals: np.ndarray
    weights_used: WeightScheme
    iterations: int
    message: str = ""
    objective_path: tuple[float, ...] = ()

    @property
    def order(self) -> tuple[int, int]:
        return (self.model.p, self.model.q)


def _weight_factor(weights: WeightScheme, num_points: int) -> np.ndarray | None:
    """Lower-triangular G with G G^T equal to the normalized weight matrix.

    Returns None when the implied matrix is not positive definite (possible
    for tridiagonal schemes), in which case the fit is reported nonconverged.
    """
    if len(weights) != num_points:
        raise DomainError(
            f"weight scheme has {len(weights)} entries for {num_points} ratio points"
        )
    try:
        omega = weights.matrix()
    except np.linalg.LinAlgError:
        return None
    omega = omega / np.mean(np.diag(omega))
    try:
        return np.linalg.cholesky(omega)
    except np.linalg.LinAlgError:
        return None


def _eval_num_den(beta: np.ndarray, alpha: np.ndarray, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    num = np.polynomial.polynomial.polyval(z, beta)
    den = np.polynomial.polynomial.polyval(z, np.concatenate(([1.0], alpha)))
    return num, den


def _model_jacobian(beta: np.ndarray, alpha: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Analytic Jacobian of the predicted ratios wrt (beta_0..beta_p, alpha_1..alpha_q)."""
    num, den = _eval_num_den(beta, alpha, z)
    pred = num / den
    cols = [z**r / den for r in range(len(beta))]
    cols += [-pred * z**r / den for r in range(1, len(alpha) + 1)]
    return np.column_stack(cols)


def _split_params(theta: np.ndarray, p: int, q: int) -> tuple[np.ndarray, np.ndarray]:
    return theta[: p + 1], theta[p + 1 : p + 1 + q]


def _feasible(alpha: np.ndarray, jbar: float, domain_end: float) -> bool:
    # The denominator is 1 at the centering point, so requiring positivity on
    # a fine grid over [0, J] is equivalent to requiring no roots there.
    grid = np.linspace(0.0, domain_end, int(8 * domain_end) + 2) - jbar
    den = np.polynomial.polynomial.polyval(grid, np.concatenate(([1.0], alpha)))
    return bool(np.all(den > 0.0))


def _covariance(gram: np.ndarray, s2: float) -> np.ndarray:
    try:
        cov = s2 * np.linalg.inv(gram)
    except np.linalg.LinAlgError:
        cov = s2 * np.linalg.pinv(gram)
    if not np.all(np.isfinite(cov)):
        cov = s2 * np.linalg.pinv(gram)
    return (cov + cov.T) / 2.0


def fit_ols_base(series: RatioSeries, weights: WeightScheme) -> FitResult:
    """Closed-form weighted linear fit of the ratios on the centered index.

    This is the order-(1,0) base of the model ladder; being linear in its two
    parameters it needs no iteration.

    Raises:
        DomainError: on a degenerate design (fewer than two distinct indices).
    """
    x = np.asarray(series.indices, dtype=float)
    y = np.asarray(series.values, dtype=float)
    if len(x) < 2 or np.allclose(x, x[0]):
        raise DomainError("degenerate design: need at least two distinct indices")
    z = x - series.jbar
    factor = _weight_factor(weights, len(x))
    if factor is None:
        raise DomainError("weight scheme is not positive definite")
    X = np.column_stack([np.ones_like(z), z])
    Xw = factor.T @ X
    yw = factor.T @ y
    gram = Xw.T @ Xw
    theta = np.linalg.solve(gram, Xw.T @ yw)
    residuals = y - X @ theta
    rw = factor.T @ residuals
    objective = float(rw @ rw)
    dof = len(x) - 2
    s2 = objective / dof if dof > 0 else 0.0
    model = RationalRatioModel(beta=(float(theta[0]), float(theta[1])), alpha=(), jbar=series.jbar)
    return FitResult(
        model=model,
        converged=True,
        objective=objective,
        param_cov=_covariance(gram, s2),
        residuals=residuals,
        weights_used=weights,
        iterations=0,
        message="closed-form weighted least squares",
        objective_path=(objective,),
    )


def fit_wnls(
    series: RatioSeries,
    weights: WeightScheme,
    p: int,
    q: int,
    start: tuple[float, ...] | np.ndarray,
) -> FitResult:
    """Levenberg-Marquardt fit of an order-(p,q) rational ratio model.

    ``start`` supplies the full parameter vector (beta then alpha).  The fit
    converges when the relative objective decrease of an accepted step falls
    below 1e-10 or the gradient norm below 1e-8, within 200 iterations.

    Raises:
        DomainError: if the series is too short (requires ``J >= p + q + 2``)
            or the start vector has the wrong length.
    """
    num_points = len(series)
    n_par = p + q + 1
    if num_points < n_par + 1:
        raise DomainError(
            f"order ({p},{q}) needs at least {n_par + 1} ratio points, have {num_points}"
        )
    theta = np.asarray(start, dtype=float).copy()
    if theta.shape != (n_par,):
        raise DomainError(f"start vector must have length {n_par}")

    x = np.asarray(series.indices, dtype=float)
    y = np.asarray(series.values, dtype=float)
    z = x - series.jbar
    domain_end = float(num_points)

    factor = _weight_factor(weights, num_points)

    def finish(converged, objective, cov, residuals, iterations, message, path):
        beta, alpha = _split_params(theta, p, q)
        model = RationalRatioModel(
            beta=tuple(float(b) for b in beta),
            alpha=tuple(float(a) for a in alpha),
            jbar=series.jbar,
        )
        return FitResult(
            model=model,
            converged=converged,
            objective=objective,
            param_cov=cov,
            residuals=residuals,
            weights_used=weights,
            iterations=iterations,
            message=message,
            objective_path=tuple(path),
        )

    zero_cov = np.zeros((n_par, n_par))
    if factor is None:
        return finish(False, float("inf"), zero_cov, y * np.nan, 0,
                      "weight matrix not positive definite", ())

    def weighted_rss(residuals):
        rw = factor.T @ residuals
        return float(rw @ rw)

    beta, alpha = _split_params(theta, p, q)
    if not _feasible(alpha, series.jbar, domain_end):
        return finish(False, float("inf"), zero_cov, y * np.nan, 0,
                      "starting point has a denominator root in [0, J]", ())

    num, den = _eval_num_den(beta, alpha, z)
    residuals = y - num / den
    objective = weighted_rss(residuals)
    path = [objective]

    damping = None
    converged = False
    message = "iteration cap reached"
    iterations = 0

    for iterations in range(1, MAX_ITERATIONS + 1):
        beta, alpha = _split_params(theta, p, q)
        jac = _model_jacobian(beta, alpha, z)
        jw = factor.T @ jac
        rw = factor.T @ residuals
        gradient = jw.T @ rw
        if float(np.max(np.abs(gradient))) < GRADIENT_TOL:
            converged = True
            message = "gradient norm below tolerance"
            break
        hessian = jw.T @ jw
        diag = np.diag(hessian).copy()
        floor = 1e-12 * max(float(diag.max()), 1.0)
        diag = np.maximum(diag, floor)
        if damping is None:
            damping = INITIAL_DAMPING

        accepted = False
        while damping <= MAX_DAMPING:
            try:
                step = np.linalg.solve(hessian + damping * np.diag(diag), gradient)
            except np.linalg.LinAlgError:
                damping *= DAMPING_FACTOR
                continue
            candidate = theta + step
            c_beta, c_alpha = _split_params(candidate, p, q)
            if _feasible(c_alpha, series.jbar, domain_end):
                num, den = _eval_num_den(c_beta, c_alpha, z)
                cand_residuals = y - num / den
                cand_objective = weighted_rss(cand_residuals)
                if np.isfinite(cand_objective) and cand_objective < objective:
                    relative_decrease = (objective - cand_objective) / max(objective, 1e-300)
                    theta = candidate
                    residuals = cand_residuals
                    objective = cand_objective
                    path.append(objective)
                    damping = max(damping / DAMPING_FACTOR, 1e-12)
                    accepted = True
                    if relative_decrease < RELATIVE_DECREASE_TOL:
                        converged = True
                        message = "relative objective decrease below tolerance"
                    break
            damping *= DAMPING_FACTOR
        if not accepted:
            message = "damping exhausted without an acceptable step"
            break
        if converged:
            break

    beta, alpha = _split_params(theta, p, q)
    jac = _model_jacobian(beta, alpha, z)
    jw = factor.T @ jac
    gram = jw.T @ jw
    s2 = objective / (num_points - n_par)
    return finish(converged, objective, _covariance(gram, s2), residuals,
                  iterations, message, path)


def _pad(values: tuple[float, ...], length: int) -> tuple[float, ...]:
    if len(values) >= length:
        return values[:length]
    return values + (0.0,) * (length - len(values))


def sequential_fit_ladder(
    series: RatioSeries,
    weights: WeightScheme,
    ladder: tuple[tuple[int, int], ...] = DEFAULT_LADDER,
) -> list[FitResult]:
    """Fit the model ladder with nested starting values.

    Orders needing more points than available are skipped entirely.  Each
    model starts from the most recent converged model's estimates, padded
    with zeros for coefficients it introduces; nonconvergent models are
    recorded in the result but never used as seeds.
    """
    num_points = len(series)
    fits: list[FitResult] = []
    seed: tuple[tuple[float, ...], tuple[float, ...]] | None = None
    for p, q in ladder:
        if num_points < p + q + 2:
            continue
        if (p, q) == (1, 0):
            fit = fit_ols_base(series, weights)
        else:
            if seed is None:
                y = np.asarray(series.values, dtype=float)
                start_beta: tuple[float, ...] = (float(np.mean(y)),) + (0.0,) * p
                start_alpha: tuple[float, ...] = (0.0,) * q
            else:
                start_beta = _pad(seed[0], p + 1)
                start_alpha = _pad(seed[1], q)
            fit = fit_wnls(series, weights, p, q, start_beta + start_alpha)
        fits.append(fit)
        if fit.converged:
            seed = (fit.model.beta, fit.model.alpha)
    return fits
