"""The full richness-estimation procedure.

The algorithm, given a frequency table with enough contiguous structure:

1. Fit the model ladder to the ratio series under ``1/j`` weights.
2. If no model satisfies the selection criteria (numerical convergence,
   positive ratio prediction at zero, no denominator roots on ``[0, J]``),
   fall back to the transformed weighted linear ratio model (code 1).
3. Otherwise rebuild the weights from the fitted values of the smallest
   satisfying model and refit the ladder, re-anchoring the weights on each
   pass, until the predicted unobserved count stabilizes (code 2).  If the
   first adaptively weighted ladder satisfies nothing, keep the
   ``1/j``-weighted winner (code 3).

Model selection is by parsimony among satisfying models with a genuine
rational denominator.  The order-(1,0) straight line is fitted only to seed
the ladder: extrapolating a line is exactly what the transformed linear
fallback does, and counting it as a candidate would short-circuit the
rational family the ladder exists to fit.

The predicted unobserved count is ``f0 = f_1 / b0`` with ``b0`` the fitted
ratio at zero, the class total is ``c + f0``, and its standard error follows
from the delta method applied to ``b0`` with the usual surveyed-fraction
correction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .competitors import CompetitorEstimate, wlrm
from .errors import (
    CriteriaError,
    NoEstimateError,
    RatiorichError,
    SingularityError,
    StructureError,
    WeightError,
)
from .freqtab import (
    DEFAULT_MIN_RATIOS,
    FrequencyTable,
    RatioSeries,
    TableStats,
    check_structure,
    derived_stats,
    ratio_series,
)
from .model import (
    DistributionClass,
    RationalRatioModel,
    classify,
    denominator_roots_in,
    predict_b0,
)
from .solver import DEFAULT_LADDER, FitResult, sequential_fit_ladder
from .weights import WeightScheme, adaptive_weights, initial_weights

__all__ = [
    "ProcedureOptions",
    "CriteriaReport",
    "RichnessEstimate",
    "satisfies_criteria",
    "f0_from_fit",
    "variance_of_estimate",
    "select_model",
    "estimate_richness",
]

CODE_FALLBACK = 1
CODE_STABILIZED = 2
CODE_INITIAL_WEIGHTS = 3

FALLBACK_METHOD_LABEL = "tWLRM"


@dataclass(frozen=True)
class ProcedureOptions:
    """Tunable knobs of the estimation procedure; defaults match the tests."""

    min_ratios: int = DEFAULT_MIN_RATIOS
    ladder: tuple[tuple[int, int], ...] = DEFAULT_LADDER
    tridiagonal: bool = False
    stabilization_tol: float = 1e-3
    max_outer_iterations: int = 20
    katz_tol: float = 0.05


@dataclass(frozen=True)
class CriteriaReport:
    """Which of the three selection criteria a fit meets."""

    b0_positive: bool
    no_roots: bool
    converged: bool

    @property
    def satisfied(self) -> bool:
        return self.b0_positive and self.no_roots and self.converged


@dataclass(frozen=True, eq=False)
class RichnessEstimate:
    """Final output of the procedure.

    ``code`` records how the estimate was reached: 1 = fallback to the
    transformed linear ratio model, 2 = adaptive-weight iteration
    stabilized, 3 = reverted to the initial-weight model after the first
    adaptive pass satisfied nothing.  ``iterations_outer`` counts completed
    adaptive re-weighting passes (zero for codes 1 and 3).

    ``model``, ``classification`` and ``weights_final`` are None on the
    code-1 path, where no rational model was accepted.
    """

    c_hat: float
    f0_hat: float
    se: float
    code: int
    stats: TableStats
    iterations_outer: int
    model: RationalRatioModel | None = None
    classification: DistributionClass | None = None
    weights_final: WeightScheme | None = None
    ladder_fits: tuple[FitResult, ...] = ()
    series: RatioSeries | None = None
    fallback: CompetitorEstimate | None = None
    warnings: tuple[str, ...] = ()


def satisfies_criteria(fit: FitResult, num_ratios: int) -> CriteriaReport:
    """Check convergence, positive prediction at zero, and root-free denominator."""
    try:
        b0 = predict_b0(fit.model)
        b0_positive = bool(np.isfinite(b0) and b0 > 0.0)
    except SingularityError:
        b0_positive = False
    no_roots = len(denominator_roots_in(fit.model, num_ratios)) == 0
    return CriteriaReport(b0_positive=b0_positive, no_roots=no_roots, converged=fit.converged)


def f0_from_fit(fit: FitResult, f1: int) -> float:
    """Predicted unobserved-class count ``f_1 / b0``.

    Raises:
        CriteriaError: if the fitted ratio at zero is not positive.
    """
    b0 = predict_b0(fit.model)
    if not np.isfinite(b0) or b0 <= 0.0:
        raise CriteriaError(f"fitted ratio at zero must be positive, got {b0}")
    return f1 / b0


def _b0_gradient(model: RationalRatioModel) -> np.ndarray:
    # Analytic gradient of b0 = N(0)/D(0) in (beta_0..beta_p, alpha_1..alpha_q).
    v = np.array([(-model.jbar) ** r for r in range(max(model.p, model.q) + 1)])
    n0 = float(np.dot(np.asarray(model.beta), v[: model.p + 1]))
    d0 = 1.0 + float(np.dot(np.asarray(model.alpha), v[1 : model.q + 1])) if model.q else 1.0
    if abs(d0) < 1e-12:
        raise SingularityError("denominator vanishes at j=0")
    g_beta = v[: model.p + 1] / d0
    g_alpha = -n0 * v[1 : model.q + 1] / (d0 * d0)
    return np.concatenate([g_beta, g_alpha])


def variance_of_estimate(fit: FitResult, f1: int, n: int, f0_hat: float) -> tuple[float, float]:
    """Delta-method variances of the unobserved count and the class total.

    Returns ``(var_f0, var_total)``.  The variance of ``b0`` comes from the
    fit's parameter covariance through the analytic gradient of the
    ratio-at-zero formula.

    Raises:
        RatiorichError: if the parameter covariance is not positive
            semidefinite in the gradient direction (a solver defect).
    """
    b0 = predict_b0(fit.model)
    gradient = _b0_gradient(fit.model)
    var_b0 = float(gradient @ fit.param_cov @ gradient)
    scale = max(1.0, float(np.max(np.abs(fit.param_cov))))
    if var_b0 < -1e-8 * scale:
        raise RatiorichError("parameter covariance is not positive semidefinite")
    var_b0 = max(var_b0, 0.0)
    inv_b0_sq = b0**-2.0
    var_f0 = f1 * inv_b0_sq * (1.0 - f1 / n + f1 * inv_b0_sq * var_b0)
    var_total = n * f0_hat / (n + f0_hat) + var_f0
    return var_f0, var_total


def select_model(fits: list[FitResult], num_ratios: int) -> FitResult | None:
    """Most parsimonious fit satisfying the criteria: min ``p+q``, then min ``q``."""
    best: FitResult | None = None
    for fit in fits:
        if not satisfies_criteria(fit, num_ratios).satisfied:
            continue
        if best is None:
            best = fit
            continue
        key = (fit.model.p + fit.model.q, fit.model.q)
        best_key = (best.model.p + best.model.q, best.model.q)
        if key < best_key:
            best = fit
    return best


def _candidates(fits: list[FitResult]) -> list[FitResult]:
    # The (p, 0) line fits exist to seed the ladder, not to compete in it.
    return [fit for fit in fits if fit.model.q >= 1]


def _fallback_estimate(
    table: FrequencyTable,
    stats: TableStats,
    series: RatioSeries,
    fits: tuple[FitResult, ...],
    warnings: tuple[str, ...],
) -> RichnessEstimate:
    fallback = wlrm(table, transformed=True)
    if not fallback.estimable or fallback.c_hat is None:
        raise NoEstimateError(
            "no ladder model satisfies the criteria and the transformed "
            "linear fallback is inestimable"
        )
    return RichnessEstimate(
        c_hat=fallback.c_hat,
        f0_hat=fallback.c_hat - stats.c,
        se=fallback.se if fallback.se is not None else 0.0,
        code=CODE_FALLBACK,
        stats=stats,
        iterations_outer=0,
        ladder_fits=fits,
        series=series,
        fallback=fallback,
        warnings=warnings + ("no ladder model satisfied the criteria; fell back to the transformed linear ratio model",),
    )


def _finalize(
    winner: FitResult,
    weights: WeightScheme,
    fits: tuple[FitResult, ...],
    code: int,
    stats: TableStats,
    series: RatioSeries,
    f1: int,
    iterations_outer: int,
    katz_tol: float,
    warnings: tuple[str, ...],
) -> RichnessEstimate:
    f0 = f0_from_fit(winner, f1)
    _, var_total = variance_of_estimate(winner, f1, stats.n, f0)
    classification = classify(winner.model, stats.num_ratios, tol=katz_tol)
    return RichnessEstimate(
        c_hat=stats.c + f0,
        f0_hat=f0,
        se=float(np.sqrt(var_total)),
        code=code,
        stats=stats,
        iterations_outer=iterations_outer,
        model=winner.model,
        classification=classification,
        weights_final=weights,
        ladder_fits=fits,
        series=series,
        warnings=warnings,
    )


def estimate_richness(table: FrequencyTable, options: ProcedureOptions | None = None) -> RichnessEstimate:
    """Estimate the total number of classes from a frequency-count table.

    Raises:
        StructureError: if the table fails the structure check.
        NoEstimateError: if neither the ladder nor the fallback can produce
            an estimate.
    """
    opts = options or ProcedureOptions()
    report = check_structure(table, opts.min_ratios)
    if not report.ok:
        raise StructureError(f"insufficient structure: {report.reason}")
    stats = derived_stats(table)
    series = ratio_series(table)
    num_ratios = stats.num_ratios
    f1 = table.count(1)

    base_weights = initial_weights(num_ratios)
    base_fits = tuple(sequential_fit_ladder(series, base_weights, opts.ladder))
    base_winner = select_model(_candidates(list(base_fits)), num_ratios)
    warnings: tuple[str, ...] = ()

    if base_winner is None:
        return _fallback_estimate(table, stats, series, base_fits, warnings)

    f0_previous = f0_from_fit(base_winner, f1)
    anchor = base_winner
    selected = base_winner
    selected_weights: WeightScheme = base_weights
    selected_fits = base_fits
    completed_passes = 0
    stabilized = False

    for outer in range(1, opts.max_outer_iterations + 1):
        try:
            weights = adaptive_weights(anchor.model, f1, num_ratios, opts.tridiagonal)
        except (WeightError, SingularityError) as exc:
            if outer == 1:
                warnings += (f"adaptive weights unavailable ({exc}); keeping initial-weight model",)
                return _finalize(
                    base_winner, base_weights, base_fits, CODE_INITIAL_WEIGHTS,
                    stats, series, f1, 0, opts.katz_tol, warnings,
                )
            warnings += (f"adaptive weights unavailable on pass {outer} ({exc}); keeping previous pass",)
            break
        fits = tuple(sequential_fit_ladder(series, weights, opts.ladder))
        winner = select_model(_candidates(list(fits)), num_ratios)
        if winner is None:
            if outer == 1:
                warnings += ("first adaptive re-weighting satisfied no model; keeping initial-weight model",)
                return _finalize(
                    base_winner, base_weights, base_fits, CODE_INITIAL_WEIGHTS,
                    stats, series, f1, 0, opts.katz_tol, warnings,
                )
            warnings += (f"re-weighting pass {outer} satisfied no model; keeping previous pass",)
            break
        f0_new = f0_from_fit(winner, f1)
        selected, selected_weights, selected_fits = winner, weights, fits
        anchor = winner
        completed_passes = outer
        relative_change = abs(f0_new - f0_previous) / f0_previous
        f0_previous = f0_new
        if relative_change < opts.stabilization_tol:
            stabilized = True
            break
    if not stabilized and completed_passes >= opts.max_outer_iterations:
        warnings += ("unobserved-count iteration hit the pass cap before stabilizing",)

    return _finalize(
        selected, selected_weights, selected_fits, CODE_STABILIZED,
        stats, series, f1, completed_passes, opts.katz_tol, warnings,
    )
