"""Competing richness estimators used for comparison and as the fallback.

Three classical estimators accompany the ratio-regression procedure: the
Chao lower bound built from singletons and doubletons, the Chao-Bunge
duplicate-fraction estimator, and the weighted linear ratio models that
regress ``(j+1) f_{j+1} / f_j`` (or its logarithm) on ``j``.

An estimator whose defining denominator is non-positive has no estimate;
that outcome is a value, not an exception, so comparison tables can render
it as ``*``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, StructureError
from .freqtab import FrequencyTable, derived_stats, ratio_series

__all__ = [
    "CompetitorEstimate",
    "chao_lower_bound",
    "chao_bunge",
    "wlrm",
]


@dataclass(frozen=True)
class CompetitorEstimate:
    """Point estimate of the class total from one competitor method.

    ``c_hat`` and ``se`` are None when the method is inestimable on the
    table.  For the linear ratio models, ``intercept`` and ``slope`` expose
    the fitted line so its ratio curve can be plotted.
    """

    method: str
    c_hat: float | None
    se: float | None
    tau_used: int
    estimable: bool
    note: str | None = None
    intercept: float | None = None
    slope: float | None = None


def chao_lower_bound(table: FrequencyTable) -> CompetitorEstimate:
    """Chao's lower bound: ``c + f_1^2 / (2 f_2)``.

    Inestimable when doubletons are absent while singletons are present.
    """
    c = sum(table.counts)
    f1 = table.count(1)
    f2 = table.count(2)
    if f1 == 0:
        return CompetitorEstimate(
            method="CLB", c_hat=float(c), se=0.0, tau_used=2, estimable=True,
            note="no singletons: no unseen mass indicated",
        )
    if f2 == 0:
        return CompetitorEstimate(
            method="CLB", c_hat=None, se=None, tau_used=2, estimable=False,
            note="no doubletons",
        )
    ratio = f1 / f2
    variance = f2 * (ratio**4 / 4.0 + ratio**3 + ratio**2 / 2.0)
    return CompetitorEstimate(
        method="CLB",
        c_hat=c + f1 * f1 / (2.0 * f2),
        se=math.sqrt(variance),
        tau_used=2,
        estimable=True,
    )


def chao_bunge(table: FrequencyTable, tau: int = 10) -> CompetitorEstimate:
    """Chao-Bunge estimator with frequency cutoff ``tau``.

    With sums restricted to ``j <= tau``, the estimated duplicate fraction is
    ``theta = 1 - f_1 * sum(j^2 f_j) / (sum(j f_j))^2`` and the estimate is
    ``sum_{2<=j<=tau} f_j / theta`` plus the classes beyond the cutoff.
    Inestimable when ``theta <= 0``.  The standard error is a delta-method
    reconstruction treating the counts as independent Poisson draws.
    """
    if tau < 2:
        raise DomainError("tau must be at least 2")
    inside = [(j, f) for j, f in zip(table.indices, table.counts) if j <= tau]
    beyond = sum(f for j, f in zip(table.indices, table.counts) if j > tau)
    f1 = table.count(1)
    s1 = sum(j * f for j, f in inside)
    s2 = sum(j * j * f for j, f in inside)
    if s1 == 0:
        return CompetitorEstimate(
            method="Chao-Bunge", c_hat=None, se=None, tau_used=tau, estimable=False,
            note="no counts at or below the cutoff",
        )
    theta = 1.0 - f1 * s2 / s1**2
    if theta <= 0.0:
        return CompetitorEstimate(
            method="Chao-Bunge", c_hat=None, se=None, tau_used=tau, estimable=False,
            note="duplicate-fraction estimate non-positive",
        )
    duplicates = sum(f for j, f in inside if j >= 2)
    c_hat = beyond + duplicates / theta

    variance = 0.0
    for j, f in zip(table.indices, table.counts):
        if j > tau:
            gradient = 1.0
        else:
            d_dup = 1.0 if j >= 2 else 0.0
            d_theta = -(
                (s2 / s1**2 if j == 1 else 0.0)
                + f1 * (j * j * s1 - 2.0 * j * s2) / s1**3
            )
            gradient = d_dup / theta - duplicates * d_theta / theta**2
        variance += gradient * gradient * f
    return CompetitorEstimate(
        method="Chao-Bunge",
        c_hat=c_hat,
        se=math.sqrt(variance),
        tau_used=tau,
        estimable=True,
        note="standard error reconstructed via a Poisson delta method",
    )


def wlrm(table: FrequencyTable, transformed: bool, uniform_weights: bool = False) -> CompetitorEstimate:
    """Weighted linear ratio model: regress ``(j+1) f_{j+1} / f_j`` on ``j``.

    The intercept estimates the ratio of singletons to unobserved classes
    (after exponentiation in the transformed variant), giving
    ``f0 = f_1 / b0``.  Default weights are reciprocal delta-method variances
    of the response; pass ``uniform_weights=True`` for an unweighted fit.
    The untransformed variant is inestimable when its intercept is not
    positive.

    Raises:
        StructureError: with fewer than two usable ratio points.
    """
    method = "tWLRM" if transformed else "uWLRM"
    stats = derived_stats(table)
    series = ratio_series(table)
    if len(series) < 2:
        raise StructureError("linear ratio regression needs at least two ratio points")
    entries = table.entries()
    j = np.asarray(series.indices, dtype=float)
    f_lo = np.array([entries[i] for i in series.indices], dtype=float)
    f_hi = np.array([entries[i + 1] for i in series.indices], dtype=float)
    y = (j + 1.0) * f_hi / f_lo
    if transformed:
        response = np.log(y)
        var_response = 1.0 / f_hi + 1.0 / f_lo
    else:
        response = y
        var_response = (j + 1.0) ** 2 * (f_hi / f_lo**2) * (1.0 + f_hi / f_lo)
    w = np.ones_like(response) if uniform_weights else 1.0 / var_response
    w = w / np.mean(w)

    X = np.column_stack([np.ones_like(j), j])
    gram = X.T @ (w[:, None] * X)
    theta = np.linalg.solve(gram, X.T @ (w * response))
    residuals = response - X @ theta
    dof = len(j) - 2
    s2 = float(w @ residuals**2) / dof if dof > 0 else 0.0
    cov = s2 * np.linalg.inv(gram)
    intercept, slope = float(theta[0]), float(theta[1])
    var_intercept = float(cov[0, 0])

    if transformed:
        b0 = math.exp(intercept)
        var_b0 = b0 * b0 * var_intercept
    else:
        if intercept <= 0.0:
            return CompetitorEstimate(
                method=method, c_hat=None, se=None, tau_used=stats.tau_max,
                estimable=False, note="intercept non-positive",
                intercept=intercept, slope=slope,
            )
        b0 = intercept
        var_b0 = var_intercept

    f1 = table.count(1)
    f0 = f1 / b0
    inv_b0_sq = b0**-2.0
    var_f0 = f1 * inv_b0_sq * (1.0 - f1 / stats.n + f1 * inv_b0_sq * var_b0)
    var_total = stats.n * f0 / (stats.n + f0) + var_f0
    return CompetitorEstimate(
        method=method,
        c_hat=stats.c + f0,
        se=math.sqrt(var_total),
        tau_used=stats.tau_max,
        estimable=True,
        note=None if uniform_weights else "weights reconstructed via the delta method",
        intercept=intercept,
        slope=slope,
    )
