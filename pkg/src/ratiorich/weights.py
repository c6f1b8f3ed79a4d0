"""Zero-truncated Poisson moments and regression weight schemes.

Frequency counts are modelled as independent Poisson variables conditioned on
being positive, so each observed count behaves as a zero-truncated Poisson
(ZTP) variable.  The variance and covariance of consecutive-count ratios
follow from the delta method applied to ratios of independent ZTP variables,
and regression weights are the reciprocals of those variances.

Everything here is expressed in terms of the expected counts ``lambda_j``
alone: writing ``lambda_j = C * p_j`` removes the unknown class total ``C``
from the variance and covariance expressions (an algebraic identity checked
in the test suite), so the weights never require knowledge of ``C``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, WeightError

__all__ = [
    "ZtpMoments",
    "WeightScheme",
    "ztp_moments",
    "ratio_variance",
    "ratio_covariance",
    "initial_weights",
    "adaptive_weights",
]

KIND_INVERSE_INDEX = "inverse-index"
KIND_ADAPTIVE_DIAGONAL = "adaptive-diagonal"
KIND_ADAPTIVE_TRIDIAGONAL = "adaptive-tridiagonal"


@dataclass(frozen=True)
class ZtpMoments:
    """Mean and variance of a zero-truncated Poisson variable."""

    mu: float
    sigma2: float


def _check_positive(name: str, value) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
        raise DomainError(f"{name} must be positive and finite")
    return arr


def _ztp_mu_sigma2(lam: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # 1 - exp(-lam) via expm1 avoids cancellation for small lam; the factor
    # lam/(exp(lam)-1) is computed as lam*exp(-lam)/(1-exp(-lam)), which
    # underflows gracefully instead of overflowing for large lam.
    one_minus_exp = -np.expm1(-lam)
    mu = lam / one_minus_exp
    truncation = lam * np.exp(-lam) / one_minus_exp
    sigma2 = mu * (1.0 - truncation)
    return mu, np.maximum(sigma2, 0.0)


def ztp_moments(lam: float) -> ZtpMoments:
    """Moments of a zero-truncated Poisson with original parameter ``lam``.

    ``mu = lam / (1 - e^-lam)`` and ``sigma2 = mu * (1 - lam/(e^lam - 1))``.
    Numerically stable from ``lam ~ 1e-8`` up to arbitrarily large values.
    """
    arr = _check_positive("lambda", lam)
    mu, sigma2 = _ztp_mu_sigma2(arr)
    return ZtpMoments(mu=float(mu), sigma2=float(sigma2))


def ratio_variance(lambda_j, lambda_j1):
    """Delta-method variance of the count ratio ``f_{j+1} / f_j``.

    Arguments are the expected counts of the denominator and numerator
    frequencies.  Accepts scalars or arrays; always positive.
    """
    lj = _check_positive("lambda_j", lambda_j)
    lj1 = _check_positive("lambda_j1", lambda_j1)
    mj, s2j = _ztp_mu_sigma2(lj)
    mj1, s2j1 = _ztp_mu_sigma2(lj1)
    out = (mj1 * mj1 * s2j) / mj**4 + s2j1 / (mj * mj)
    return float(out) if np.isscalar(lambda_j) and np.isscalar(lambda_j1) else out


def ratio_covariance(lambda_jm1, lambda_j, lambda_j1):
    """Delta-method covariance of adjacent count ratios.

    ``Cov(f_j/f_{j-1}, f_{j+1}/f_j)`` for expected counts
    ``lambda_{j-1}, lambda_j, lambda_{j+1}``; always non-positive because the
    shared count appears in the numerator of one ratio and the denominator of
    the other.
    """
    ljm1 = _check_positive("lambda_jm1", lambda_jm1)
    lj = _check_positive("lambda_j", lambda_j)
    lj1 = _check_positive("lambda_j1", lambda_j1)
    mjm1, _ = _ztp_mu_sigma2(ljm1)
    mj, s2j = _ztp_mu_sigma2(lj)
    mj1, _ = _ztp_mu_sigma2(lj1)
    out = -(mj1 * s2j) / (mj * mj * mjm1)
    scalars = all(np.isscalar(v) for v in (lambda_jm1, lambda_j, lambda_j1))
    return float(out) if scalars else out


@dataclass(frozen=True)
class WeightScheme:
    """Per-ratio regression weights, optionally with tridiagonal structure.

    ``diagonal`` holds the weights themselves (reciprocal ratio variances, or
    ``1/j`` for the initial scheme).  For the tridiagonal kind,
    ``off_diagonal`` holds the covariances between adjacent ratios, which are
    never positive; the solver then inverts the implied covariance matrix.
    """

    kind: str
    diagonal: tuple[float, ...]
    off_diagonal: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if len(self.diagonal) < 1:
            raise WeightError("weight scheme needs at least one entry")
        if any(not np.isfinite(w) or w <= 0.0 for w in self.diagonal):
            raise WeightError("diagonal weights must be positive and finite")
        if self.off_diagonal is not None:
            if len(self.off_diagonal) != len(self.diagonal) - 1:
                raise WeightError("off-diagonal band must have length J - 1")
            if any(not np.isfinite(v) or v > 0.0 for v in self.off_diagonal):
                raise WeightError("off-diagonal covariances must be <= 0 and finite")

    def __len__(self) -> int:
        return len(self.diagonal)

    def matrix(self) -> np.ndarray:
        """The weight matrix applied to residuals in the least-squares objective."""
        w = np.asarray(self.diagonal, dtype=float)
        if self.off_diagonal is None:
            return np.diag(w)
        cov = np.diag(1.0 / w)
        off = np.asarray(self.off_diagonal, dtype=float)
        idx = np.arange(len(off))
        cov[idx, idx + 1] = off
        cov[idx + 1, idx] = off
        return np.linalg.inv(cov)


def initial_weights(num_ratios: int) -> WeightScheme:
    """The model-independent starting scheme: weights proportional to ``1/j``."""
    if num_ratios < 1:
        raise DomainError("at least one ratio is required")
    return WeightScheme(
        kind=KIND_INVERSE_INDEX,
        diagonal=tuple(1.0 / j for j in range(1, num_ratios + 1)),
    )


def adaptive_weights(model, f1: int, num_ratios: int, tridiagonal: bool = False) -> WeightScheme:
    """Weights rebuilt from a fitted ratio model.

    Expected counts are anchored at the observed singleton count and
    propagated by the fitted ratio recursion
    ``lambda_{j+1} = lambda_j * r(j)``; the weights are then the reciprocal
    delta-method variances of each ratio point.

    Raises:
        WeightError: if any reconstructed expected count is non-positive.
    """
    from .model import evaluate_ratio

    if f1 <= 0:
        raise DomainError("singleton count must be positive")
    if num_ratios < 1:
        raise DomainError("at least one ratio is required")
    lam = [float(f1)]
    for j in range(1, num_ratios + 1):
        r = evaluate_ratio(model, float(j))
        nxt = lam[-1] * r
        if not np.isfinite(nxt) or nxt <= 0.0:
            raise WeightError(f"fitted ratio gives non-positive expected count at j={j + 1}")
        lam.append(nxt)
    diagonal = tuple(1.0 / ratio_variance(lam[j], lam[j + 1]) for j in range(num_ratios))
    if not tridiagonal:
        return WeightScheme(kind=KIND_ADAPTIVE_DIAGONAL, diagonal=diagonal)
    off = tuple(
        min(ratio_covariance(lam[i], lam[i + 1], lam[i + 2]), 0.0)
        for i in range(num_ratios - 1)
    )
    return WeightScheme(kind=KIND_ADAPTIVE_TRIDIAGONAL, diagonal=diagonal, off_diagonal=off)
