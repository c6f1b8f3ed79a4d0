"""Scikit-learn style estimator classes.

Each estimator consumes frequency-count data through ``fit`` (a
:class:`~ratiorich.freqtab.FrequencyTable`, a ``{frequency: count}``
mapping, or a two-column array) and exposes the estimate through fitted
attributes, so the richness methods compose with scikit-learn tooling
(``get_params`` / ``set_params`` / ``clone``).
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from . import competitors
from ._validation import as_frequency_table
from .model import evaluate_ratio
from .procedure import ProcedureOptions, estimate_richness
from .solver import DEFAULT_LADDER

__all__ = [
    "RatioRegressionRichness",
    "ChaoLowerBound",
    "ChaoBunge",
    "LinearRatioRichness",
]


class _FrequencyTableEstimator(BaseEstimator):
    """Shared fit plumbing: coerce the input, delegate to ``_fit_table``."""

    def fit(self, X, y=None):
        table = as_frequency_table(X)
        self._fit_table(table)
        return self

    def _fit_table(self, table):  # pragma: no cover - abstract
        raise NotImplementedError


class RatioRegressionRichness(_FrequencyTableEstimator):
    """Richness estimation by rational-function regression on count ratios.

    Fitted attributes: ``estimate_`` (class total), ``f0_`` (predicted
    unobserved classes), ``se_``, ``code_`` (procedure outcome 1/2/3),
    ``model_`` (the accepted ratio curve, None on the fallback path),
    ``classification_`` and ``result_`` (the full estimation record).
    """

    def __init__(
        self,
        min_ratios: int = 3,
        ladder: tuple[tuple[int, int], ...] = DEFAULT_LADDER,
        tridiagonal: bool = False,
        stabilization_tol: float = 1e-3,
        max_outer_iterations: int = 20,
        katz_tol: float = 0.05,
    ):
        self.min_ratios = min_ratios
        self.ladder = ladder
        self.tridiagonal = tridiagonal
        self.stabilization_tol = stabilization_tol
        self.max_outer_iterations = max_outer_iterations
        self.katz_tol = katz_tol

    def _fit_table(self, table):
        options = ProcedureOptions(
            min_ratios=self.min_ratios,
            ladder=tuple(tuple(entry) for entry in self.ladder),
            tridiagonal=self.tridiagonal,
            stabilization_tol=self.stabilization_tol,
            max_outer_iterations=self.max_outer_iterations,
            katz_tol=self.katz_tol,
        )
        result = estimate_richness(table, options)
        self.result_ = result
        self.estimate_ = result.c_hat
        self.f0_ = result.f0_hat
        self.se_ = result.se
        self.code_ = result.code
        self.model_ = result.model
        self.classification_ = result.classification

    def predict(self, j):
        """Fitted ratio curve evaluated at frequency indices ``j``."""
        check_is_fitted(self, "result_")
        if self.model_ is None:
            raise RuntimeError("the fallback path produced no rational ratio curve")
        arr = np.asarray(j, dtype=float)
        return evaluate_ratio(self.model_, arr)


class ChaoLowerBound(_FrequencyTableEstimator):
    """Chao's lower bound on richness from singleton and doubleton counts."""

    def _fit_table(self, table):
        est = competitors.chao_lower_bound(table)
        self.result_ = est
        self.estimable_ = est.estimable
        self.estimate_ = est.c_hat
        self.se_ = est.se


class ChaoBunge(_FrequencyTableEstimator):
    """Chao-Bunge duplicate-fraction richness estimator."""

    def __init__(self, tau: int = 10):
        self.tau = tau

    def _fit_table(self, table):
        est = competitors.chao_bunge(table, tau=self.tau)
        self.result_ = est
        self.estimable_ = est.estimable
        self.estimate_ = est.c_hat
        self.se_ = est.se


class LinearRatioRichness(_FrequencyTableEstimator):
    """Weighted linear regression of ``(j+1) f_{j+1}/f_j`` on ``j``.

    ``transformed=True`` regresses the logarithm of the response, which
    keeps the prediction at zero positive.
    """

    def __init__(self, transformed: bool = True, uniform_weights: bool = False):
        self.transformed = transformed
        self.uniform_weights = uniform_weights

    def _fit_table(self, table):
        est = competitors.wlrm(
            table, transformed=self.transformed, uniform_weights=self.uniform_weights
        )
        self.result_ = est
        self.estimable_ = est.estimable
        self.estimate_ = est.c_hat
        self.se_ = est.se
        self.intercept_ = est.intercept
        self.slope_ = est.slope

    def predict(self, j):
        """Implied ratio curve ``fit(j) / (j+1)`` at frequency indices ``j``."""
        check_is_fitted(self, "result_")
        arr = np.asarray(j, dtype=float)
        line = self.intercept_ + self.slope_ * arr
        if self.transformed:
            line = np.exp(line)
        return line / (arr + 1.0)
