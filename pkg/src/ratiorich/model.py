"""Centered rational ratio models and the count distributions they imply.

The regression surface is a ratio of polynomials in the centered frequency
index ``j - jbar``: numerator coefficients ``beta_0..beta_p`` and denominator
coefficients ``alpha_1..alpha_q`` with the denominator constant fixed at 1.
Centering is a pure reparametrization used to decorrelate the coefficient
estimates; the same curve can always be re-expressed in raw powers of ``j``.

A fitted curve, extrapolated to ``j = 0``, predicts the ratio of singletons
to unobserved classes.  Run forward instead, the curve generates the
probability-ratio recursion ``p_{j+1} = p_j * r(j)``, which lets us ask
whether the fit corresponds to an actual count distribution (and if so,
which family) or merely to a useful extrapolating curve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import DomainError, SingularityError

__all__ = [
    "RationalRatioModel",
    "DistributionClass",
    "ImpliedDistribution",
    "evaluate_ratio",
    "predict_b0",
    "denominator_roots_in",
    "uncentered_coefficients",
    "implied_probabilities",
    "classify",
    "pgf_eval",
    "model_record",
]

# Hard cap on series length when summing probability generating functions.
PGF_TERM_CAP = 10**6

# Classification scan cap: a ratio sequence that has not settled by here is
# treated as non-summable.
CLASSIFY_TERM_CAP = 10**5

_SINGULAR_TOL = 1e-12


@dataclass(frozen=True)
class RationalRatioModel:
    """Rational function of the centered index, with unit denominator constant."""

    beta: tuple[float, ...]
    alpha: tuple[float, ...]
    jbar: float

    def __post_init__(self) -> None:
        if len(self.beta) < 2:
            raise ValueError("numerator degree must be at least 1")
        if len(self.alpha) > len(self.beta) - 1:
            raise ValueError("denominator degree cannot exceed numerator degree")

    @property
    def p(self) -> int:
        return len(self.beta) - 1

    @property
    def q(self) -> int:
        return len(self.alpha)

    def numerator(self, j):
        z = np.asarray(j, dtype=float) - self.jbar
        return npoly.polyval(z, np.asarray(self.beta, dtype=float))

    def denominator(self, j):
        z = np.asarray(j, dtype=float) - self.jbar
        return npoly.polyval(z, np.concatenate(([1.0], self.alpha)))


@dataclass(frozen=True)
class DistributionClass:
    """Family label for the distribution implied by a fitted ratio curve.

    ``katz_params`` carries the linear-ratio intercept and slope ``(a, b)``
    and is present exactly when the label is Poisson or negative binomial.
    """

    label: str
    katz_params: tuple[float, float] | None = None


@dataclass(frozen=True)
class ImpliedDistribution:
    """Probability sequence generated by a ratio curve, possibly improper."""

    values: tuple[float, ...]
    proper: bool
    terminating: bool


def evaluate_ratio(model: RationalRatioModel, j):
    """The fitted ratio at index ``j`` (scalar or array).

    Raises:
        SingularityError: where the denominator vanishes.
    """
    num = model.numerator(j)
    den = model.denominator(j)
    if np.any(np.abs(den) < _SINGULAR_TOL):
        raise SingularityError(f"denominator vanishes at j={j}")
    out = num / den
    return float(out) if np.isscalar(j) or np.ndim(j) == 0 else out


def predict_b0(model: RationalRatioModel) -> float:
    """The fitted ratio extrapolated to ``j = 0``.

    This estimates the ratio of singletons to unobserved classes; whether the
    value is usable (positive) is the caller's concern.
    """
    return evaluate_ratio(model, 0.0)


def denominator_roots_in(model: RationalRatioModel, num_ratios: int) -> list[float]:
    """Real roots of the denominator inside ``[0, num_ratios]``."""
    if model.q == 0:
        return []
    coeffs = np.concatenate(([1.0], np.asarray(model.alpha, dtype=float)))
    roots = npoly.polyroots(coeffs)
    out = []
    for z in roots:
        if abs(z.imag) > 1e-9:
            continue
        x = z.real + model.jbar
        if -1e-9 <= x <= num_ratios + 1e-9:
            out.append(float(x))
    return sorted(out)


def _shift_expand(coeffs: tuple[float, ...], shift: float) -> list[float]:
    # Coefficients of sum_r c_r (x - shift)^r collected in raw powers of x.
    n = len(coeffs)
    out = [0.0] * n
    for m in range(n):
        acc = 0.0
        for r in range(m, n):
            acc += coeffs[r] * math.comb(r, m) * (-shift) ** (r - m)
        out[m] = acc
    return out


def uncentered_coefficients(model: RationalRatioModel) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """Coefficients re-expressed in raw powers of ``j``, denominator constant 1.

    Raises:
        SingularityError: if the denominator vanishes at ``j = 0``; the raw
            form with unit constant term does not exist there.
    """
    num_raw = _shift_expand(model.beta, model.jbar)
    den_raw = _shift_expand((1.0,) + model.alpha, model.jbar)
    d0 = den_raw[0]
    if abs(d0) < _SINGULAR_TOL:
        raise SingularityError("denominator vanishes at j=0; raw form undefined")
    beta_raw = tuple(c / d0 for c in num_raw)
    alpha_raw = tuple(c / d0 for c in den_raw[1:])
    return beta_raw, alpha_raw


def _as_ratio_fn(model_or_ratio):
    if isinstance(model_or_ratio, RationalRatioModel):
        return lambda j: evaluate_ratio(model_or_ratio, float(j))
    if callable(model_or_ratio):
        return model_or_ratio
    raise TypeError("expected a RationalRatioModel or a callable j -> ratio")


def _scan_burnin(model: RationalRatioModel, num_ratios: int) -> int:
    # Beyond the largest real critical point (roots of numerator, denominator
    # and of the derivative's numerator) the ratio is monotone, so sign and
    # growth checks become conclusive.
    beta = np.asarray(model.beta, dtype=float)
    alpha = np.concatenate(([1.0], np.asarray(model.alpha, dtype=float)))
    dnum = npoly.polysub(
        npoly.polymul(npoly.polyder(beta), alpha),
        npoly.polymul(beta, npoly.polyder(alpha)),
    )
    bound = 0.0
    for coeffs in (beta, alpha, dnum):
        if len(np.trim_zeros(coeffs, "b")) > 1:
            roots = npoly.polyroots(np.trim_zeros(coeffs, "b"))
            real = [z.real + model.jbar for z in roots if abs(z.imag) < 1e-9]
            if real:
                bound = max(bound, max(real))
    # Critical points parked absurdly far out (coefficient dust from near-exact
    # fits) are beyond any probability mass; cap instead of scanning to them.
    bound = min(bound, 10_000.0)
    return max(int(math.ceil(bound)) + 2, num_ratios + 2, 16)


def _asymptote(model: RationalRatioModel) -> float | None:
    # Limit of the ratio as j grows; None when the numerator degree dominates.
    if model.q >= 1 and model.alpha[-1] != 0.0:
        return model.beta[-1] / model.alpha[-1] if model.p == model.q else None
    return None


def _scan_distribution(model: RationalRatioModel, num_ratios: int) -> str:
    """Classify the u-recursion as proper / terminating / improper / divergent."""
    burnin = _scan_burnin(model, num_ratios)
    u = 1.0
    total = 1.0
    for j in range(CLASSIFY_TERM_CAP):
        try:
            r = evaluate_ratio(model, float(j))
        except SingularityError:
            return "improper"
        if r < 0.0:
            return "improper"
        if r == 0.0:
            return "terminating"
        nxt = u * r
        if nxt == 0.0:
            # Underflow with a positive ratio: the tail is below double
            # precision, which is as proper as numbers can express.
            return "proper" if r < 1.0 else "divergent"
        total += nxt
        if not np.isfinite(total):
            return "divergent"
        if j >= burnin:
            if r < 0.9999 and nxt < 1e-14 * total:
                return "proper"
            if nxt > 1e30:
                return "divergent"
        u = nxt
    return "divergent"


def implied_probabilities(model_or_ratio, j_max: int) -> ImpliedDistribution:
    """Probabilities ``p_0..p_{j_max}`` generated by the ratio recursion.

    Starting from ``u_0 = 1``, each ``u_{j+1} = u_j * ratio(j)``.  When every
    term is non-negative and the sequence either terminates or has a
    negligible tail at ``j_max``, the terms are normalized to probabilities;
    otherwise the raw terms are returned flagged improper.
    """
    ratio_fn = _as_ratio_fn(model_or_ratio)
    u = [1.0]
    terminated = False
    for j in range(j_max):
        if terminated:
            u.append(0.0)
            continue
        nxt = u[-1] * ratio_fn(j)
        if nxt == 0.0:
            nxt = 0.0  # squash -0.0 from a zero hit followed by negative ratios
            terminated = True
        u.append(nxt)
    arr = np.asarray(u, dtype=float)
    improper = bool(np.any(arr < 0.0))
    total = float(arr.sum())
    tail_ok = terminated
    if not improper and not terminated:
        r_end = ratio_fn(j_max)
        tail_ok = 0.0 <= r_end < 1.0 and arr[-1] * r_end / (1.0 - r_end) < 1e-6 * total
    if improper or not tail_ok:
        return ImpliedDistribution(values=tuple(arr), proper=False, terminating=terminated)
    return ImpliedDistribution(values=tuple(arr / total), proper=True, terminating=terminated)


def classify(model: RationalRatioModel, num_ratios: int, tol: float = 0.05) -> DistributionClass:
    """Decide which distribution family, if any, a fitted curve belongs to.

    A curve of order (1,1) whose raw denominator slope is 1 within ``tol``
    has linear ``(j+1) p_{j+1} / p_j``, i.e. lies in the Katz family with
    intercept ``a`` and slope ``b``: negative binomial for ``0 < b < 1``,
    Poisson for ``b`` within ``tol`` of zero (both need ``a > 0``).  An
    order-(1,0) curve that is constant within ``tol`` is a geometric ratio,
    which is negative binomial as well.  Anything else is labelled by what
    its probability recursion does: proper, terminating, or not a
    distribution at all.
    """
    beta_raw, alpha_raw = uncentered_coefficients(model)
    if (model.p, model.q) == (1, 1) and abs(alpha_raw[0] - 1.0) <= tol:
        a, b = beta_raw[0], beta_raw[1]
        if a > 0.0 and 0.0 < b < 1.0:
            return DistributionClass("negative-binomial", (a, b))
        if a > 0.0 and abs(b) <= tol:
            return DistributionClass("poisson", (a, b))
    if (model.p, model.q) == (1, 0) and abs(beta_raw[1]) <= tol and 0.0 < beta_raw[0] < 1.0:
        return DistributionClass("negative-binomial", (beta_raw[0], beta_raw[0]))
    verdict = _scan_distribution(model, num_ratios)
    if verdict == "proper":
        return DistributionClass("kemp-proper")
    if verdict == "terminating":
        return DistributionClass("kemp-terminating")
    return DistributionClass("non-distribution")


def _sum_power_series(ratio_fn, s: float, limit: float | None, burnin: int, tol: float) -> float:
    total = 0.0
    term = 1.0  # u_j * s^j at j = 0
    for j in range(PGF_TERM_CAP):
        total += term
        nxt = term * s * ratio_fn(j)
        if nxt == 0.0:
            return total
        if j >= burnin:
            # Bound every future multiplier: look ahead geometrically and,
            # when known, include the asymptotic ratio limit.
            r_bound = max(abs(ratio_fn(j + 1 + step)) for step in (0, 1, 3, 7, 15, 63))
            if limit is not None:
                r_bound = max(r_bound, abs(limit))
            rho = abs(s) * r_bound
            if rho < 1.0 and abs(nxt) / (1.0 - rho) < tol:
                return total + nxt
            if rho >= 1.0 and j > burnin + 64:
                raise DomainError(f"power series diverges at s={s}")
        term = nxt
    raise DomainError(f"power series did not converge within {PGF_TERM_CAP} terms")


def pgf_eval(model_or_ratio, s: float) -> float:
    """Probability generating function ``G(s)`` of the implied distribution.

    Terms are summed via the ratio recursion until the remaining tail is
    bounded below 1e-10.  The series must converge at ``s``: the term-ratio
    test ``|s * ratio(j)|`` eventually below 1, or terminating support.

    Raises:
        DomainError: if the series diverges at ``s`` or fails to converge
            within the term cap.
    """
    ratio_fn = _as_ratio_fn(model_or_ratio)
    if isinstance(model_or_ratio, RationalRatioModel):
        limit = _asymptote(model_or_ratio)
        burnin = _scan_burnin(model_or_ratio, 0)
    else:
        limit = None
        burnin = 64
    normalizer = _sum_power_series(ratio_fn, 1.0, limit, burnin, tol=1e-12)
    value = _sum_power_series(ratio_fn, s, limit, burnin, tol=1e-10)
    return value / normalizer


def model_record(model: RationalRatioModel) -> dict:
    """Serializable description of a model: orders, both coefficient forms, b0."""
    try:
        beta_raw, alpha_raw = uncentered_coefficients(model)
        raw = {"beta_raw": list(beta_raw), "alpha_raw": list(alpha_raw)}
    except SingularityError:
        raw = {"beta_raw": None, "alpha_raw": None}
    try:
        b0 = predict_b0(model)
    except SingularityError:
        b0 = None
    return {
        "p": model.p,
        "q": model.q,
        "jbar": model.jbar,
        "beta": list(model.beta),
        "alpha": list(model.alpha),
        "b0": b0,
        **raw,
    }
