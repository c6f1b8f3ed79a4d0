"""Serializable output records for the command-line interface.

Every JSON record carries a ``schema`` tag naming the schema file (shipped
under :mod:`ratiorich.schemas`) that validates it.  Non-finite floats are
rendered as null so the output is strict JSON.
"""

from __future__ import annotations

import math
from typing import Any

from .competitors import chao_bunge, chao_lower_bound, wlrm
from .errors import RatiorichError
from .freqtab import FrequencyTable, TableStats, derived_stats, ratio_series
from .model import evaluate_ratio, model_record, predict_b0
from .procedure import (
    ProcedureOptions,
    RichnessEstimate,
    estimate_richness,
    satisfies_criteria,
    select_model,
)
from .solver import FitResult, sequential_fit_ladder
from .weights import WeightScheme, initial_weights

ESTIMATE_SCHEMA = "ratiorich.estimate/1"
FIT_SCHEMA = "ratiorich.fit/1"
COMPARE_SCHEMA = "ratiorich.compare/1"
SIMULATE_SCHEMA = "ratiorich.simulate/1"

METHOD_LABEL = "breakaway"

RATIO_PLOT_HEADER = "j,observed,breakaway,uwlrm,twlrm"


def _num(value) -> float | None:
    if value is None:
        return None
    value = float(value)
    return value if math.isfinite(value) else None


def _stats_record(stats: TableStats) -> dict[str, int]:
    return {
        "c": stats.c,
        "n": stats.n,
        "tau_max": stats.tau_max,
        "num_ratios": stats.num_ratios,
    }


def _weights_record(weights: WeightScheme | None) -> dict[str, Any] | None:
    if weights is None:
        return None
    return {
        "kind": weights.kind,
        "diagonal": [float(w) for w in weights.diagonal],
        "off_diagonal": (
            None if weights.off_diagonal is None else [float(v) for v in weights.off_diagonal]
        ),
    }


def _ladder_record(fits: tuple[FitResult, ...], num_ratios: int, selected: FitResult | None) -> list[dict]:
    rows = []
    for fit in fits:
        criteria = satisfies_criteria(fit, num_ratios)
        try:
            b0 = _num(predict_b0(fit.model))
        except RatiorichError:
            b0 = None
        rows.append(
            {
                "p": fit.model.p,
                "q": fit.model.q,
                "converged": fit.converged,
                "iterations": fit.iterations,
                "objective": _num(fit.objective),
                "b0": b0,
                "criteria": {
                    "b0_positive": criteria.b0_positive,
                    "no_roots": criteria.no_roots,
                    "converged": criteria.converged,
                    "satisfied": criteria.satisfied,
                },
                "seed_only": fit.model.q == 0,
                "selected": selected is not None and fit is selected,
                "message": fit.message,
            }
        )
    return rows


def _classification_record(estimate: RichnessEstimate) -> dict | None:
    if estimate.classification is None:
        return None
    katz = estimate.classification.katz_params
    return {
        "label": estimate.classification.label,
        "katz_a": _num(katz[0]) if katz else None,
        "katz_b": _num(katz[1]) if katz else None,
    }


def _selected_fit(estimate: RichnessEstimate) -> FitResult | None:
    if estimate.model is None:
        return None
    for fit in estimate.ladder_fits:
        if fit.model is estimate.model:
            return fit
    return None


def estimate_record(estimate: RichnessEstimate) -> dict:
    """Full JSON record of a richness estimate, ladder diagnostics included."""
    ratio_points: list[dict] = []
    if estimate.series is not None:
        fitted0 = None
        if estimate.model is not None:
            fitted0 = _num(predict_b0(estimate.model))
        ratio_points.append({"j": 0, "observed": None, "fitted": fitted0})
        for j, observed in zip(estimate.series.indices, estimate.series.values):
            fitted = None
            if estimate.model is not None:
                fitted = _num(evaluate_ratio(estimate.model, float(j)))
            ratio_points.append({"j": int(j), "observed": _num(observed), "fitted": fitted})
    fallback = None
    if estimate.fallback is not None:
        fallback = {
            "method": estimate.fallback.method,
            "c_hat": _num(estimate.fallback.c_hat),
            "se": _num(estimate.fallback.se),
        }
    return {
        "schema": ESTIMATE_SCHEMA,
        "method": METHOD_LABEL,
        "c_hat": _num(estimate.c_hat),
        "c_hat_rounded": round(estimate.c_hat),
        "f0_hat": _num(estimate.f0_hat),
        "se": _num(estimate.se),
        "code": estimate.code,
        "iterations_outer": estimate.iterations_outer,
        "stats": _stats_record(estimate.stats),
        "model": model_record(estimate.model) if estimate.model is not None else None,
        "classification": _classification_record(estimate),
        "weights_final": _weights_record(estimate.weights_final),
        "ladder": _ladder_record(estimate.ladder_fits, estimate.stats.num_ratios, _selected_fit(estimate)),
        "ratio_points": ratio_points,
        "fallback": fallback,
        "warnings": list(estimate.warnings),
    }


def fit_record(table: FrequencyTable, options: ProcedureOptions) -> dict:
    """Diagnostics of a single ladder pass under the initial weights."""
    stats = derived_stats(table)
    series = ratio_series(table)
    weights = initial_weights(stats.num_ratios)
    fits = tuple(sequential_fit_ladder(series, weights, options.ladder))
    eligible = [fit for fit in fits if fit.model.q >= 1]
    selected = select_model(eligible, stats.num_ratios)
    return {
        "schema": FIT_SCHEMA,
        "stats": _stats_record(stats),
        "jbar": series.jbar,
        "weights": _weights_record(weights),
        "ladder": _ladder_record(fits, stats.num_ratios, selected),
        "models": [model_record(fit.model) for fit in fits],
    }


def compare_rows(
    table: FrequencyTable,
    options: ProcedureOptions,
    tau: int = 10,
    uniform_wlrm_weights: bool = False,
) -> list[dict]:
    """One row per estimator, in the fixed comparison order."""
    rows: list[dict] = []

    def add(method: str, runner) -> None:
        try:
            result = runner()
        except RatiorichError as exc:
            rows.append(
                {"method": method, "c_hat": None, "se": None, "estimable": False,
                 "code": None, "tau": None, "note": str(exc)}
            )
            return
        if isinstance(result, RichnessEstimate):
            rows.append(
                {"method": method, "c_hat": _num(result.c_hat), "se": _num(result.se),
                 "estimable": True, "code": result.code, "tau": result.stats.tau_max,
                 "note": None}
            )
        else:
            rows.append(
                {"method": method, "c_hat": _num(result.c_hat), "se": _num(result.se),
                 "estimable": result.estimable, "code": None, "tau": result.tau_used,
                 "note": result.note}
            )

    add(METHOD_LABEL, lambda: estimate_richness(table, options))
    add("uWLRM", lambda: wlrm(table, transformed=False, uniform_weights=uniform_wlrm_weights))
    add("tWLRM", lambda: wlrm(table, transformed=True, uniform_weights=uniform_wlrm_weights))
    add("Chao-Bunge", lambda: chao_bunge(table, tau=tau))
    add("CLB", lambda: chao_lower_bound(table))
    return rows


def compare_record(
    table: FrequencyTable,
    options: ProcedureOptions,
    tau: int = 10,
    uniform_wlrm_weights: bool = False,
) -> dict:
    return {
        "schema": COMPARE_SCHEMA,
        "stats": _stats_record(derived_stats(table)),
        "rows": compare_rows(table, options, tau=tau, uniform_wlrm_weights=uniform_wlrm_weights),
    }


def simulate_record(config, summary) -> dict:
    """Study summary paired with the design that produced it.

    Worker count deliberately omitted: output bytes must not depend on the
    execution mode.
    """
    return {
        "schema": SIMULATE_SCHEMA,
        "config": {
            "c_true": config.c_true,
            "prob": config.prob,
            "size": config.size,
            "replications": config.replications,
            "seed": config.seed,
        },
        "summary": {
            "pct_inferred_nb": _num(summary.pct_inferred_nb),
            "mean_se_hat": _num(summary.mean_se_hat),
            "empirical_se": _num(summary.empirical_se),
            "mean_c_hat": _num(summary.mean_c_hat),
            "failures": summary.failures,
            "replications": summary.replications,
            "degenerate": summary.degenerate,
        },
    }


def _format_cell(value: float | None) -> str:
    return "" if value is None else format(value, ".10g")


def ratio_plot_csv(table: FrequencyTable, options: ProcedureOptions) -> str:
    """Plot data: observed ratios and each regression's fitted curve.

    Columns are the frequency index, the observed ratio (empty at the
    extrapolation row ``j = 0``), and the fitted ratio of each regression
    method; a method that produced no estimate leaves its column empty.
    """
    series = ratio_series(table)
    observed = {0: None, **{j: v for j, v in zip(series.indices, series.values)}}

    main_fit = None
    try:
        estimate = estimate_richness(table, options)
        if estimate.model is not None:
            main_fit = estimate.model
    except RatiorichError:
        pass

    def wlrm_curve(transformed: bool):
        try:
            fit = wlrm(table, transformed=transformed)
        except RatiorichError:
            return None
        if not fit.estimable:
            return None
        def curve(j: float) -> float:
            line = fit.intercept + fit.slope * j
            if transformed:
                line = math.exp(line)
            return line / (j + 1.0)
        return curve

    u_curve = wlrm_curve(False)
    t_curve = wlrm_curve(True)

    lines = [RATIO_PLOT_HEADER]
    for j in range(0, len(series) + 1):
        fitted_main = _num(evaluate_ratio(main_fit, float(j))) if main_fit is not None else None
        cells = [
            str(j),
            _format_cell(_num(observed[j])),
            _format_cell(fitted_main),
            _format_cell(_num(u_curve(float(j))) if u_curve else None),
            _format_cell(_num(t_curve(float(j))) if t_curve else None),
        ]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
