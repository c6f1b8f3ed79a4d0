"""Acceptance suite.

Each test prints one PASS/FAIL line per checked condition (run with ``-s``
to see them) and then asserts the lot.  Two checks encode reference targets
that this implementation measurably does not meet; they are kept exact and
red rather than loosened, and the mismatch analysis is summarized under
"Known acceptance gaps" in the README:

* the replication-study dispersion targets (``test_replication_reference_*``),
* the Monte-Carlo agreement of the ratio-moment approximations at small
  expected counts (``test_weight_formula_monte_carlo``).
"""

import json
import math
import os
from pathlib import Path

import numpy as np
import pytest

import ratiorich as rr
from ratiorich.cli import main as cli_main
from ratiorich.records import compare_rows
from ratiorich.solver import _model_jacobian, fit_wnls, sequential_fit_ladder


def report(name: str, ok: bool, detail: str) -> bool:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    return ok


# ---------------------------------------------------------------------------
# 1. Replication-study reference targets


@pytest.fixture(scope="module")
def study_small():
    config = rr.SimConfig(
        c_true=5000, prob=0.95, size=100.0, replications=200, seed=20260810, workers=1
    )
    return rr.replication_study(config)


@pytest.fixture(scope="module")
def study_large():
    config = rr.SimConfig(
        c_true=50000, prob=0.99, size=500.0, replications=100, seed=20260811, workers=1
    )
    return rr.replication_study(config)


def test_replication_reference_targets_dense_design(study_small):
    checks = [
        report(
            "replication dense: share classified negative-binomial >= 95%",
            study_small.pct_inferred_nb >= 95.0,
            f"measured {study_small.pct_inferred_nb:.2f}%",
        ),
        report(
            "replication dense: mean estimated se within 15% of 6.24",
            abs(study_small.mean_se_hat - 6.24) <= 0.15 * 6.24,
            f"measured {study_small.mean_se_hat:.2f}",
        ),
        report(
            "replication dense: empirical sd within 15% of 6.20",
            abs(study_small.empirical_se - 6.20) <= 0.15 * 6.20,
            f"measured {study_small.empirical_se:.2f}",
        ),
    ]
    assert all(checks), "reference targets missed; see 'Known acceptance gaps' in README"


def test_replication_reference_targets_sparse_design(study_large):
    checks = [
        report(
            "replication sparse: mean estimated se within 15% of 20.69",
            abs(study_large.mean_se_hat - 20.69) <= 0.15 * 20.69,
            f"measured {study_large.mean_se_hat:.2f}",
        ),
        report(
            "replication sparse: empirical sd within 15% of 20.84",
            abs(study_large.empirical_se - 20.84) <= 0.15 * 20.84,
            f"measured {study_large.empirical_se:.2f}",
        ),
    ]
    assert all(checks), "reference targets missed; see 'Known acceptance gaps' in README"


def test_replication_mean_close_to_truth(study_small, study_large):
    # The estimator should be nearly unbiased in this regime: mean estimate
    # within 3 * sd / sqrt(reps) + sd of the true class total.
    checks = []
    for label, study, c_true, reps in (
        ("dense", study_small, 5000, 200),
        ("sparse", study_large, 50000, 100),
    ):
        band = 3 * study.empirical_se / math.sqrt(reps) + study.empirical_se
        checks.append(
            report(
                f"replication {label}: mean estimate near truth",
                abs(study.mean_c_hat - c_true) <= band,
                f"mean {study.mean_c_hat:.1f} vs {c_true} (band {band:.1f})",
            )
        )
    assert all(checks)


# ---------------------------------------------------------------------------
# 2. Probability-generating-function oracle


def test_pgf_reference_value():
    model = rr.RationalRatioModel(beta=(1.0, 1.0), alpha=(10.0,), jbar=0.0)
    g_minus5 = rr.pgf_eval(model, -5.0)
    g_one = rr.pgf_eval(model, 1.0)
    checks = [
        report("pgf: G(-5) = -0.6365 +/- 0.0005", abs(g_minus5 - (-0.6365)) <= 5e-4,
               f"measured {g_minus5:.6f}"),
        report("pgf: G(1) = 1 +/- 1e-9", abs(g_one - 1.0) <= 1e-9, f"measured {g_one!r}"),
    ]
    assert all(checks)


# ---------------------------------------------------------------------------
# 3. Exact-geometric end-to-end oracle


def test_geometric_end_to_end():
    table = rr.FrequencyTable.from_entries({j: 2 ** (10 - j) for j in range(1, 11)})
    estimate = rr.estimate_richness(table)
    checks = [
        report("geometric: class total 2047", abs(estimate.c_hat - 2047.0) < 1e-9,
               f"measured {estimate.c_hat}"),
        report("geometric: unobserved count 1024", abs(estimate.f0_hat - 1024.0) < 1e-9,
               f"measured {estimate.f0_hat}"),
        report("geometric: procedure code 2", estimate.code == 2, f"code {estimate.code}"),
        report("geometric: se = 47.06 +/- 0.01", abs(estimate.se - 47.0565) <= 0.01,
               f"measured {estimate.se:.4f}"),
    ]
    assert all(checks)


# ---------------------------------------------------------------------------
# 4. Solver property suite


def test_solver_properties():
    rng = np.random.default_rng(20260812)
    step = 1e-6
    worst_jacobian = 0.0
    checked = 0
    while checked < 100:
        p = int(rng.integers(1, 4))
        q = int(rng.integers(1, p + 1))
        jbar = float(rng.uniform(2, 8))
        z = np.linspace(1, 12, 10) - jbar
        beta = rng.normal(scale=0.5, size=p + 1)
        alpha = rng.normal(scale=0.08, size=q)
        den = np.polynomial.polynomial.polyval(z, np.concatenate(([1.0], alpha)))
        if np.min(np.abs(den)) < 0.2:
            continue
        analytic = _model_jacobian(beta, alpha, z)
        theta = np.concatenate([beta, alpha])

        def predict(vec):
            b, a = vec[: p + 1], vec[p + 1 :]
            num = np.polynomial.polynomial.polyval(z, b)
            d = np.polynomial.polynomial.polyval(z, np.concatenate(([1.0], a)))
            return num / d

        numeric = np.empty_like(analytic)
        for k in range(len(theta)):
            up, down = theta.copy(), theta.copy()
            up[k] += step
            down[k] -= step
            numeric[:, k] = (predict(up) - predict(down)) / (2 * step)
        scale = np.maximum(np.abs(numeric), 1e-3)
        worst_jacobian = max(worst_jacobian, float(np.max(np.abs(analytic - numeric) / scale)))
        checked += 1

    # Noiseless recovery of raw coefficients (0.4 + 0.05 j) / (1 + 0.2 j).
    indices = tuple(range(1, 11))
    values = tuple((0.4 + 0.05 * j) / (1 + 0.2 * j) for j in indices)
    series = rr.RatioSeries(indices=indices, values=values, jbar=5.5)
    fits = sequential_fit_ladder(series, rr.initial_weights(10))
    fit = next(f for f in fits if f.order == (1, 1))
    beta_raw, alpha_raw = rr.uncentered_coefficients(fit.model)
    recovery_error = max(
        abs(beta_raw[0] - 0.4), abs(beta_raw[1] - 0.05), abs(alpha_raw[0] - 0.2)
    )

    # Weight-rescaling invariance.
    base = rr.initial_weights(10)
    scaled = rr.WeightScheme(kind=base.kind, diagonal=tuple(41.0 * w for w in base.diagonal))
    noisy = tuple(v + 0.01 * math.sin(7.0 * j) for j, v in zip(indices, values))
    noisy_series = rr.RatioSeries(indices=indices, values=noisy, jbar=5.5)
    fit_a = fit_wnls(noisy_series, base, 1, 1, (0.4, 0.0, 0.0))
    fit_b = fit_wnls(noisy_series, scaled, 1, 1, (0.4, 0.0, 0.0))
    rescale_drift = max(
        float(np.max(np.abs(np.array(fit_a.model.beta) - np.array(fit_b.model.beta)))),
        float(np.max(np.abs(np.array(fit_a.model.alpha) - np.array(fit_b.model.alpha)))),
    )

    checks = [
        report("solver: analytic Jacobian vs central differences < 1e-5",
               worst_jacobian < 1e-5, f"worst relative deviation {worst_jacobian:.2e}"),
        report("solver: noiseless parameter recovery < 1e-6",
               recovery_error < 1e-6, f"worst coefficient error {recovery_error:.2e}"),
        report("solver: weight-rescaling invariance < 1e-8",
               rescale_drift < 1e-8, f"largest estimate drift {rescale_drift:.2e}"),
    ]
    assert all(checks)


# ---------------------------------------------------------------------------
# 5. Weight-formula Monte Carlo and sign properties


def _draw_ztp(lam: float, size: int, rng: np.random.Generator) -> np.ndarray:
    draws = rng.poisson(lam, size)
    while True:
        zeros = draws == 0
        remaining = int(zeros.sum())
        if remaining == 0:
            return draws.astype(np.float64)
        draws[zeros] = rng.poisson(lam, remaining)


@pytest.mark.slow
def test_weight_formula_monte_carlo():
    replicates = 10**7
    rng = np.random.default_rng(20260813)
    checks = []
    for lam in (2.0, 5.0, 20.0):
        x = _draw_ztp(lam, replicates, rng)
        y = _draw_ztp(lam, replicates, rng)
        ratio = y / x
        centered = ratio - ratio.mean()
        empirical_var = float(np.mean(centered**2))
        se_var = float(np.std(centered**2, ddof=1) / math.sqrt(replicates))
        formula_var = rr.ratio_variance(lam, lam)
        checks.append(
            report(
                f"weights MC: variance formula vs empirical, lam={lam:g}",
                abs(empirical_var - formula_var) <= 3 * se_var,
                f"empirical {empirical_var:.4f} vs formula {formula_var:.4f} "
                f"(3*MC-SE {3 * se_var:.5f})",
            )
        )
        z = _draw_ztp(lam, replicates, rng)
        first = y / x
        second = z / y
        products = (first - first.mean()) * (second - second.mean())
        empirical_cov = float(products.mean())
        se_cov = float(products.std(ddof=1) / math.sqrt(replicates))
        formula_cov = rr.ratio_covariance(lam, lam, lam)
        checks.append(
            report(
                f"weights MC: covariance formula vs empirical, lam={lam:g}",
                abs(empirical_cov - formula_cov) <= 3 * se_cov,
                f"empirical {empirical_cov:.4f} vs formula {formula_cov:.4f} "
                f"(3*MC-SE {3 * se_cov:.5f})",
            )
        )
        del x, y, z, ratio, centered, first, second, products
    assert all(checks), "first-order approximations differ from exact ratio moments; see README"


def test_weight_formula_sign_properties():
    rng = np.random.default_rng(20260814)
    grid = np.exp(rng.uniform(np.log(0.01), np.log(500.0), size=(10_000, 3)))
    variances = rr.ratio_variance(grid[:, 0], grid[:, 1])
    covariances = rr.ratio_covariance(grid[:, 0], grid[:, 1], grid[:, 2])
    checks = [
        report("weights: variance >= 0 on 1e4-point grid", bool(np.all(variances >= 0.0)),
               f"min {variances.min():.3e}"),
        report("weights: covariance <= 0 on 1e4-point grid", bool(np.all(covariances <= 0.0)),
               f"max {covariances.max():.3e}"),
    ]
    assert all(checks)


# ---------------------------------------------------------------------------
# 6. Fallback-path conformance


def test_fallback_conformance():
    tables = {
        "too-few-points": rr.FrequencyTable.from_entries({1: 100, 2: 50, 3: 25, 4: 12}),
        "rising-ratios": rr.FrequencyTable.from_entries({1: 100, 2: 20, 3: 12, 4: 12, 5: 18}),
    }
    checks = []
    for label, table in tables.items():
        estimate = rr.estimate_richness(table)
        reference = rr.wlrm(table, transformed=True)
        ok = (
            estimate.code == 1
            and estimate.c_hat == reference.c_hat
            and estimate.se == reference.se
        )
        checks.append(
            report(
                f"fallback ({label}): code 1 and output identical to tWLRM",
                ok,
                f"code {estimate.code}, {estimate.c_hat} vs {reference.c_hat}",
            )
        )
    assert all(checks)


# ---------------------------------------------------------------------------
# 7. Comparison rendering, inestimable cells, optional user-supplied datasets


def test_comparison_inestimable_rendering(capsys, tmp_path):
    # Constructions driving each defining denominator non-positive.
    steep = rr.FrequencyTable.from_entries({1: 100, 2: 2, 3: 1})
    assert not rr.chao_bunge(steep).estimable
    rising = rr.FrequencyTable.from_entries({1: 100, 2: 20, 3: 12, 4: 12, 5: 18})
    assert not rr.wlrm(rising, transformed=False).estimable

    path = tmp_path / "steep.csv"
    path.write_text("1,100\n2,2\n3,1\n", encoding="utf-8")
    code = cli_main(["compare", str(path)])
    out = capsys.readouterr().out
    lines = out.strip().splitlines()
    methods = [line.split()[0] for line in lines]
    layout_ok = methods == ["breakaway", "uWLRM", "tWLRM", "Chao-Bunge", "CLB"]
    star_ok = any(line.startswith("Chao-Bunge") and line.split()[-1] == "*" for line in lines)
    checks = [
        report("compare: five rows in fixed order", code == 0 and layout_ok, f"{methods}"),
        report("compare: inestimable cell rendered as *", star_ok, "Chao-Bunge row"),
    ]

    datasets = os.environ.get("RATIORICH_DATASETS_DIR")
    if datasets:
        directory = Path(datasets)
        for name in ("apples", "soil", "epstein"):
            table_path = directory / f"{name}.csv"
            if not table_path.exists():
                checks.append(report(f"compare: dataset {name} present", False, str(table_path)))
                continue
            table = rr.parse_frequency_table(table_path.read_text(encoding="utf-8"))
            rows = {row["method"]: row for row in compare_rows(table, rr.ProcedureOptions())}
            if name == "epstein":
                checks.append(
                    report(
                        "compare: epstein Chao-Bunge and uWLRM inestimable",
                        not rows["Chao-Bunge"]["estimable"] and not rows["uWLRM"]["estimable"],
                        f"Chao-Bunge {rows['Chao-Bunge']['estimable']}, uWLRM {rows['uWLRM']['estimable']}",
                    )
                )
            checks.append(
                report(
                    f"compare: dataset {name} renders all five rows",
                    set(rows) == {"breakaway", "uWLRM", "tWLRM", "Chao-Bunge", "CLB"},
                    str(sorted(rows)),
                )
            )
    else:
        checks.append(
            report(
                "compare: user datasets not supplied; inestimability constructions stand in",
                True,
                "set RATIORICH_DATASETS_DIR to run against apples/soil/epstein files",
            )
        )
    assert all(checks)


# ---------------------------------------------------------------------------
# 8. Simulation determinism


def test_simulation_determinism(capsys):
    argv = ["simulate", "--c", "1500", "--prob", "0.93", "--size", "60",
            "--reps", "12", "--seed", "77", "--format", "json"]
    outputs = []
    for extra in ([], [], ["--workers", "3"]):
        code = cli_main(argv + extra)
        outputs.append(capsys.readouterr().out)
        assert code == 0
    checks = [
        report("determinism: repeated runs byte-identical", outputs[0] == outputs[1],
               f"{len(outputs[0])} bytes"),
        report("determinism: serial vs parallel byte-identical", outputs[0] == outputs[2],
               "workers=1 vs workers=3"),
    ]
    json.loads(outputs[0])
    assert all(checks)
