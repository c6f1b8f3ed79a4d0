import numpy as np
import pytest

from ratiorich import (
    DomainError,
    RationalRatioModel,
    SingularityError,
    classify,
    denominator_roots_in,
    evaluate_ratio,
    implied_probabilities,
    pgf_eval,
    predict_b0,
    uncentered_coefficients,
)


def raw_model(beta, alpha=()):
    """Model given directly in raw powers of j (centering shift zero)."""
    return RationalRatioModel(beta=tuple(beta), alpha=tuple(alpha), jbar=0.0)


class TestEvaluateRatio:
    def test_constant_model(self):
        m = RationalRatioModel(beta=(0.5, 0.0), alpha=(), jbar=3.7)
        for j in (0.0, 1.0, 5.0, 17.0):
            assert evaluate_ratio(m, j) == 0.5

    def test_hand_substitution(self):
        m = RationalRatioModel(beta=(0.5, 0.1), alpha=(0.05,), jbar=3.0)
        assert evaluate_ratio(m, 0.0) == pytest.approx(0.235294, abs=1e-6)

    def test_singularity(self):
        m = RationalRatioModel(beta=(1.0, 1.0), alpha=(-1.0,), jbar=0.0)
        with pytest.raises(SingularityError):
            evaluate_ratio(m, 1.0)

    def test_vectorized(self):
        m = raw_model((0.4, 0.05), (0.2,))
        js = np.array([0.0, 1.0, 2.0])
        expected = (0.4 + 0.05 * js) / (1.0 + 0.2 * js)
        assert np.allclose(evaluate_ratio(m, js), expected)

    def test_order_invariants(self):
        with pytest.raises(ValueError):
            RationalRatioModel(beta=(0.5,), alpha=(), jbar=0.0)
        with pytest.raises(ValueError):
            RationalRatioModel(beta=(0.5, 0.1), alpha=(0.1, 0.2), jbar=0.0)


class TestPredictB0:
    def test_constant(self):
        assert predict_b0(RationalRatioModel(beta=(0.5, 0.0), alpha=(), jbar=9.0)) == 0.5

    def test_hand_example(self):
        m = RationalRatioModel(beta=(0.5, 0.1), alpha=(0.05,), jbar=3.0)
        assert predict_b0(m) == pytest.approx(0.235294, abs=1e-6)

    def test_negative_value_returned_as_is(self):
        m = raw_model((-0.25, 0.1))
        assert predict_b0(m) == -0.25


class TestDenominatorRoots:
    def test_polynomial_model_has_none(self):
        assert denominator_roots_in(raw_model((0.5, 0.1)), 9) == []

    def test_root_at_four(self):
        m = RationalRatioModel(beta=(1.0, 0.0), alpha=(-0.25,), jbar=0.0)
        roots = denominator_roots_in(m, 9)
        assert len(roots) == 1
        assert roots[0] == pytest.approx(4.0, abs=1e-9)

    def test_root_outside_domain(self):
        m = RationalRatioModel(beta=(1.0, 0.0), alpha=(0.05,), jbar=3.0)
        assert denominator_roots_in(m, 9) == []


class TestUncentering:
    def test_hand_example(self):
        m = RationalRatioModel(beta=(0.5, 0.1), alpha=(0.05,), jbar=3.0)
        beta_raw, alpha_raw = uncentered_coefficients(m)
        assert beta_raw[0] == pytest.approx(0.2 / 0.85)
        assert beta_raw[1] == pytest.approx(0.1 / 0.85)
        assert alpha_raw[0] == pytest.approx(0.05 / 0.85)

    def test_centering_is_reparametrization(self):
        rng = np.random.default_rng(5)
        for _ in range(60):
            p = int(rng.integers(1, 4))
            q = int(rng.integers(0, p + 1))
            jbar = float(rng.uniform(1, 8))
            beta = tuple(rng.normal(scale=0.3, size=p + 1))
            alpha = tuple(rng.normal(scale=0.02, size=q))
            m = RationalRatioModel(beta=beta, alpha=alpha, jbar=jbar)
            js = np.linspace(0.0, 12.0, 40)
            den = m.denominator(js)
            if np.any(np.abs(den) < 0.2):
                continue
            try:
                beta_raw, alpha_raw = uncentered_coefficients(m)
            except SingularityError:
                continue
            num_raw = np.polynomial.polynomial.polyval(js, beta_raw)
            den_raw = np.polynomial.polynomial.polyval(js, np.concatenate(([1.0], alpha_raw)))
            assert np.allclose(evaluate_ratio(m, js), num_raw / den_raw, atol=1e-10)

    def test_b0_equals_raw_constant(self):
        m = RationalRatioModel(beta=(0.5, 0.1), alpha=(0.05,), jbar=3.0)
        beta_raw, _ = uncentered_coefficients(m)
        assert predict_b0(m) == pytest.approx(beta_raw[0], rel=1e-12)


class TestImpliedProbabilities:
    def test_geometric_half(self):
        dist = implied_probabilities(raw_model((0.5, 0.0)), 20)
        assert dist.proper and not dist.terminating
        assert dist.values[0] == pytest.approx(0.5, abs=1e-6)
        assert dist.values[1] == pytest.approx(0.25, abs=1e-6)
        assert sum(dist.values) == pytest.approx(1.0, abs=1e-9)

    def test_terminating_support(self):
        dist = implied_probabilities(raw_model((1.0, -1.0)), 5)
        assert dist.proper and dist.terminating
        assert dist.values[0] == pytest.approx(0.5)
        assert dist.values[1] == pytest.approx(0.5)
        assert all(v == 0.0 for v in dist.values[2:])

    def test_sign_change_improper(self):
        ratios = {0: 1.0, 1: 0.5, 2: -0.2, 3: 0.3, 4: 0.2}
        dist = implied_probabilities(lambda j: ratios[j], 5)
        assert not dist.proper
        assert any(v < 0 for v in dist.values)

    def test_normalization_sums_to_one(self):
        m = raw_model((0.5, 0.05), (1.0,))
        dist = implied_probabilities(m, 300)
        assert dist.proper
        assert sum(dist.values) == pytest.approx(1.0, abs=1e-9)


class TestClassify:
    def test_negative_binomial_katz_form(self):
        cls = classify(raw_model((0.5, 0.45), (1.0,)), 9, tol=0.05)
        assert cls.label == "negative-binomial"
        assert cls.katz_params == pytest.approx((0.5, 0.45))

    def test_poisson_katz_form(self):
        cls = classify(raw_model((2.0, 0.0), (1.0,)), 9, tol=0.05)
        assert cls.label == "poisson"
        assert cls.katz_params == pytest.approx((2.0, 0.0))

    def test_negative_u_sequence_non_distribution(self):
        cls = classify(raw_model((0.5, -0.3)), 9, tol=0.05)
        assert cls.label == "non-distribution"
        assert cls.katz_params is None

    def test_geometric_constant_line(self):
        cls = classify(raw_model((0.4, 0.0)), 9, tol=0.05)
        assert cls.label == "negative-binomial"
        assert cls.katz_params == pytest.approx((0.4, 0.4))

    def test_exact_nb_coefficient_grid(self):
        jbar = 5.0
        for prob in (0.9, 0.95, 0.99):
            for size in (1, 10, 100, 500):
                slope = 1.0 - prob
                m = RationalRatioModel(
                    beta=(
                        (size * slope + slope * jbar) / (1 + jbar),
                        slope / (1 + jbar),
                    ),
                    alpha=(1.0 / (1 + jbar),),
                    jbar=jbar,
                )
                assert classify(m, 10, tol=0.05).label == "negative-binomial"

    def test_katz_params_presence_matches_label(self):
        models = [
            raw_model((0.5, 0.45), (1.0,)),
            raw_model((2.0, 0.0), (1.0,)),
            raw_model((0.5, 0.0)),
            raw_model((1.0, -1.0)),
            raw_model((0.5, -0.3)),
            raw_model((1.0, 1.0), (10.0,)),
        ]
        for m in models:
            cls = classify(m, 9, tol=0.05)
            assert (cls.katz_params is not None) == (
                cls.label in ("poisson", "negative-binomial")
            )

    def test_kemp_proper_full_support(self):
        # Ratio (1+j)/(1+10j) stays positive and tends to 0.1: proper.
        cls = classify(raw_model((1.0, 1.0), (10.0,)), 9, tol=0.05)
        assert cls.label == "kemp-proper"

    def test_terminating_label(self):
        cls = classify(raw_model((1.0, -1.0)), 1, tol=0.05)
        assert cls.label == "kemp-terminating"

    def test_divergent_non_distribution(self):
        cls = classify(raw_model((1.2, 0.3)), 9, tol=0.05)
        assert cls.label == "non-distribution"


class TestPgf:
    def test_paper_value_kemp_example(self):
        # Ratios 0.1(1+j)/(0.1+j), normalized form (1+j)/(1+10j).
        m = raw_model((1.0, 1.0), (10.0,))
        assert pgf_eval(m, -5.0) == pytest.approx(-0.6365, abs=5e-4)

    def test_normalization_at_one(self):
        for m in (
            raw_model((1.0, 1.0), (10.0,)),
            raw_model((0.5, 0.0)),
            raw_model((0.5, 0.05), (1.0,)),
        ):
            assert pgf_eval(m, 1.0) == pytest.approx(1.0, abs=1e-9)

    def test_value_at_zero_is_p0(self):
        assert pgf_eval(raw_model((0.5, 0.0)), 0.0) == pytest.approx(0.5, abs=1e-9)

    def test_callable_ratio_input(self):
        value = pgf_eval(lambda j: 0.1 * (1 + j) / (0.1 + j), -5.0)
        assert value == pytest.approx(-0.6365, abs=5e-4)

    def test_divergent_series_raises(self):
        with pytest.raises(DomainError):
            pgf_eval(raw_model((1.2, 0.0)), 1.0)

    def test_divergence_at_large_argument(self):
        # Terms scale like (s * 0.5)^j: diverges once |s| > 2.
        with pytest.raises(DomainError):
            pgf_eval(raw_model((0.5, 0.0)), 2.5)
