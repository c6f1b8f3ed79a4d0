import numpy as np
import pytest
from sklearn.base import clone

from ratiorich import (
    ChaoBunge,
    ChaoLowerBound,
    FrequencyTable,
    LinearRatioRichness,
    RatioRegressionRichness,
    evaluate_ratio,
)


class TestRatioRegressionRichness:
    def test_fit_from_table(self, geometric_table):
        est = RatioRegressionRichness().fit(geometric_table)
        assert est.estimate_ == pytest.approx(2047.0, abs=1e-6)
        assert est.f0_ == pytest.approx(1024.0, abs=1e-6)
        assert est.code_ == 2

    def test_fit_from_mapping_and_array(self, geometric_table):
        entries = geometric_table.entries()
        from_map = RatioRegressionRichness().fit(entries)
        rows = np.array(sorted(entries.items()))
        from_array = RatioRegressionRichness().fit(rows)
        assert from_map.estimate_ == from_array.estimate_

    def test_bad_input_shape(self):
        with pytest.raises(ValueError):
            RatioRegressionRichness().fit(np.arange(12).reshape(4, 3))

    def test_predict_matches_model_curve(self, geometric_table):
        est = RatioRegressionRichness().fit(geometric_table)
        js = np.array([0.0, 1.0, 4.0])
        assert np.allclose(est.predict(js), evaluate_ratio(est.model_, js))

    def test_predict_before_fit_raises(self):
        from sklearn.exceptions import NotFittedError

        with pytest.raises(NotFittedError):
            RatioRegressionRichness().predict(1.0)

    def test_get_params_clone_roundtrip(self):
        est = RatioRegressionRichness(katz_tol=0.1, max_outer_iterations=5)
        cloned = clone(est)
        assert cloned.get_params()["katz_tol"] == 0.1
        assert cloned.get_params()["max_outer_iterations"] == 5

    def test_set_params(self, geometric_table):
        est = RatioRegressionRichness()
        est.set_params(min_ratios=4)
        assert est.get_params()["min_ratios"] == 4
        est.fit(geometric_table)
        assert est.estimate_ == pytest.approx(2047.0, abs=1e-6)


class TestCompetitorEstimators:
    def test_chao_lower_bound(self, geometric_table):
        est = ChaoLowerBound().fit(geometric_table)
        assert est.estimable_
        assert est.estimate_ == pytest.approx(1535.0)

    def test_chao_bunge_with_tau_param(self):
        table = FrequencyTable.from_entries({1: 10, 2: 5, 3: 2})
        est = ChaoBunge(tau=10).fit(table)
        assert est.estimate_ == pytest.approx(24.142857, abs=1e-6)
        assert clone(est).get_params()["tau"] == 10

    def test_linear_ratio_variants(self, poisson_table):
        u = LinearRatioRichness(transformed=False).fit(poisson_table)
        t = LinearRatioRichness(transformed=True).fit(poisson_table)
        assert u.estimate_ == pytest.approx(t.estimate_, abs=1e-6)
        js = np.array([0.0, 1.0, 2.0])
        assert np.allclose(u.predict(js), 2.0 / (js + 1.0), atol=1e-9)

    def test_inestimable_flag(self):
        table = FrequencyTable.from_entries({1: 100, 2: 2, 3: 1})
        est = ChaoBunge().fit(table)
        assert not est.estimable_
        assert est.estimate_ is None
