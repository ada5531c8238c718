import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from logq import metrics
from logq.errors import DomainError, RankDeficiencyError
from logq.estimators import (
    FitCriterion,
    XYDataset,
    diagnostics,
    fit_constant,
    fit_linear,
    fit_power,
    weighted_median,
)
from logq.models import Constant, Linear, Power, predict

ALL_CRITERIA = ["mape", "lnq", "ols", "lad"]


def paired(actuals, predictions):
    return metrics.PairedObservations(np.asarray(actuals, float), np.asarray(predictions, float))


class TestPredict:
    def test_constant_ignores_x(self):
        assert predict(Constant(10.0), 123.0) == 10.0
        np.testing.assert_array_equal(predict(Constant(2.0), np.array([1.0, 9.0])), [2.0, 2.0])

    def test_linear(self):
        assert predict(Linear(10.05, 3.8), 100.0) == pytest.approx(390.05, abs=1e-9)

    def test_power(self):
        assert predict(Power(2.0, 1.5), 4.0) == pytest.approx(16.0, rel=1e-12)

    def test_power_rejects_non_positive_x(self):
        with pytest.raises(DomainError):
            predict(Power(2.0, 1.5), 0.0)
        with pytest.raises(DomainError):
            predict(Power(2.0, 1.5), np.array([1.0, -2.0]))

    def test_power_rejects_non_positive_multiplier(self):
        with pytest.raises(DomainError):
            Power(0.0, 1.0)
        with pytest.raises(DomainError):
            Power(-2.0, 1.0)


class TestWeightedMedian:
    def test_unweighted_median(self):
        assert weighted_median([1.0, 2.0, 4.0], [1.0, 1.0, 1.0]) == 2.0

    def test_reciprocal_weights_pull_low(self):
        # weights 1, 1/2, 1/4: cumulative reaches half the total at the first value
        assert weighted_median([1.0, 2.0, 4.0], [1.0, 0.5, 0.25]) == 1.0

    def test_even_split_takes_lower_value(self):
        assert weighted_median([1.0, 3.0], [1.0, 1.0]) == 1.0
        assert weighted_median([1.0, 2.0, 3.0, 10.0], [1.0, 1.0, 1.0, 1.0]) == 2.0

    def test_heavy_weight_dominates(self):
        assert weighted_median([1.0, 2.0, 4.0], [0.1, 0.1, 10.0]) == 4.0

    def test_order_independence(self):
        assert weighted_median([4.0, 1.0, 2.0], [0.25, 1.0, 0.5]) == 1.0

    def test_rejects_bad_weights(self):
        with pytest.raises(DomainError):
            weighted_median([1.0, 2.0], [1.0, 0.0])
        with pytest.raises(DomainError):
            weighted_median([], [])

    @given(
        st.lists(
            st.tuples(
                st.floats(min_value=0.01, max_value=100.0),
                st.floats(min_value=0.01, max_value=10.0),
            ),
            min_size=1,
            max_size=25,
        )
    )
    @settings(max_examples=60)
    def test_minimises_weighted_absolute_deviation(self, pairs):
        values = np.array([p[0] for p in pairs])
        weights = np.array([p[1] for p in pairs])
        best = weighted_median(values, weights)

        def objective(v):
            return float((weights * np.abs(v - values)).sum())

        # the optimum of a piecewise-linear convex function sits at a data point
        candidates = [objective(v) for v in values]
        assert objective(best) <= min(candidates) + 1e-12


class TestFitConstant:
    def test_min_mape_pinned_example(self):
        # ys {1, 2, 4}: c = 1 minimises sum |c - y|/y = 1.25; the reported
        # objective is the mean, so it is 1.25/3
        result = fit_constant([1.0, 2.0, 4.0], "mape")
        assert result.model == Constant(1.0)
        assert 3.0 * result.objective == pytest.approx(1.25, abs=1e-12)

    def test_min_mape_matches_grid_oracle(self):
        rng = np.random.default_rng(99)
        for _ in range(20):
            ys = rng.uniform(0.5, 50.0, int(rng.integers(2, 30)))
            fitted = fit_constant(ys, "mape").model.c

            def objective(c):
                return float(np.abs((ys - c) / ys).mean())

            grid = np.linspace(ys.min() * 0.5, ys.max() * 1.1, 4001)
            assert objective(fitted) <= min(objective(c) for c in grid) + 1e-12

    def test_lnq_is_geometric_mean(self):
        result = fit_constant([1.0, 2.0, 4.0], "lnq")
        assert result.model.c == pytest.approx(2.0, rel=1e-14)
        assert result.q_product == pytest.approx(1.0, abs=1e-12)

    def test_ols_is_arithmetic_mean(self):
        result = fit_constant([1.0, 2.0, 4.0], "ols")
        assert result.model.c == pytest.approx(7.0 / 3.0, rel=1e-15)

    def test_lad_is_median_tie_low(self):
        assert fit_constant([1.0, 2.0, 4.0], "lad").model.c == 2.0
        assert fit_constant([1.0, 2.0, 3.0, 10.0], "lad").model.c == 2.0

    def test_geometric_never_exceeds_arithmetic(self):
        rng = np.random.default_rng(4)
        for _ in range(50):
            ys = rng.uniform(0.1, 20.0, int(rng.integers(1, 40)))
            geo = fit_constant(ys, "lnq").model.c
            ari = fit_constant(ys, "ols").model.c
            assert geo <= ari + 1e-12

    def test_rejects_empty_and_non_positive(self):
        with pytest.raises(DomainError):
            fit_constant([], "ols")
        with pytest.raises(DomainError):
            fit_constant([1.0, -2.0], "ols")

    def test_accepts_enum_and_string(self):
        assert fit_constant([2.0], FitCriterion.OLS).model == fit_constant([2.0], "ols").model


def linear_mape_enumeration(xs, ys):
    """Smallest mean |y - (a + b x)| / y over all lines through point pairs."""
    best = math.inf
    for i, j in itertools.combinations(range(len(xs)), 2):
        if xs[i] == xs[j]:
            continue
        b = (ys[j] - ys[i]) / (xs[j] - xs[i])
        a = ys[i] - b * xs[i]
        objective = float(np.abs((ys - (a + b * xs)) / ys).mean())
        best = min(best, objective)
    return best


class TestFitLinear:
    @pytest.mark.parametrize("criterion", ALL_CRITERIA)
    def test_noiseless_recovery(self, criterion):
        xs = np.arange(1.0, 11.0)
        data = XYDataset(xs, 3.0 + 2.0 * xs)
        result = fit_linear(data, criterion)
        assert result.model.a == pytest.approx(3.0, abs=1e-6)
        assert result.model.b == pytest.approx(2.0, abs=1e-6)
        assert result.objective < 1e-9
        assert result.converged

    def test_negative_slope_recovery(self):
        xs = np.arange(1.0, 9.0)
        data = XYDataset(xs, 20.0 - 1.5 * xs)
        for criterion in ALL_CRITERIA:
            result = fit_linear(data, criterion)
            assert result.model.b == pytest.approx(-1.5, abs=1e-6), criterion

    def test_min_mape_matches_pairwise_enumeration(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            n = int(rng.integers(3, 13))
            xs = rng.uniform(-5.0, 20.0, n)
            ys = np.abs(2.0 + 0.7 * xs) + rng.uniform(0.5, 8.0, n)
            result = fit_linear(XYDataset(xs, ys), "mape")
            assert abs(result.objective - linear_mape_enumeration(xs, ys)) < 1e-9

    def test_lad_matches_pairwise_enumeration(self):
        rng = np.random.default_rng(12)
        for _ in range(15):
            n = int(rng.integers(3, 11))
            xs = rng.uniform(0.0, 10.0, n)
            ys = 5.0 + 1.3 * xs + rng.normal(0.0, 2.0, n)
            ys = np.abs(ys) + 0.5
            result = fit_linear(XYDataset(xs, ys), "lad")
            best = math.inf
            for i, j in itertools.combinations(range(n), 2):
                if xs[i] == xs[j]:
                    continue
                b = (ys[j] - ys[i]) / (xs[j] - xs[i])
                a = ys[i] - b * xs[i]
                best = min(best, float(np.abs(ys - (a + b * xs)).sum()))
            assert abs(result.objective - best) < 1e-9

    def test_lnq_zeroes_the_log_residual_sum(self):
        rng = np.random.default_rng(13)
        for _ in range(20):
            n = int(rng.integers(5, 60))
            xs = rng.uniform(1.0, 100.0, n)
            ys = (4.0 + 0.8 * xs) * np.exp(rng.normal(0.0, 0.3, n))
            result = fit_linear(XYDataset(xs, ys), "lnq")
            assert abs(result.ln_q_residuals.sum()) < 1e-9
            assert result.q_product == pytest.approx(1.0, abs=1e-9)

    def test_lnq_beats_log_objective_of_other_criteria(self):
        # global search sanity: no other fitted line should do better on
        # the lnq objective than the lnq fit itself
        rng = np.random.default_rng(14)
        for _ in range(10):
            xs = rng.uniform(1.0, 50.0, 25)
            ys = (10.0 + 2.0 * xs) * np.exp(rng.normal(0.0, 0.4, 25))
            data = XYDataset(xs, ys)
            lnq_objective = fit_linear(data, "lnq").objective
            for other in ("ols", "lad"):
                model = fit_linear(data, other).model
                predictions = predict(model, xs)
                if np.all(predictions > 0):
                    rival = float(((np.log(predictions) - np.log(ys)) ** 2).sum())
                    assert lnq_objective <= rival + 1e-9

    def test_all_x_identical_raises(self):
        with pytest.raises(RankDeficiencyError):
            fit_linear(XYDataset([2.0, 2.0, 2.0], [1.0, 2.0, 3.0]), "ols")

    def test_non_positive_prediction_drops_log_diagnostics(self):
        # steep data forces the OLS line below zero at the left point
        xs = np.array([1.0, 2.0, 3.0, 4.0])
        ys = np.array([0.1, 0.1, 20.0, 40.0])
        result = fit_linear(XYDataset(xs, ys), "ols")
        assert np.any(predict(result.model, xs) <= 0)
        assert result.ln_q_residuals is None
        assert result.q_product is None
        assert result.n_over + result.n_under <= 4


def loglog_closed_form(xs, ys):
    """Independent least-squares-on-logs solution for y = a x**b."""
    lx, ly = np.log(xs), np.log(ys)
    b = float(((lx - lx.mean()) * (ly - ly.mean())).sum() / ((lx - lx.mean()) ** 2).sum())
    a = float(math.exp(ly.mean() - b * lx.mean()))
    return a, b


class TestFitPower:
    @pytest.mark.parametrize("criterion", ALL_CRITERIA)
    def test_noiseless_recovery(self, criterion):
        xs = np.linspace(1.0, 50.0, 20)
        data = XYDataset(xs, 2.0 * xs ** 1.5)
        result = fit_power(data, criterion)
        assert result.model.a == pytest.approx(2.0, abs=1e-6)
        assert result.model.b == pytest.approx(1.5, abs=1e-6)
        assert result.objective < 1e-9

    def test_negative_exponent_recovery(self):
        xs = np.linspace(0.5, 20.0, 15)
        data = XYDataset(xs, 8.0 * xs ** -0.7)
        for criterion in ALL_CRITERIA:
            result = fit_power(data, criterion)
            assert result.model.b == pytest.approx(-0.7, abs=1e-6), criterion

    def test_lnq_matches_independent_closed_form(self):
        rng = np.random.default_rng(21)
        for _ in range(30):
            n = int(rng.integers(5, 80))
            xs = rng.uniform(1.0, 2000.0, n)
            ys = 3.0 * xs ** 0.9 * np.exp(rng.normal(0.0, 0.5, n))
            result = fit_power(XYDataset(xs, ys), "lnq")
            a, b = loglog_closed_form(xs, ys)
            assert result.model.a == pytest.approx(a, rel=1e-9)
            assert result.model.b == pytest.approx(b, abs=1e-9)

    def test_lnq_zeroes_the_log_residual_sum(self):
        rng = np.random.default_rng(22)
        for _ in range(20):
            n = int(rng.integers(5, 100))
            xs = rng.uniform(1.0, 1500.0, n)
            ys = 20.0 * xs ** 0.94 * np.exp(rng.normal(0.0, 0.4, n))
            result = fit_power(XYDataset(xs, ys), "lnq")
            assert abs(result.ln_q_residuals.sum()) < 1e-9

    def test_profiled_criteria_beat_lnq_model_on_their_objective(self):
        rng = np.random.default_rng(23)
        xs = rng.uniform(10.0, 1000.0, 40)
        ys = 2.5 * xs ** 1.1 * np.exp(rng.normal(0.0, 0.3, 40))
        data = XYDataset(xs, ys)
        reference = fit_power(data, "lnq").model
        for criterion in ("mape", "ols", "lad"):
            result = fit_power(data, criterion)
            rival_predictions = predict(reference, xs)
            rival = {
                "mape": float(np.abs((ys - rival_predictions) / ys).mean()),
                "ols": float(((ys - rival_predictions) ** 2).sum()),
                "lad": float(np.abs(ys - rival_predictions).sum()),
            }[criterion]
            assert result.objective <= rival + 1e-9

    def test_rejects_non_positive_x(self):
        with pytest.raises(DomainError):
            fit_power(XYDataset([0.0, 1.0], [1.0, 2.0]), "lnq")

    def test_all_x_identical_raises(self):
        with pytest.raises(RankDeficiencyError):
            fit_power(XYDataset([3.0, 3.0], [1.0, 2.0]), "lnq")


class TestCriterionConsistency:
    def test_objective_equals_metric_recomputation(self):
        # FitResult.objective must agree with the metrics module applied to
        # the fitted predictions, for every family and criterion
        rng = np.random.default_rng(31)
        for _ in range(10):
            n = int(rng.integers(5, 40))
            xs = rng.uniform(1.0, 300.0, n)
            ys = (5.0 + 1.1 * xs) * np.exp(rng.normal(0.0, 0.25, n))
            data = XYDataset(xs, ys)
            fits = [fit_constant(ys, c) for c in ALL_CRITERIA]
            fits += [fit_linear(data, c) for c in ALL_CRITERIA]
            fits += [fit_power(data, c) for c in ALL_CRITERIA]
            for result in fits:
                predictions = np.asarray(predict(result.model, xs), dtype=float)
                if np.any(predictions <= 0):
                    continue
                observations = paired(ys, predictions)
                expected = {
                    FitCriterion.MIN_MAPE: metrics.mape(observations),
                    FitCriterion.LNQ_LEAST_SQUARES: metrics.sum_sq_ln_q(observations),
                    FitCriterion.OLS: float(((ys - predictions) ** 2).sum()),
                    FitCriterion.LAD: float(np.abs(ys - predictions).sum()),
                }[result.criterion]
                assert result.objective == pytest.approx(expected, rel=1e-10, abs=1e-10)

    def test_multiplicative_error_epsilon_equivalence(self):
        # sum ln(yhat/y)^2 equals sum ln(eps)^2 when y = yhat * eps
        rng = np.random.default_rng(32)
        xs = rng.uniform(1.0, 100.0, 30)
        model = Power(3.0, 0.8)
        eps = np.exp(rng.normal(0.0, 0.3, 30))
        ys = predict(model, xs) * eps
        observations = paired(ys, predict(model, xs))
        assert metrics.sum_sq_ln_q(observations) == pytest.approx(
            float((np.log(eps) ** 2).sum()), rel=1e-12
        )


class TestDiagnostics:
    def test_perfect_model(self):
        xs = np.arange(1.0, 6.0)
        data = XYDataset(xs, 2.0 + 3.0 * xs)
        diag = diagnostics(Linear(2.0, 3.0), data)
        np.testing.assert_allclose(diag.ln_q_residuals, 0.0, atol=1e-15)
        assert diag.q_product == 1.0
        assert diag.n_over == 0
        assert diag.n_under == 0

    def test_counts_over_and_under(self):
        data = XYDataset([1.0, 2.0, 3.0], [10.0, 10.0, 10.0])
        diag = diagnostics(Constant(11.0), data)
        assert diag.n_over == 3
        assert diag.n_under == 0
        assert diag.ln_q_residuals == pytest.approx([math.log(1.1)] * 3, rel=1e-12)

    def test_rejects_non_positive_predictions(self):
        data = XYDataset([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
        with pytest.raises(DomainError):
            diagnostics(Linear(1.0, -1.0), data)


class TestXYDatasetValidation:
    def test_rejects_non_positive_y(self):
        with pytest.raises(DomainError):
            XYDataset([1.0, 2.0], [1.0, 0.0])

    def test_rejects_length_mismatch(self):
        with pytest.raises(DomainError):
            XYDataset([1.0, 2.0, 3.0], [1.0, 2.0])

    def test_rejects_single_point(self):
        with pytest.raises(DomainError):
            XYDataset([1.0], [1.0])

    def test_rejects_non_finite_x(self):
        with pytest.raises(DomainError):
            XYDataset([1.0, math.inf], [1.0, 2.0])
