import numpy as np
import pytest

from intentrack import aggregate, alpha_error, prediction_error, true_goal_prob


class TestPredictionError:
    def test_exact_match_is_zero(self):
        means = np.array([[1.0, 2.0], [2.0, 2.0], [3.0, 2.0]])
        assert prediction_error(means, means.copy()) == 0.0

    def test_constant_offset(self):
        means = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
        ref = means + np.array([0.0, 0.5])
        assert prediction_error(means, ref) == pytest.approx(0.5)

    def test_arithmetic_mean_of_offsets(self):
        means = np.array([[0.0, 0.0], [0.0, 0.0], [0.0, 0.0]])
        ref = np.array([[1.0, 0.0], [2.0, 0.0], [3.0, 0.0]])
        assert prediction_error(means, ref) == pytest.approx(2.0)

    def test_truncates_to_available_horizon(self):
        means = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
        ref = np.array([[0.0, 1.0]])
        assert prediction_error(means, ref) == pytest.approx(1.0)

    def test_empty_reference_omitted(self):
        means = np.array([[0.0, 0.0]])
        assert prediction_error(means, np.empty((0, 2))) is None


class TestTrueGoalProb:
    def test_examples(self):
        assert true_goal_prob(np.full(4, 0.25), 2) == 0.25
        post = np.zeros(4)
        post[1] = 1.0
        assert true_goal_prob(post, 1) == 1.0
        assert true_goal_prob(post, 3) == 0.0


class TestAlphaError:
    def test_absolute(self):
        assert alpha_error(10.0, 50.0) == 40.0
        assert alpha_error(50.0, 10.0) == 40.0


class TestAggregate:
    def test_constant_series(self):
        a = aggregate([3.0] * 10)
        assert a.mean == 3.0 and a.std == 0.0 and a.median == 3.0

    def test_two_point_population_std(self):
        a = aggregate([0.0, 2.0])
        assert a.mean == 1.0
        assert a.std == 1.0  # population normalization

    def test_order_invariant_and_matches_numpy(self, rng):
        v = rng.normal(size=513)
        a = aggregate(v)
        b = aggregate(v[::-1])
        assert a == b
        assert a.mean == pytest.approx(float(np.mean(v)), abs=1e-12)
        assert a.std == pytest.approx(float(np.std(v)), abs=1e-12)
        assert a.median == pytest.approx(float(np.median(v)), abs=1e-12)

    def test_nan_excluded(self):
        a = aggregate([1.0, float("nan"), 3.0])
        assert a.n == 2 and a.mean == 2.0

    def test_empty(self):
        a = aggregate([])
        assert a.n == 0 and np.isnan(a.mean)
