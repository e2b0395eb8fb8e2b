import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import rotadapt.adapt as adapt_mod
from rotadapt.adapt import (
    AdaptationConfig,
    adapt_regression,
    adapt_regression_report,
    bootstrap_subset,
    estimate_angle,
    fit_ols,
    median,
)
from rotadapt.assign import cost_matrix
from rotadapt.core import AdaptationFailed, DegenerateInput, InvalidInput
from rotadapt.rotation import rotate_line, rotate_set

# six noisy points near a line; brute force below shows that a 0.2 rad
# rotation keeps the rotation correspondence as the unique optimal plan
SMALL_SOURCE = np.array(
    [(0.5, 0.9), (1.7, 1.2), (3.1, 2.6), (4.4, 2.2), (6.0, 3.9), (7.3, 3.6)]
)
SMALL_THETA = 0.2


def x_axis_points(n):
    return np.column_stack((np.linspace(0, 10, n), np.zeros(n)))


def test_small_instance_has_unique_identity_optimum():
    tgt = rotate_set(SMALL_SOURCE, SMALL_THETA)
    for p in (1, 2):
        c = cost_matrix(SMALL_SOURCE, tgt, p)
        costs = sorted(sum(c[i, s[i]] for i in range(6)) for s in itertools.permutations(range(6)))
        assert costs[0] == pytest.approx(np.trace(c))
        assert costs[1] > costs[0] + 1e-6


class TestFitOls:
    def test_exact_line(self):
        line = fit_ols([(0, 0), (1, 1), (2, 2)])
        assert line.a == pytest.approx(1.0) and line.b == pytest.approx(0.0, abs=1e-15)

    def test_horizontal(self):
        assert fit_ols([(0, 1), (1, 1), (2, 1)]) == (0.0, 1.0)

    def test_three_points(self):
        line = fit_ols([(0, 0), (1, 1), (2, 0)])
        assert line.a == pytest.approx(0.0, abs=1e-15)
        assert line.b == pytest.approx(1 / 3, rel=1e-15)

    def test_matches_lstsq(self, rng):
        pts = rng.normal(0, 5, (50, 2))
        line = fit_ols(pts)
        coef = np.linalg.lstsq(np.column_stack((pts[:, 0], np.ones(50))), pts[:, 1], rcond=None)[0]
        np.testing.assert_allclose(line, coef, rtol=1e-10)

    def test_degenerate(self):
        with pytest.raises(DegenerateInput):
            fit_ols([(1, 0), (1, 5)])
        with pytest.raises(DegenerateInput):
            fit_ols([(1, 0)])


class TestMedian:
    @pytest.mark.parametrize("values, expected", [([3], 3), ([1, 2, 100], 2), ([1, 2, 3, 4], 2.5)])
    def test_examples(self, values, expected):
        assert median(values) == expected

    def test_errors(self):
        with pytest.raises(InvalidInput):
            median([])
        with pytest.raises(InvalidInput):
            median([1.0, math.nan])

    @settings(max_examples=200, deadline=None)
    @given(
        clean=st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=30),
        data=st.data(),
    )
    def test_breakdown(self, clean, data):
        n = len(clean)
        # fewer than half of the final sequence may be outliers
        n_out = data.draw(st.integers(0, max(0, n - 1)))
        outliers = data.draw(st.lists(st.floats(-1e12, 1e12), min_size=n_out, max_size=n_out))
        m = median(clean + outliers)
        assert min(clean) <= m <= max(clean)


class TestConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"n_repetitions": 0},
            {"bootstrap_proportion": 0.0},
            {"bootstrap_proportion": 1.5},
            {"norm_order": 0.5},
            {"max_bootstrap_retries": -1},
            {"seed": -3},
        ],
    )
    def test_validation(self, kwargs):
        with pytest.raises(InvalidInput):
            AdaptationConfig(**kwargs)


class TestEstimateAngle:
    def test_rotated_subset_of_x_axis(self):
        src = x_axis_points(200)
        tgt = rotate_set(src[::20], math.pi / 4)
        est = estimate_angle(src, tgt)
        assert est.theta_hat == pytest.approx(math.pi / 4, abs=0.05)
        assert est.centroids.shape == (10, 2)

    def test_unrotated_subset(self):
        src = x_axis_points(200)
        est = estimate_angle(src, src[5::20])
        assert abs(est.theta_hat) < 0.05

    def test_exact_rotation_same_size(self):
        tgt = rotate_set(SMALL_SOURCE, SMALL_THETA)
        est = estimate_angle(SMALL_SOURCE, tgt)
        assert est.theta_hat == pytest.approx(SMALL_THETA, abs=1e-12)
        # centroid i is a source point; it must be sent to that point's image
        for i, j in enumerate(est.plan.assignment):
            np.testing.assert_array_equal(est.centroids[i], SMALL_SOURCE[j])

    def test_deterministic(self, rng):
        src = rng.uniform(0, 10, (300, 2))
        tgt = rotate_set(rng.uniform(0, 10, (12, 2)), 0.5)
        cfg = AdaptationConfig(seed=9)
        a, b = estimate_angle(src, tgt, cfg), estimate_angle(src, tgt, cfg)
        assert a.theta_hat == b.theta_hat
        np.testing.assert_array_equal(a.centroids, b.centroids)
        np.testing.assert_array_equal(a.plan.assignment, b.plan.assignment)

    def test_errors(self):
        with pytest.raises(DegenerateInput):
            estimate_angle(x_axis_points(10), [(1.0, 1.0)])
        with pytest.raises(DegenerateInput):
            estimate_angle(x_axis_points(3), x_axis_points(5))

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 2**32), theta=st.floats(-math.pi, math.pi), n_t=st.integers(2, 8))
    def test_angle_in_range(self, seed, theta, n_t):
        rng = np.random.default_rng(seed)
        src = rng.normal(0, 3, (40, 2))
        tgt = rotate_set(rng.normal(0, 3, (n_t, 2)), theta)
        est = estimate_angle(src, tgt, AdaptationConfig(seed=seed))
        assert -math.pi < est.theta_hat <= math.pi
        assert est.centroids.shape[0] == n_t


class TestAdaptRegression:
    def test_no_rotation_returns_source_fit(self, rng):
        x = rng.uniform(0, 10, 300)
        src = np.column_stack((x, 0.5 * x))
        line = adapt_regression(src, src[:10], AdaptationConfig(n_repetitions=20))
        assert line.a == pytest.approx(0.5, abs=1e-6)
        assert line.b == pytest.approx(0.0, abs=1e-6)

    def test_flat_source_rotated_target(self):
        src = x_axis_points(1000)
        tgt = rotate_set(x_axis_points(10), math.pi / 4)
        line = adapt_regression(src, tgt, AdaptationConfig(n_repetitions=50, bootstrap_proportion=0.5))
        assert line.a == pytest.approx(1.0, abs=0.1)

    def test_single_full_iteration_collapses_to_pipeline(self):
        tgt = rotate_set(SMALL_SOURCE, SMALL_THETA)
        cfg = AdaptationConfig(n_repetitions=1, bootstrap_proportion=1.0, norm_order=1.0,
                               bootstrap_replace=False)
        line = adapt_regression(SMALL_SOURCE, tgt, cfg)
        want = rotate_line(fit_ols(SMALL_SOURCE), SMALL_THETA)
        assert line.a == pytest.approx(want.a, abs=1e-8)
        assert line.b == pytest.approx(want.b, abs=1e-8)

    def test_deterministic_bitwise(self, rng):
        src = np.column_stack((rng.uniform(0, 10, 400), rng.normal(0, 1, 400)))
        tgt = rotate_set(src[:15] + rng.normal(0, 0.5, (15, 2)), 0.6)
        cfg = AdaptationConfig(n_repetitions=15, seed=77)
        r1 = adapt_regression_report(src, tgt, cfg)
        r2 = adapt_regression_report(src, tgt, cfg)
        assert r1.line == r2.line
        assert r1.thetas == r2.thetas

    def test_seed_changes_iterations(self, rng):
        src = np.column_stack((rng.uniform(0, 10, 400), rng.normal(0, 1, 400)))
        tgt = rotate_set(src[:15], 0.6)
        a = adapt_regression_report(src, tgt, AdaptationConfig(n_repetitions=5, seed=1))
        b = adapt_regression_report(src, tgt, AdaptationConfig(n_repetitions=5, seed=2))
        assert a.thetas != b.thetas

    def test_report_contents(self, rng):
        src = np.column_stack((rng.uniform(0, 10, 200), rng.normal(0, 1, 200)))
        tgt = rotate_set(src[:10], 0.3)
        rep = adapt_regression_report(src, tgt, AdaptationConfig(n_repetitions=7))
        assert len(rep.iterations) == 7 and rep.n_failed == 0
        assert rep.source_fit == fit_ols(src)
        good = [r.line for r in rep.iterations]
        assert rep.line.a == median([g.a for g in good])
        assert rep.line.b == median([g.b for g in good])

    def test_target_never_resampled(self, rng, monkeypatch):
        src = np.column_stack((rng.uniform(0, 10, 300), rng.normal(0, 1, 300)))
        tgt = rotate_set(rng.uniform(0, 10, (8, 2)), 0.4)
        calls = []
        real = adapt_mod.estimate_angle

        def spy(source, target, config=None):
            calls.append((np.array(source), np.array(target)))
            return real(source, target, config)

        monkeypatch.setattr(adapt_mod, "estimate_angle", spy)
        adapt_regression(src, tgt, AdaptationConfig(n_repetitions=10))
        assert len(calls) == 10
        src_rows = {tuple(r) for r in src}
        for sub, t in calls:
            np.testing.assert_array_equal(t, tgt)
            assert {tuple(r) for r in sub} <= src_rows
            assert len({tuple(r) for r in sub}) == sub.shape[0]

    def test_all_vertical_fails(self):
        # source slope 1 rotated by pi/4 is vertical in every iteration
        src = np.column_stack((np.arange(50.0), np.arange(50.0)))
        tgt = rotate_set(src[::5], math.pi / 4)
        cfg = AdaptationConfig(n_repetitions=3, bootstrap_proportion=1.0, bootstrap_replace=False)
        assert estimate_angle(src, tgt).theta_hat == pytest.approx(math.pi / 4, abs=1e-9)
        with pytest.raises(AdaptationFailed):
            adapt_regression(src, tgt, cfg)

    def test_bootstrap_failures_are_dropped(self):
        # 5 distinct points, n_t = 5: with replacement a half-size draw can never
        # reach 5 distinct points, so the fallback draws exactly n_t without replacement
        src = np.array([(0.0, 0.0), (1.0, 0.3), (2.0, 0.1), (3.0, 0.8), (4.0, 0.5)])
        tgt = rotate_set(src, 0.1)
        rep = adapt_regression_report(src, tgt, AdaptationConfig(n_repetitions=4))
        assert rep.n_failed == 0
        assert all(r.n_distinct == 5 for r in rep.iterations)

    def test_duplicate_heavy_source_degenerate(self):
        src = np.array([(0.0, 0.0)] * 50 + [(1.0, 1.0)] * 50)
        with pytest.raises(DegenerateInput):
            adapt_regression(src, [(0, 0), (1, 1), (2, 2)])


class TestBootstrap:
    def test_subset_is_distinct_source_rows(self, rng):
        src = np.repeat(rng.uniform(0, 10, (40, 2)), 3, axis=0)
        sub = bootstrap_subset(src, 0.5, np.random.default_rng(0))
        assert len({tuple(r) for r in sub}) == sub.shape[0]
        assert {tuple(r) for r in sub} <= {tuple(r) for r in src}

    def test_without_replacement_full_proportion_is_everything(self, rng):
        src = rng.uniform(0, 10, (25, 2))
        sub = bootstrap_subset(src, 1.0, np.random.default_rng(0), replace_=False)
        assert sub.shape == (25, 2)

    def test_min_size_fallback(self, rng):
        src = rng.uniform(0, 10, (10, 2))
        sub = bootstrap_subset(src, 0.1, np.random.default_rng(0), min_size=6)
        assert sub.shape == (6, 2)
