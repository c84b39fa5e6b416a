"""Instance generators, objective gradients, finite differences."""

import math

import numpy as np
import pytest

from cgkit.problems import (
    QuadraticRegression,
    SquaredDistance,
    StochasticLinearOracle,
    build_monomial_features,
    finite_diff_check,
    generate_sparse_regression,
    instance_to_dict,
    load_instance,
    matrix_completion_instance,
    sample_batch,
    save_instance,
)


class TestMonomialFeatures:
    def test_degree_two_bivariate(self):
        x = np.array([[2.0, 3.0]])
        feats = build_monomial_features(x, 2)
        # columns: x1, x2, x1^2, x1 x2, x2^2
        assert feats.shape == (1, 5)
        assert feats[0].tolist() == [2.0, 3.0, 4.0, 6.0, 9.0]

    def test_paper_scale_count(self):
        x = np.zeros((1, 15))
        feats = build_monomial_features(x, 4)
        assert feats.shape[1] == math.comb(19, 4) - 1 == 3875

    def test_all_ones_row(self):
        feats = build_monomial_features(np.ones((1, 3)), 3)
        assert np.all(feats == 1.0)

    def test_count_formula_small(self):
        for n in range(1, 7):
            for d in range(1, 5):
                feats = build_monomial_features(np.ones((1, n)), d)
                assert feats.shape[1] == math.comb(n + d, d) - 1

    def test_feature_limit(self):
        with pytest.raises(ValueError):
            build_monomial_features(np.zeros((1, 30)), 6, max_features=1000)


class TestSparseRegression:
    def test_deterministic_under_seed(self):
        a, ca = generate_sparse_regression(4, 3, 0.2, 0.5, 50, seed=9)
        b, cb = generate_sparse_regression(4, 3, 0.2, 0.5, 50, seed=9)
        assert np.array_equal(a.features, b.features)
        assert np.array_equal(a.targets, b.targets)
        assert np.array_equal(ca, cb)

    def test_noiseless_interpolation_possible(self):
        reg, coeffs = generate_sparse_regression(3, 2, 0.5, 0.0, 200, seed=1)
        assert reg.value(coeffs) <= 1e-18

    def test_density_controls_support(self):
        _, coeffs = generate_sparse_regression(4, 3, 0.05, 0.0, 10, seed=2)
        m = len(coeffs)
        assert (coeffs != 0).sum() == max(1, math.ceil(0.05 * m))
        assert all(0 < c < 10 for c in coeffs[coeffs != 0])

    def test_repeated_value_bit_identical(self):
        reg, coeffs = generate_sparse_regression(3, 2, 0.3, 0.1, 40, seed=3)
        x = np.linspace(-1, 1, reg.n_features)
        assert reg.value(x) == reg.value(x)
        g1 = np.empty(reg.n_features)
        g2 = np.empty(reg.n_features)
        reg.gradient(g1, x)
        reg.gradient(g2, x)
        assert np.array_equal(g1, g2)


class TestMatrixCompletion:
    def test_fully_observed_noiseless_optimum(self):
        inst = matrix_completion_instance(6, 5, 2, 0.99, 0.0, seed=4)
        # nearly everything observed; at the true matrix the fit is exact
        assert inst.objective.value(inst.full_matrix) == 0.0
        grad = np.empty((6, 5))
        inst.objective.gradient(grad, inst.full_matrix)
        assert np.all(grad == 0.0)

    def test_gradient_matches_finite_differences(self):
        inst = matrix_completion_instance(8, 7, 3, 0.4, 0.1, seed=5)
        rng = np.random.default_rng(6)
        x = rng.standard_normal((8, 7))
        err = finite_diff_check(inst.objective.value, inst.objective.gradient, x)
        assert err <= 1e-5

    def test_uncovered_warning_flag(self):
        inst = matrix_completion_instance(30, 30, 2, 0.02, 0.0, seed=7)
        assert inst.uncovered_lines

    def test_radius_is_ten_sigma_max(self):
        inst = matrix_completion_instance(6, 5, 2, 0.5, 0.0, seed=8)
        sigma = float(np.linalg.svd(inst.full_matrix, compute_uv=False)[0])
        assert inst.suggested_radius == pytest.approx(10.0 * sigma)

    def test_rank_bounds(self):
        with pytest.raises(ValueError):
            matrix_completion_instance(4, 3, 5, 0.5, 0.0)


class TestStochasticOracle:
    def test_full_batch_without_replacement_equals_full_gradient(self):
        rng = np.random.default_rng(9)
        oracle = StochasticLinearOracle(
            rng.standard_normal((30, 4)), rng.standard_normal(30), seed=10
        )
        x = rng.standard_normal(4)
        full = np.empty(4)
        oracle.gradient(full, x)
        # without replacement, a pool-sized batch is a permutation of the pool
        est = np.empty(4)
        sample_batch(oracle, x, oracle.pool_size, est, replace=False)
        assert np.allclose(est, full, rtol=1e-10, atol=1e-12)

    def test_single_sample_mean_near_full_gradient(self):
        rng = np.random.default_rng(11)
        oracle = StochasticLinearOracle(
            rng.standard_normal((25, 3)), rng.standard_normal(25), seed=12
        )
        x = np.array([0.2, -0.4, 0.1])
        full = np.empty(3)
        oracle.gradient(full, x)
        draws = np.empty((10_000, 3))
        buf = np.empty(3)
        for k in range(draws.shape[0]):
            oracle.sample_batch(x, 1, buf)
            draws[k] = buf
        mean = draws.mean(axis=0)
        sem = draws.std(axis=0, ddof=1) / math.sqrt(draws.shape[0])
        assert np.all(np.abs(mean - full) <= 3.0 * sem + 1e-12)

    def test_constant_pool(self):
        features = np.tile(np.array([1.0, 2.0]), (7, 1))
        targets = np.full(7, 3.0)
        oracle = StochasticLinearOracle(features, targets, seed=13)
        x = np.array([0.5, 0.5])
        expected = np.empty(2)
        oracle.gradient(expected, x)
        got = np.empty(2)
        for batch in (1, 3, 7):
            oracle.sample_batch(x, batch, got)
            assert np.allclose(got, expected)

    def test_zero_batch_rejected(self):
        oracle = StochasticLinearOracle(np.ones((3, 2)), np.ones(3), seed=0)
        with pytest.raises(ValueError):
            oracle.sample_batch(np.zeros(2), 0, np.empty(2))


class TestFiniteDiff:
    def test_pure_quadratic(self):
        obj = SquaredDistance(np.zeros(5))
        rng = np.random.default_rng(14)
        err = finite_diff_check(obj.value, obj.gradient, rng.standard_normal(5))
        assert err <= 1e-8

    def test_regression_instance(self):
        reg, _ = generate_sparse_regression(3, 2, 0.3, 0.2, 60, seed=15)
        rng = np.random.default_rng(16)
        err = finite_diff_check(reg.value, reg.gradient, rng.standard_normal(reg.n_features))
        assert err <= 1e-5

    def test_linear_objective_machine_precision(self):
        c = np.array([1.0, -2.0, 3.0])

        class Linear:
            def value(self, x):
                return float(c.dot(x))

            def gradient(self, out, x):
                out[...] = c
                return out

        obj = Linear()
        err = finite_diff_check(obj.value, obj.gradient, np.zeros(3))
        assert err <= 1e-9

    def test_large_dimension_samples_coordinates(self):
        obj = SquaredDistance(np.zeros(500))
        err = finite_diff_check(obj.value, obj.gradient, np.ones(500))
        assert err <= 1e-7


class TestInstanceSerialization:
    def test_roundtrip_polyreg(self, tmp_path):
        path = tmp_path / "inst.json"
        save_instance(path, "polyreg", n_vars=3, degree=2, density=0.3,
                      noise_sigma=0.1, n_samples=40, seed=21)
        reg, coeffs = load_instance(path)
        ref, ref_coeffs = generate_sparse_regression(3, 2, 0.3, 0.1, 40, seed=21)
        assert np.array_equal(reg.features, ref.features)
        assert np.array_equal(coeffs, ref_coeffs)

    def test_roundtrip_matcomp_with_index_list(self, tmp_path):
        inst = matrix_completion_instance(5, 4, 2, 0.4, 0.0, seed=22)
        path = tmp_path / "mc.json"
        save_instance(path, "matcomp", n_rows=5, n_cols=4, rank=2,
                      fraction_observed=0.4, noise_sigma=0.0, seed=22,
                      observed_rows=inst.objective.rows.tolist())
        rebuilt = load_instance(path)
        assert np.array_equal(rebuilt.objective.rows, inst.objective.rows)
        assert np.array_equal(rebuilt.objective.values, inst.objective.values)

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            instance_to_dict("mystery", seed=0)
