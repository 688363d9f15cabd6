"""Problem oracles: analytic gradients vs finite differences, noise
models, scale invariance, and batching contracts."""

import math

import numpy as np
import pytest

from sfplus.errors import BatchTooLarge, ConfigInvalid
from sfplus.problems import (
    logistic_synthetic,
    make_problem,
    nonsmooth_valley,
    normalized_mlp,
    quadratic,
)


def fd_check(problem, w, coords=None, h=1e-6, seed=0, batch_size=None):
    """Max relative error of analytic gradient vs central differences."""
    _, g = problem.oracle(w, seed=seed, batch_size=batch_size)
    coords = range(len(w)) if coords is None else coords
    worst = 0.0
    for i in coords:
        step = h * max(1.0, abs(w[i]))
        wp, wm = w.copy(), w.copy()
        wp[i] += step
        wm[i] -= step
        lp, _ = problem.oracle(wp, seed=seed, batch_size=batch_size)
        lm, _ = problem.oracle(wm, seed=seed, batch_size=batch_size)
        fd = (lp - lm) / (2 * step)
        worst = max(worst, abs(fd - g[i]) / max(abs(g[i]), 1e-8))
    return worst


# -------------------------------------------------------------- quadratic


class TestQuadratic:
    def test_one_dim_oracle(self):
        p = quadratic(1, condition_number=1.0, noise_std=0.0)
        loss, grad = p.oracle(np.array([2.0]))
        assert loss == 2.0
        assert grad[0] == 2.0

    def test_minimizer_and_f_star(self):
        p = quadratic(5, condition_number=10.0)
        loss, grad = p.oracle(p.minimizer)
        assert loss == p.f_star == 0.0
        np.testing.assert_array_equal(grad, 0.0)

    def test_spectrum_spans_condition_number(self):
        p = quadratic(4, condition_number=100.0)
        e = np.eye(4)
        curvs = [p.oracle(e[i])[1][i] for i in range(4)]
        assert curvs[0] == pytest.approx(1.0)
        assert curvs[-1] == pytest.approx(100.0)
        assert np.all(np.diff(curvs) > 0)

    def test_noise_variance_scales_inverse_batch(self):
        p = quadratic(1, noise_std=2.0)
        w = np.zeros(1)
        for b in (1, 4, 16):
            draws = np.array(
                [p.oracle(w, seed=s, batch_size=b)[1][0] for s in range(4000)]
            )
            assert draws.var() == pytest.approx(4.0 / b, rel=0.15)
            assert abs(draws.mean()) < 3 * 2.0 / math.sqrt(b * 4000)

    def test_full_batch_is_noise_free(self):
        p = quadratic(3, noise_std=5.0)
        w = np.array([1.0, -2.0, 0.5])
        _, g1 = p.oracle(w, seed=1)
        _, g2 = p.oracle(w, seed=2)
        np.testing.assert_array_equal(g1, g2)

    def test_gradient_matches_finite_differences(self):
        p = quadratic(8, condition_number=25.0)
        w = np.random.default_rng(0).standard_normal(8)
        assert fd_check(p, w) < 1e-7

    def test_loss_never_below_f_star(self):
        p = quadratic(6, condition_number=30.0, noise_std=1.0)
        rng = np.random.default_rng(4)
        for _ in range(50):
            loss, _ = p.oracle(rng.standard_normal(6), seed=1, batch_size=2)
            assert loss >= p.f_star - 1e-12

    def test_bad_params_rejected(self):
        with pytest.raises(ConfigInvalid):
            quadratic(0)
        with pytest.raises(ConfigInvalid):
            quadratic(2, condition_number=0.5)
        with pytest.raises(ConfigInvalid):
            quadratic(2, noise_std=-1.0)


# --------------------------------------------------------- nonsmooth L1


class TestNonsmoothValley:
    def test_origin(self):
        p = nonsmooth_valley(3)
        loss, grad = p.oracle(np.zeros(3))
        assert loss == 0.0
        np.testing.assert_array_equal(grad, 0.0)

    def test_two_coordinate_oracle(self):
        p = nonsmooth_valley(2)
        loss, grad = p.oracle(np.array([1.0, -2.0]))
        assert loss == 3.0
        np.testing.assert_array_equal(grad, [1.0, -1.0])

    def test_subgradient_away_from_kinks(self):
        p = nonsmooth_valley(5)
        w = np.random.default_rng(1).standard_normal(5) + 3.0  # all positive
        assert fd_check(p, w) < 1e-8

    def test_init_point_off_origin(self):
        p = nonsmooth_valley(4)
        w0 = p.init_point(7)
        assert np.all(np.abs(w0) >= 1.0)
        np.testing.assert_array_equal(w0, p.init_point(7))


# ------------------------------------------------------------- logistic


class TestLogisticSynthetic:
    def test_zero_weights_loss_is_ln2(self):
        p = logistic_synthetic(6, n_samples=128, seed=3)
        loss, _ = p.oracle(np.zeros(6))
        assert loss == pytest.approx(math.log(2.0), rel=1e-12)

    def test_gradient_matches_finite_differences(self):
        p = logistic_synthetic(5, n_samples=64, seed=1)
        w = np.random.default_rng(2).standard_normal(5) * 0.5
        assert fd_check(p, w) < 1e-6
        assert fd_check(p, np.zeros(5)) < 1e-6

    def test_minibatch_gradient_matches_finite_differences(self):
        p = logistic_synthetic(4, n_samples=64, seed=1)
        w = np.random.default_rng(3).standard_normal(4) * 0.3
        assert fd_check(p, w, seed=11, batch_size=8) < 1e-6

    def test_full_batch_deterministic_across_seeds(self):
        p = logistic_synthetic(4, n_samples=32, seed=0)
        w = np.ones(4) * 0.2
        l1, g1 = p.oracle(w, seed=1)
        l2, g2 = p.oracle(w, seed=99)
        assert l1 == l2
        np.testing.assert_array_equal(g1, g2)

    def test_batch_too_large(self):
        p = logistic_synthetic(4, n_samples=16)
        with pytest.raises(BatchTooLarge):
            p.oracle(np.zeros(4), seed=0, batch_size=17)

    def test_minibatch_oracle_unbiased(self):
        p = logistic_synthetic(3, n_samples=64, seed=5)
        w = np.random.default_rng(6).standard_normal(3) * 0.4
        _, g_full = p.oracle(w)
        draws = np.array(
            [p.oracle(w, seed=s, batch_size=8)[1] for s in range(10_000)]
        )
        se = draws.std(axis=0, ddof=1) / math.sqrt(draws.shape[0])
        assert np.all(np.abs(draws.mean(axis=0) - g_full) <= 3 * se)


# --------------------------------------------------------- normalized MLP


class TestNormalizedMlp:
    def test_scale_invariance_per_block(self):
        p = normalized_mlp(width=16, depth=3, seed=0)
        w = p.init_point(1)
        base, _ = p.oracle(w)
        for b in p.blocks:
            w2 = w.copy()
            w2[b] *= 2.0
            scaled, _ = p.oracle(w2)
            assert abs(scaled - base) <= 1e-10 * max(1.0, abs(base))
        w3 = w * 5.0  # all blocks at once
        scaled, _ = p.oracle(w3)
        assert abs(scaled - base) <= 1e-10 * max(1.0, abs(base))

    def test_gradient_orthogonal_to_each_block(self):
        p = normalized_mlp(width=16, depth=3, seed=2)
        w = p.init_point(4)
        _, g = p.oracle(w)
        for b in p.blocks:
            dot = abs(float(np.dot(g[b], w[b])))
            assert dot <= 1e-8 * max(1.0, np.linalg.norm(g[b]) * np.linalg.norm(w[b]))

    def test_gradient_matches_finite_differences(self):
        p = normalized_mlp(width=12, depth=3, seed=1)
        w = p.init_point(9)
        rng = np.random.default_rng(10)
        coords = rng.choice(p.dim, size=100, replace=False)
        assert fd_check(p, w, coords=coords) < 1e-5

    def test_minibatch_gradient_matches_finite_differences(self):
        p = normalized_mlp(width=8, depth=2, seed=1)
        w = p.init_point(2)
        coords = np.random.default_rng(0).choice(p.dim, size=40, replace=False)
        assert fd_check(p, w, coords=coords, seed=13, batch_size=16) < 1e-5

    def test_minibatch_oracle_unbiased(self):
        p = normalized_mlp(width=8, depth=2, seed=3, n_samples=64)
        w = p.init_point(5)
        _, g_full = p.oracle(w)
        draws = np.array(
            [p.oracle(w, seed=s, batch_size=8)[1] for s in range(10_000)]
        )
        se = draws.std(axis=0, ddof=1) / math.sqrt(draws.shape[0])
        # aggregate 3-SE check over the 144 coordinates
        assert np.linalg.norm(draws.mean(axis=0) - g_full) <= 3 * np.linalg.norm(se)

    def test_block_layout_and_norms(self):
        p = normalized_mlp(width=4, depth=2, seed=0, d_in=3)
        assert p.dim == 4 * 3 + 4 * 4
        assert len(p.blocks) == 2
        w = p.init_point(0)
        norms = p.block_norms(w)
        np.testing.assert_allclose(norms, 1.0, rtol=1e-12)

    def test_batch_too_large(self):
        p = normalized_mlp(width=4, depth=2, seed=0, n_samples=32)
        with pytest.raises(BatchTooLarge):
            p.oracle(p.init_point(0), seed=0, batch_size=33)

    def test_desk_scale_cap(self):
        with pytest.raises(ConfigInvalid):
            normalized_mlp(width=400, depth=3)


# --------------------------------------------------------------- registry


class TestRegistry:
    def test_known_kinds(self):
        p = make_problem("quadratic", d=3, condition_number=2.0)
        assert p.dim == 3
        p = make_problem("normalized_mlp", width=4, depth=2)
        assert p.dim == 4 * 8 + 16

    def test_unknown_kind(self):
        with pytest.raises(ConfigInvalid):
            make_problem("rosenbrock")

    def test_bad_parameters(self):
        with pytest.raises(ConfigInvalid):
            make_problem("quadratic", dimension=3)

    def test_determinism_of_oracles(self):
        for p in (
            quadratic(4, noise_std=1.0),
            logistic_synthetic(4, n_samples=32),
            normalized_mlp(width=4, depth=2),
        ):
            w = p.init_point(3)
            a = p.oracle(w, seed=42, batch_size=4)
            b = p.oracle(w, seed=42, batch_size=4)
            assert a[0] == b[0]
            np.testing.assert_array_equal(a[1], b[1])
