"""Schedules, baseline Adam variants, bound evaluator, optimal weights."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sfplus.baselines import (
    BaselineAdam,
    BaselineConfig,
    BoundInput,
    Schedule,
    anytime_bound,
    bound_curve,
    bound_grid_multipliers,
    optimal_weights,
    schedule_multiplier,
    schedule_multipliers,
    schedule_value,
    weight_objective,
)
from sfplus.errors import ConfigInvalid


def sched(kind, T=100, warmup=0, peak=1.0, **kw) -> Schedule:
    return Schedule(
        kind=kind, total_steps=T, warmup_steps=warmup, peak_lr=peak, **kw
    ).validate()


# -------------------------------------------------------------- schedules


class TestSchedules:
    def test_linear_decay_endpoint_zero(self):
        s = sched("linear-decay", T=100)
        assert schedule_value(s, 100) == 0.0
        assert schedule_value(s, 1) == pytest.approx(0.99, rel=1e-15)

    def test_warmup_ramp_exact(self):
        s = sched("constant", T=50, warmup=10, peak=2.0)
        for t in range(1, 11):
            assert schedule_value(s, t) == 2.0 * t / 10
        assert schedule_value(s, 10) == 2.0
        assert schedule_value(s, 37) == 2.0

    def test_wsd_constant_until_anneal_start(self):
        s = sched("wsd", T=100, anneal_fraction=0.1)
        assert schedule_value(s, 90) == 1.0  # last constant step
        assert schedule_value(s, 91) == pytest.approx(0.9, rel=1e-15)
        assert schedule_value(s, 100) == 0.0

    def test_cosine_floor_exact(self):
        s = sched("cosine", T=200, warmup=20, min_ratio=0.1, peak=3.0)
        assert schedule_value(s, 200) == pytest.approx(0.3, rel=1e-15)
        assert schedule_value(s, 20) == 3.0  # warmup end hits the peak

    def test_out_of_range_step_rejected(self):
        s = sched("constant", T=10)
        with pytest.raises(ConfigInvalid):
            schedule_multiplier(s, 0)
        with pytest.raises(ConfigInvalid):
            schedule_multiplier(s, 11)

    @pytest.mark.parametrize("kind", ["constant", "linear-decay", "wsd", "cosine"])
    def test_multipliers_in_unit_interval(self, kind):
        s = sched(kind, T=137, warmup=12)
        m = schedule_multipliers(s)
        assert m.shape == (137,)
        assert np.all(m >= 0.0) and np.all(m <= 1.0)

    @given(
        kind=st.sampled_from(["constant", "linear-decay", "wsd", "cosine"]),
        T=st.integers(2, 300),
        data=st.data(),
    )
    @settings(max_examples=100, deadline=None)
    def test_multiplier_range_property(self, kind, T, data):
        warmup = data.draw(st.integers(0, T - 1))
        s = sched(kind, T=T, warmup=warmup)
        m = schedule_multipliers(s)
        assert np.all((0.0 <= m) & (m <= 1.0))
        if warmup > 0:
            assert m[warmup - 1] == 1.0

    def test_bad_configs_rejected(self):
        for kw in (
            dict(kind="banana", total_steps=10),
            dict(kind="constant", total_steps=0),
            dict(kind="constant", total_steps=10, warmup_steps=11),
            dict(kind="constant", total_steps=10, peak_lr=0.0),
            dict(kind="wsd", total_steps=10, anneal_fraction=0.0),
            dict(kind="cosine", total_steps=10, min_ratio=1.5),
        ):
            with pytest.raises(ConfigInvalid):
                Schedule(**kw).validate()

    def test_bound_grid_stays_positive_for_decay_kinds(self):
        for kind in ("linear-decay", "wsd"):
            s = sched(kind, T=100)
            grid = bound_grid_multipliers(s)
            assert grid.shape == (100,)
            assert np.all(grid > 0.0)
            # same shape as the nominal schedule away from the endpoint
            nominal = schedule_multipliers(s)
            assert np.max(np.abs(grid[:50] - nominal[:50])) < 0.02


# -------------------------------------------------------- baseline adams


def run_baseline(mode, wd, steps=50, schedule=None, seed=0, dim=6, **cfg_kw):
    schedule = schedule or sched("constant", T=steps, peak=0.1)
    cfg = BaselineConfig(mode=mode, schedule=schedule, weight_decay=wd, **cfg_kw)
    rng = np.random.default_rng(seed)
    opt = BaselineAdam(rng.standard_normal(dim), cfg)
    grads = rng.standard_normal((steps, dim))
    for g in grads:
        opt.step(g)
    return opt.w


class TestBaselineAdam:
    def test_zero_decay_modes_coincide(self):
        runs = [run_baseline(m, 0.0) for m in ("adamw", "adamc", "adamc-full")]
        np.testing.assert_array_equal(runs[0], runs[1])
        np.testing.assert_array_equal(runs[0], runs[2])

    def test_coupled_equals_adamw_at_constant_peak(self):
        # constant schedule: lr == lr_max every step, so the coupled decay
        # lr^2/lr_max collapses to lr exactly.
        a = run_baseline("adamw", 0.5)
        b = run_baseline("adamc", 0.5)
        np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-15)

    def test_coupled_equals_full_under_lambda_rescaling(self):
        # constant schedule at peak lr: decay lr^2/lr_max * wd with
        # lr_max = lr equals lr^2 * (wd / lr).
        lr = 0.05
        s = sched("constant", T=80, peak=lr)
        a = run_baseline("adamc", 0.8, steps=80, schedule=s)
        b = run_baseline("adamc-full", 0.8 / lr, steps=80, schedule=s)
        np.testing.assert_allclose(a, b, rtol=1e-12)

    def test_warmup_schedule_applies(self):
        s = sched("constant", T=10, warmup=10, peak=1.0)
        cfg = BaselineConfig(mode="adamw", schedule=s, adam_beta1=0.0)
        opt = BaselineAdam(np.zeros(1), cfg)
        d = opt.step(np.array([1.0]))
        assert d.lr == pytest.approx(0.1, rel=1e-15)

    def test_eval_and_gradient_points_are_w(self):
        cfg = BaselineConfig(mode="adamw", schedule=sched("constant", T=5))
        opt = BaselineAdam(np.array([1.0, 2.0]), cfg)
        assert opt.gradient_point() is opt.w
        assert opt.model_point() is opt.w


# ------------------------------------------------------------- the bound


def brute_force_bound(eta, gamma, D, g2, t):
    """Direct double-loop transcription, used as the oracle."""
    eta = np.asarray(eta, float)[:t]
    g2 = np.full(t, g2) if np.isscalar(g2) else np.asarray(g2, float)[:t]
    etabar = eta.sum()
    term1 = (D**2 + gamma**2 * np.sum(eta**2 * g2)) / (2 * gamma * etabar)
    term2 = 0.0
    for k in range(1, t):  # 1-based k from 1 to t-1
        denom_next = np.sum(eta[k:])  # i = k+1..t
        inner = np.sum(eta[k - 1 :] ** 2 * g2[k - 1 :]) / np.sum(eta[k - 1 :])
        term2 += eta[k - 1] / denom_next * inner
    return term1 + gamma / 2 * term2


class TestAnytimeBound:
    def test_single_step_closed_form(self):
        inp = BoundInput(multipliers=np.array([1.0]), peak=1.0, D=1.0, grad_sq=1.0)
        assert anytime_bound(inp, 1) == pytest.approx(1.0, rel=1e-15)
        inp = BoundInput(multipliers=np.array([1.0]), peak=0.5, D=2.0, grad_sq=3.0)
        expect = (4.0 + 0.25 * 3.0) / (2 * 0.5)
        assert anytime_bound(inp, 1) == pytest.approx(expect, rel=1e-15)

    def test_matches_brute_force_oracle(self):
        rng = np.random.default_rng(2)
        eta = rng.uniform(0.05, 1.0, size=60)
        g2 = rng.uniform(0.5, 2.0, size=60)
        inp = BoundInput(multipliers=eta, peak=0.7, D=1.3, grad_sq=g2)
        for t in (1, 2, 17, 60):
            assert anytime_bound(inp, t) == pytest.approx(
                brute_force_bound(eta, 0.7, 1.3, g2, t), rel=1e-12
            )

    def test_linear_decay_beats_constant_at_horizon(self):
        T = 1000
        const = BoundInput(
            multipliers=bound_grid_multipliers(sched("constant", T=T)),
            peak=1.0,
            D=1.0,
        )
        linear = BoundInput(
            multipliers=bound_grid_multipliers(sched("linear-decay", T=T)),
            peak=1.0,
            D=1.0,
        )
        assert anytime_bound(linear, T) <= anytime_bound(const, T)

    def test_wsd_bound_drops_over_anneal_window(self):
        T = 1000
        s = sched("wsd", T=T, anneal_fraction=0.1)
        inp = BoundInput(multipliers=bound_grid_multipliers(s), peak=1.0, D=1.0)
        anneal_start = T - round(0.1 * T)
        assert anytime_bound(inp, T) < anytime_bound(inp, anneal_start)

    def test_full_curve_matches_pointwise(self):
        eta = bound_grid_multipliers(sched("wsd", T=40))
        inp = BoundInput(multipliers=eta, peak=1.0, D=1.0)
        curve = bound_curve(inp)
        assert curve.shape == (40,)
        assert curve[24] == anytime_bound(inp, 25)

    @given(
        s=st.floats(0.1, 10.0),
        seed=st.integers(0, 1000),
        t=st.integers(1, 30),
    )
    @settings(max_examples=60, deadline=None)
    def test_rescaling_invariance(self, s, seed, t):
        rng = np.random.default_rng(seed)
        eta = rng.uniform(0.1, 1.0, size=30)
        base = BoundInput(multipliers=eta, peak=1.0, D=1.0, grad_sq=2.0)
        # eta -> eta/s requires s >= 1 to stay in [0,1]; rescale downward
        shrink = max(s, 1.0)
        scaled = BoundInput(
            multipliers=eta / shrink, peak=shrink, D=1.0, grad_sq=2.0
        )
        assert anytime_bound(scaled, t) == pytest.approx(
            anytime_bound(base, t), rel=1e-10
        )

    def test_trailing_zeros_rejected(self):
        eta = np.array([1.0, 0.5, 0.0])
        inp = BoundInput(multipliers=eta, peak=1.0, D=1.0)
        with pytest.raises(ConfigInvalid):
            anytime_bound(inp, 3)


# -------------------------------------------------------- optimal weights


class TestOptimalWeights:
    def test_equal_norms_give_uniform(self):
        w = optimal_weights(np.array([3.0, 3.0, 3.0, 3.0]))
        np.testing.assert_allclose(w, 0.25, rtol=1e-15)

    def test_two_point_oracle(self):
        w = optimal_weights(np.array([1.0, 4.0]))
        np.testing.assert_allclose(w, [0.8, 0.2], rtol=1e-14)

    def test_three_point_oracle(self):
        w = optimal_weights(np.array([1.0, 1.0, 9.0]))
        expect = np.array([1.0, 1.0, 1.0 / 9.0])
        np.testing.assert_allclose(w, expect / expect.sum(), rtol=1e-14)

    def test_beats_random_simplex_points(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            T = rng.integers(2, 9)
            g2 = rng.uniform(0.1, 10.0, size=T)
            D = rng.uniform(0.5, 3.0)
            best = weight_objective(optimal_weights(g2, D), g2, D)
            rand = rng.dirichlet(np.ones(T), size=10_000)
            vals = (D * D + (rand**2 * g2).sum(axis=1)) / (2.0 * rand.sum(axis=1))
            assert best <= vals.min() + 1e-12

    def test_rejects_nonpositive(self):
        with pytest.raises(ConfigInvalid):
            optimal_weights(np.array([1.0, 0.0]))
