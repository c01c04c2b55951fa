import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qlifnet.neuron import (
    DecayMode,
    LifConfig,
    QlifConfig,
    QlifInput,
    decay_angle,
    lif_step,
    memory_angle,
    qlif_step,
    qlif_step_backward,
    run_lif_trace,
    run_qlif_trace,
)

ROT = QlifConfig(decay_mode=DecayMode.ROTATION)
EXP = QlifConfig(decay_mode=DecayMode.EXPONENTIAL)

populations = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)
delays = st.floats(min_value=0.0, max_value=10.0, allow_nan=False)


class TestAngles:
    def test_memory_angle_values(self):
        assert memory_angle(0.0) == 0.0
        assert memory_angle(1.0) == pytest.approx(np.pi, abs=1e-15)
        assert memory_angle(0.5) == pytest.approx(np.pi / 2, abs=1e-15)

    def test_decay_angle_values(self):
        assert decay_angle(0.0, 1.0, 1.0) == 0.0
        assert decay_angle(0.5, 0.0, 1.0) == pytest.approx(-np.pi / 2, abs=1e-15)
        # exp(-ln 2) = 1/2, sqrt(0.25) = 0.5, arcsin(0.5) = pi/6
        assert decay_angle(0.5, np.log(2.0), 1.0) == pytest.approx(-np.pi / 3, abs=1e-15)

    @given(populations)
    def test_memory_angle_range(self, alpha):
        phi = memory_angle(alpha)
        assert 0.0 <= phi <= np.pi

    @given(populations, delays)
    def test_decay_angle_range(self, alpha, tau):
        gamma = decay_angle(alpha, tau, 1.0)
        assert -np.pi <= gamma <= 0.0

    def test_domain_error_beyond_tolerance(self):
        with pytest.raises(ValueError):
            memory_angle(1.0 + 1e-9)
        with pytest.raises(ValueError):
            memory_angle(-1e-6)
        # within the 1e-12 slack, values are clipped rather than rejected
        assert memory_angle(1.0 + 1e-13) == pytest.approx(np.pi)

    def test_vectorized(self):
        np.testing.assert_allclose(
            memory_angle([0.0, 0.5, 1.0]), [0.0, np.pi / 2, np.pi], atol=1e-15
        )


class TestQlifStep:
    def test_full_flip_fires(self):
        cfg = QlifConfig(threshold=0.9)
        alpha_new, spike, pre = qlif_step(0.0, 1, np.pi, 0.0, cfg)
        assert pre == pytest.approx(1.0, abs=1e-15)
        assert spike == 1.0
        assert alpha_new == 0.0

    def test_spike_on_half_population(self):
        # R_X(pi/2) after the memory gate for alpha = 0.5 lands on population
        # 1 (checked against the density-matrix oracle in test_oracle).
        cfg = QlifConfig(threshold=0.9)
        _, spike, pre = qlif_step(0.5, 1, np.pi / 2, 0.0, cfg)
        assert pre == pytest.approx(1.0, abs=1e-12)
        assert spike == 1.0

    def test_rotation_decay_worked_value(self):
        _, spike, pre = qlif_step(0.5, 0, 0.0, np.log(2.0), QlifConfig(threshold=0.9))
        assert pre == pytest.approx((2.0 - np.sqrt(3.0)) / 4.0, abs=1e-12)
        assert spike == 0.0

    def test_exponential_decay_worked_value(self):
        cfg = QlifConfig(threshold=0.9, decay_mode=DecayMode.EXPONENTIAL)
        _, spike, pre = qlif_step(0.5, 0, 0.0, np.log(2.0), cfg)
        assert pre == pytest.approx(0.25, abs=1e-12)
        assert spike == 0.0

    def test_threshold_tie_does_not_fire(self):
        # alpha' lands exactly on the threshold: strict comparison, no spike.
        theta = 2.0 * np.arcsin(np.sqrt(0.5))
        _, _, pre = qlif_step(0.0, 1, theta, 0.0, QlifConfig(threshold=0.9))
        cfg = QlifConfig(threshold=float(pre))
        alpha_new, spike, pre2 = qlif_step(0.0, 1, theta, 0.0, cfg)
        assert pre2 == pre
        assert spike == 0.0
        assert alpha_new == pre2

    def test_negative_delay_clamped(self):
        _, _, pre = qlif_step(0.5, 0, 0.0, -3.0, EXP)
        assert pre == pytest.approx(0.5)

    def test_negative_rotation_allowed(self):
        _, _, pre = qlif_step(0.0, 1, -np.pi / 2, 0.0, ROT)
        assert pre == pytest.approx(0.5, abs=1e-15)

    @given(populations, st.floats(0.0, 2 * np.pi), delays, st.booleans(), st.booleans())
    @settings(max_examples=200)
    def test_population_stays_in_unit_interval(self, alpha, theta, tau, x, exponential):
        cfg = EXP if exponential else ROT
        alpha_new, spike, pre = qlif_step(alpha, int(x), theta, tau, cfg)
        assert 0.0 <= float(pre) <= 1.0
        assert 0.0 <= float(alpha_new) <= 1.0
        if spike == 1.0:
            assert alpha_new == 0.0

    @given(st.floats(1e-3, 1.0 - 1e-3), st.floats(1e-3, 10.0), st.booleans())
    @settings(max_examples=200)
    def test_no_spike_strictly_decreases(self, alpha, tau, exponential):
        cfg = EXP if exponential else ROT
        _, _, pre = qlif_step(alpha, 0, 0.0, tau, cfg)
        assert float(pre) < alpha

    @given(st.floats(0.0, 1.0))
    def test_zero_delay_modes_differ(self, alpha):
        # Exponential relaxation over zero time is the identity; the
        # counter-rotation form cancels the memory gate entirely.
        _, _, pre_exp = qlif_step(alpha, 0, 0.0, 0.0, EXP)
        _, _, pre_rot = qlif_step(alpha, 0, 0.0, 0.0, ROT)
        assert float(pre_exp) == pytest.approx(alpha, abs=1e-12)
        assert float(pre_rot) == pytest.approx(0.0, abs=1e-12)

    def test_spike_branch_monotone_in_theta_from_ground(self):
        thetas = np.linspace(1e-3, np.pi, 200)
        _, _, pre = qlif_step(np.zeros_like(thetas), 1, thetas, 0.0, ROT)
        assert np.all(np.diff(pre) > 0)
        assert np.all((pre > 0) & (pre <= 1))

    @given(st.floats(1e-4, 0.6), st.floats(1e-3, np.pi / 4))
    @settings(max_examples=200)
    def test_spike_branch_monotone_rise(self, alpha, theta):
        phi = memory_angle(alpha)
        if theta + phi > np.pi:
            return
        _, _, pre = qlif_step(alpha, 1, theta, 0.0, ROT)
        assert float(pre) > alpha


class TestQlifStepBackward:
    @pytest.mark.parametrize("mode", [DecayMode.ROTATION, DecayMode.EXPONENTIAL])
    def test_matches_finite_differences(self, mode):
        cfg = QlifConfig(decay_mode=mode)
        rng = np.random.default_rng(11)
        h = 1e-5
        for _ in range(100):
            alpha = rng.uniform(0.05, 0.95)
            theta = rng.uniform(-3.0, 3.0)
            tau = rng.uniform(0.05, 2.0)
            x = int(rng.integers(0, 2))
            d_alpha, d_theta, d_tau = qlif_step_backward(alpha, x, theta, tau, cfg)

            def pre(a, th, ta):
                return float(qlif_step(a, x, th, ta, cfg)[2])

            fd_alpha = (pre(alpha + h, theta, tau) - pre(alpha - h, theta, tau)) / (2 * h)
            fd_theta = (pre(alpha, theta + h, tau) - pre(alpha, theta - h, tau)) / (2 * h)
            fd_tau = (pre(alpha, theta, tau + h) - pre(alpha, theta, tau - h)) / (2 * h)
            for analytic, numeric in (
                (d_alpha, fd_alpha),
                (d_theta, fd_theta),
                (d_tau, fd_tau),
            ):
                assert abs(float(analytic) - numeric) <= 1e-4 * max(abs(numeric), 1e-8)

    def test_spike_branch_known_values(self):
        d_alpha, d_theta, d_tau = qlif_step_backward(0.0, 1, np.pi, 0.0, ROT)
        assert d_theta == pytest.approx(0.0, abs=1e-12)  # peak of sin^2
        assert d_tau == 0.0
        _, d_theta, _ = qlif_step_backward(0.0, 1, np.pi / 2, 0.0, ROT)
        assert d_theta == pytest.approx(0.5, abs=1e-12)

    def test_exponential_decay_partials(self):
        d_alpha, d_theta, d_tau = qlif_step_backward(0.5, 0, 0.0, np.log(2.0), EXP)
        assert d_alpha == pytest.approx(0.5, abs=1e-12)
        assert d_tau == pytest.approx(-0.25, abs=1e-12)
        assert d_theta == 0.0


class TestLifStep:
    def test_pure_decay(self):
        cfg = LifConfig(beta=0.9, u_thr=10.0)
        u, spike = lif_step(1.0, 0, 0, 0.0, cfg)
        assert u == pytest.approx(0.9)
        assert spike == 0.0

    def test_input_only(self):
        cfg = LifConfig(beta=0.9, u_thr=0.4)
        u, spike = lif_step(0.0, 0, 1, 0.5, cfg)
        assert u == pytest.approx(0.5)
        assert spike == 1.0

    def test_subtraction_reset(self):
        cfg = LifConfig(beta=0.9, u_thr=0.4)
        u, spike = lif_step(0.5, 1, 0, 0.0, cfg)
        assert u == pytest.approx(0.05)
        assert spike == 0.0

    def test_beta_toward_zero_reduces_to_weighted_input(self):
        cfg = LifConfig(beta=1e-12, u_thr=5.0)
        u, _ = lif_step(3.0, 0, 1, 0.7, cfg)
        assert u == pytest.approx(0.7, abs=1e-9)


class TestTraces:
    def test_empty_input(self):
        trace = run_qlif_trace([], 1.0, 0.1, ROT)
        assert len(trace) == 0
        assert trace.records() == []

    def test_all_zero_train_stays_grounded(self):
        trace = run_qlif_trace(np.zeros(20), np.pi / 2, 0.5, ROT)
        assert np.all(trace.value == 0.0)
        assert np.all(trace.spike == 0)

    @pytest.mark.parametrize("mode", [DecayMode.ROTATION, DecayMode.EXPONENTIAL])
    def test_matches_per_step_calls(self, mode):
        cfg = QlifConfig(decay_mode=mode)
        rng = np.random.default_rng(3)
        xs = (rng.random(60) < 0.5).astype(float)
        trace = run_qlif_trace(xs, np.pi / 2, 0.3, cfg)
        alpha = 0.0
        for t in range(60):
            alpha, spike, pre = qlif_step(alpha, xs[t], np.pi / 2, 0.3, cfg)
            assert trace.value[t] == pre
            assert trace.spike[t] == spike

    def test_alpha_moves_in_the_right_direction(self):
        rng = np.random.default_rng(5)
        xs = (rng.random(60) < 0.5).astype(float)
        trace = run_qlif_trace(xs, np.pi / 2, 0.3, QlifConfig(threshold=0.5))
        alpha = 0.0
        for t in range(60):
            if xs[t] == 1:
                assert trace.value[t] > alpha
            elif alpha > 0:
                assert trace.value[t] < alpha
            else:
                assert trace.value[t] == 0.0
            alpha = 0.0 if trace.spike[t] else trace.value[t]

    def test_lif_trace_matches_steps(self):
        cfg = LifConfig(beta=0.8, u_thr=0.6)
        rng = np.random.default_rng(9)
        xs = (rng.random(30) < 0.5).astype(float)
        trace = run_lif_trace(xs, 0.35, cfg)
        u, s_prev = 0.0, 0.0
        for t in range(30):
            u, spike = lif_step(u, s_prev, xs[t], 0.35, cfg)
            assert trace.value[t] == u
            assert trace.spike[t] == spike
            s_prev = spike


class TestConfigValidation:
    def test_threshold_bounds(self):
        with pytest.raises(ValueError):
            QlifConfig(threshold=0.0)
        with pytest.raises(ValueError):
            QlifConfig(threshold=1.0)

    def test_t1_positive(self):
        with pytest.raises(ValueError):
            QlifConfig(t1=0.0)

    def test_epsilon_window(self):
        with pytest.raises(ValueError):
            QlifConfig(epsilon=1e-2)

    def test_decay_mode_from_string(self):
        assert QlifConfig(decay_mode="exponential").decay_mode is DecayMode.EXPONENTIAL

    def test_lif_beta_bounds(self):
        with pytest.raises(ValueError):
            LifConfig(beta=1.0, u_thr=1.0)

    def test_input_validation(self):
        with pytest.raises(ValueError):
            QlifInput(x=2, theta=0.0, tau=0.0)
        with pytest.raises(ValueError):
            QlifInput(x=1, theta=0.0, tau=-0.5)
