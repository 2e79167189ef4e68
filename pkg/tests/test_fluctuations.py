import math

import numpy as np
import pytest

from torusclusters.fluctuations import (
    FluctuationConfig,
    StableRegimeError,
    covariance_profile,
    mode_variance,
    oscillation_amplitude,
    perturbation_covariance,
    predict_onset_time,
)
from torusclusters.linalg import expm
from torusclusters.potentials import Gaussian
from torusclusters.stability import StabilityConfig, assemble_operator

BOX = 10.0


def make_cfg(beta=25.0, gamma=1.0, hermite_dim=24, n_wavenumbers=8, quadrature_points=64):
    st = StabilityConfig(
        potential=Gaussian(0.5),
        box=BOX,
        beta=beta,
        gamma=gamma,
        hermite_dim=hermite_dim,
        n_wavenumbers=n_wavenumbers,
    )
    return FluctuationConfig(stability=st, quadrature_points=quadrature_points)


def euler_maruyama_mode_variance(st, t, k, n_paths, dt, seed):
    """Monte-Carlo oracle for E||c(t,k)||^2 on the truncated linear SDE.

    dc = A c dt + 2 sqrt(gamma) B d(W + i Wtilde), identity initial
    covariance (complex circular).  Returns (mean, standard error).
    """
    rng = np.random.default_rng(seed)
    m = st.hermite_dim
    a_t = assemble_operator(st, k).T
    bdiag = np.arange(m, dtype=float)
    c = (rng.standard_normal((n_paths, m)) + 1j * rng.standard_normal((n_paths, m))) / math.sqrt(2.0)
    n_steps = int(round(t / dt))
    noise_scale = 2.0 * math.sqrt(st.gamma) * math.sqrt(dt) * bdiag
    for _ in range(n_steps):
        xi = rng.standard_normal((n_paths, m)) + 1j * rng.standard_normal((n_paths, m))
        c = c + dt * (c @ a_t) + noise_scale * xi
    sq = np.sum(np.abs(c) ** 2, axis=1)
    return float(sq.mean()), float(sq.std(ddof=1) / math.sqrt(n_paths))


class TestModeVariance:
    def test_initial_value_is_truncation_dim(self):
        cfg = make_cfg(hermite_dim=17)
        assert mode_variance(cfg, 0.0, 2 * np.pi / BOX) == 17.0

    def test_gamma_zero_is_propagator_term_only(self):
        cfg = make_cfg(gamma=0.0, hermite_dim=12)
        k = 2 * np.pi / BOX
        a = assemble_operator(cfg.stability, k)
        t = 1.5
        expected = float(np.sum(np.abs(expm(t * a)) ** 2))
        assert mode_variance(cfg, t, k) == pytest.approx(expected, rel=1e-12)

    def test_matches_monte_carlo_oracle(self):
        cfg = make_cfg(hermite_dim=8, quadrature_points=32)
        k = 2 * np.pi / BOX
        t = 1.0
        mc, se = euler_maruyama_mode_variance(cfg.stability, t, k, n_paths=4000, dt=1e-3, seed=11)
        exact = mode_variance(cfg, t, k)
        assert abs(exact - mc) < 3.0 * se

    def test_continuity_in_t(self):
        cfg = make_cfg(hermite_dim=12)
        k = 2 * np.pi / BOX
        base = mode_variance(cfg, 2.0, k)
        for delta in (1e-2, 1e-3):
            assert abs(mode_variance(cfg, 2.0 + delta, k) - base) < 50 * delta * max(1.0, base)

    def test_bounded_in_stable_regime(self):
        cfg = make_cfg(beta=3.0, hermite_dim=16, n_wavenumbers=4)
        ks = [2 * np.pi * n / BOX for n in (1, 2, 4)]
        for k in ks:
            vals = [mode_variance(cfg, t, k) for t in (5.0, 40.0, 100.0)]
            assert max(vals) < 2000.0
            # saturated, not growing: late values comparable
            assert vals[2] < 1.5 * vals[1] + 1.0

    def test_quadrature_order_converged(self):
        k = 2 * np.pi / BOX
        v64 = mode_variance(make_cfg(quadrature_points=64), 2.0, k)
        v128 = mode_variance(make_cfg(quadrature_points=128), 2.0, k)
        assert abs(v64 - v128) < 1e-8 * max(1.0, abs(v128))

    def test_truncation_converged_in_growth_regime(self):
        # Each damped Hermite mode contributes ~4m of saturated noise, so the
        # raw variance carries an O(M^2) floor; the growing component that
        # every downstream quantity relies on is truncation-converged once it
        # dominates that floor.
        k2 = 2 * np.pi * 2 / BOX
        t = 80.0
        v40 = mode_variance(make_cfg(hermite_dim=40), t, k2)
        v80 = mode_variance(make_cfg(hermite_dim=80), t, k2)
        assert v40 == pytest.approx(v80, rel=1e-3)

    def test_rejects_negative_time(self):
        with pytest.raises(ValueError):
            mode_variance(make_cfg(), -1.0, 2 * np.pi / BOX)


class TestCovarianceProfile:
    def test_symmetric_in_offset(self):
        cfg = make_cfg(hermite_dim=12, n_wavenumbers=6)
        for dx in (0.7, 2.3, 4.9):
            assert perturbation_covariance(cfg, 1.0, dx) == pytest.approx(
                perturbation_covariance(cfg, 1.0, -dx), abs=1e-10
            )

    def test_initially_peaked_at_coincidence(self):
        cfg = make_cfg(hermite_dim=12, n_wavenumbers=10)
        near = perturbation_covariance(cfg, 0.05, 0.0)
        far = perturbation_covariance(cfg, 0.05, BOX / 2)
        assert near > 10.0 * abs(far)

    def test_late_time_single_cosine(self):
        # Modes 2 and 3 grow within 12% of each other here, so single-mode
        # dominance (and the cosine-wave profile) emerges only deep into the
        # growth regime.
        cfg = make_cfg(hermite_dim=24, n_wavenumbers=8)
        t = 160.0
        assert oscillation_amplitude(cfg, t) > 100.0 * oscillation_amplitude(cfg, 0.5)
        dx = np.linspace(0.0, BOX, 128, endpoint=False)
        profile = covariance_profile(cfg, t, dx)
        spectrum = np.fft.rfft(profile - profile.mean())
        dominant = np.argmax(np.abs(spectrum[1:])) + 1
        fit = profile.mean() + 2.0 * np.real(
            spectrum[dominant] * np.exp(2j * np.pi * dominant * np.arange(128) / 128)
        ) / 128
        rel_l2 = np.linalg.norm(profile - fit) / np.linalg.norm(profile - profile.mean())
        assert rel_l2 < 0.05

    def test_real_output(self):
        cfg = make_cfg(hermite_dim=12, n_wavenumbers=6)
        profile = covariance_profile(cfg, 1.0, np.linspace(-5, 5, 21))
        assert profile.dtype == np.float64


class TestOscillationAmplitude:
    def test_grows_in_unstable_regime(self):
        cfg = make_cfg(hermite_dim=24, n_wavenumbers=6)
        a1 = oscillation_amplitude(cfg, 20.0)
        a2 = oscillation_amplitude(cfg, 30.0)
        assert a2 > a1

    def test_bounded_in_stable_regime(self):
        cfg = make_cfg(beta=3.0, hermite_dim=16, n_wavenumbers=6)
        amps = [oscillation_amplitude(cfg, t) for t in (5.0, 25.0, 50.0)]
        assert max(amps) < 10.0 * (amps[0] + 1.0)

    def test_log_slope_matches_growth_rate(self):
        from torusclusters.stability import psi_max

        cfg = make_cfg(hermite_dim=30, n_wavenumbers=4)
        psi = psi_max(cfg.stability)
        # late window: the O(M^2) saturated-noise floor is < 1% of the
        # amplitude here, so the pure exponential shows through
        ts = np.linspace(50.0, 65.0, 4)
        amps = np.array([oscillation_amplitude(cfg, t) for t in ts])
        slope = np.polyfit(ts, np.log(amps), 1)[0]
        assert slope == pytest.approx(2.0 * psi, rel=0.05)


class TestOnsetPrediction:
    def test_arithmetic(self):
        assert predict_onset_time(math.e ** 2, 0.5) == pytest.approx(2.0)

    def test_single_particle(self):
        assert predict_onset_time(1, 3.0) == 0.0

    def test_doubling_increment(self):
        psi = 0.7
        delta = predict_onset_time(2000, psi) - predict_onset_time(1000, psi)
        assert delta == pytest.approx(math.log(2.0) / (2 * psi))

    def test_stable_regime_rejected(self):
        with pytest.raises(StableRegimeError):
            predict_onset_time(100, 0.0)
        with pytest.raises(StableRegimeError):
            predict_onset_time(100, -0.3)

    def test_bad_particle_count(self):
        with pytest.raises(ValueError):
            predict_onset_time(0, 1.0)


class TestConfigValidation:
    def test_quadrature_floor(self):
        with pytest.raises(ValueError):
            make_cfg(quadrature_points=4)

    def test_times_must_increase(self):
        st = StabilityConfig(potential=Gaussian(0.5))
        with pytest.raises(ValueError):
            FluctuationConfig(stability=st, times=(0.0, 2.0, 1.0))
        with pytest.raises(ValueError):
            FluctuationConfig(stability=st, times=(-1.0, 2.0))
