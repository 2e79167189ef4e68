import math

import numpy as np
import pytest

from torusclusters.potentials import (
    GEM,
    Gaussian,
    Morse,
    WrappedGaussian,
    evaluate,
    force_negligible_at_half_box,
    fourier_coefficient,
    gradient,
)

# parameters used throughout: equal depth, comparable width
GAUSS = Gaussian(sigma2=0.5)
MORSE = Morse(a=2.0, d_e=1.0)
GEM4 = GEM(sigma2=0.5, alpha=4.0)
ALL_SPECS = [GAUSS, MORSE, GEM4]
BOX = 10.0


def finite_difference_radial(spec, r, step=1e-6):
    return (evaluate(spec, r + step) - evaluate(spec, r - step)) / (2 * step)


class TestValues:
    def test_gaussian_at_zero(self):
        assert evaluate(GAUSS, 0.0) == pytest.approx(-1.0)

    def test_morse_at_zero(self):
        assert evaluate(MORSE, 0.0) == pytest.approx(-1.0)

    def test_gem_example(self):
        # -exp(-(1/sqrt(2*0.5))^4) = -exp(-1)
        assert evaluate(GEM4, 1.0) == pytest.approx(-math.exp(-1.0), abs=1e-12)

    def test_equal_depth_and_negligible_range(self):
        # Morse has the longest reach: |W'(5)| = 4(e^-10 - e^-20) ~ 1.8e-4
        for spec, bound in [(GAUSS, 1e-4), (MORSE, 2e-4), (GEM4, 1e-4)]:
            assert evaluate(spec, 0.0) == pytest.approx(-1.0)
            assert abs(spec.radial_derivative(0.5 * BOX)) < bound
            assert force_negligible_at_half_box(spec, BOX)

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            Gaussian(sigma2=-1.0)
        with pytest.raises(ValueError):
            Morse(a=0.0)
        with pytest.raises(ValueError):
            GEM(alpha=1.5)
        with pytest.raises(ValueError):
            WrappedGaussian(n_images=0)


class TestGradient:
    def test_zero_displacement(self):
        for spec in ALL_SPECS:
            assert np.all(gradient(spec, np.zeros(2)) == 0.0)

    def test_gaussian_example(self):
        g = gradient(GAUSS, np.array([1.0, 0.0]))
        assert g == pytest.approx([2.0 * math.exp(-1.0), 0.0], abs=1e-12)

    def test_matches_finite_differences(self):
        for spec in ALL_SPECS:
            for r in np.geomspace(1e-3, 0.5 * BOX, 25):
                expected = finite_difference_radial(spec, r)
                got = gradient(spec, np.array([r]))[0]
                assert got == pytest.approx(expected, abs=1e-5)

    def test_antisymmetry(self):
        rng = np.random.default_rng(1)
        for spec in ALL_SPECS:
            for _ in range(5):
                dx = rng.normal(size=3)
                assert np.allclose(gradient(spec, -dx), -gradient(spec, dx), atol=1e-14)

    def test_morse_factor_near_zero_limit(self):
        # W'(r)/r -> 2 a^2 d_e as r -> 0
        assert MORSE.gradient_factor(0.0) == pytest.approx(2 * 2.0 ** 2 * 1.0)
        assert MORSE.gradient_factor(1e-9) == pytest.approx(2 * 2.0 ** 2 * 1.0, rel=1e-6)

    def test_gem2_equals_gaussian(self):
        gem2 = GEM(sigma2=0.5, alpha=2.0)
        r = np.linspace(0.0, 4.0, 40)
        assert np.allclose(gem2.value(r), GAUSS.value(r), atol=1e-14)
        assert np.allclose(gem2.gradient_factor(r), GAUSS.gradient_factor(r), atol=1e-14)


class TestFourierCoefficients:
    def test_gaussian_k0_vs_erf(self):
        # (1/L) * integral of -exp(-y^2) over [-5, 5]
        expected = -math.sqrt(math.pi) * math.erf(5.0) / BOX
        assert fourier_coefficient(GAUSS, 0.0, BOX) == pytest.approx(expected, abs=1e-11)

    def test_even_in_k(self):
        k = 2.0 * np.pi * 3 / BOX
        for spec in ALL_SPECS:
            assert fourier_coefficient(spec, -k, BOX) == pytest.approx(
                fourier_coefficient(spec, k, BOX), abs=1e-12
            )

    def test_wrapped_gaussian_analytic_vs_quadrature(self):
        wrapped = WrappedGaussian(sigma2=0.5, box=BOX, n_images=3)
        for n in (0, 1, 2, 5, 10):
            k = 2.0 * np.pi * n / BOX
            assert fourier_coefficient(wrapped, k, BOX) == pytest.approx(
                wrapped.fourier_analytic(k), abs=1e-9
            )

    def test_low_modes_negative(self):
        # The attractive (negative) low modes drive the instability; they must
        # be strictly negative for all three potentials.
        for spec in ALL_SPECS:
            for n in range(0, 6):
                k = 2.0 * np.pi * n / BOX
                assert fourier_coefficient(spec, k, BOX) < 0.0

    def test_gaussian_and_morse_negative_to_noise_floor(self):
        # Half-box truncation rings at ~exp(-L^2 / (8 sigma2)) ~ 1e-11 for the
        # Gaussian; above that floor every mode is negative.  (GEM-4 is
        # genuinely not positive-definite: its transform has positive side
        # lobes of order 1e-2 starting around mode 6.)
        for spec in (GAUSS, MORSE):
            for n in range(0, 31):
                val = fourier_coefficient(spec, 2.0 * np.pi * n / BOX, BOX)
                assert val < 1e-10
                if abs(val) > 1e-10:
                    assert val < 0.0

    def test_gem4_has_positive_side_lobes(self):
        # super-Gaussians are not positive definite; frozen against
        # scipy.integrate.quad and a 2e6-point trapezoid cross-check
        val = fourier_coefficient(GEM4, 2.0 * np.pi * 7 / BOX, BOX)
        assert val == pytest.approx(1.82922241e-02, rel=1e-6)

    def test_rejects_off_grid_wavenumber(self):
        with pytest.raises(ValueError):
            fourier_coefficient(GAUSS, 0.1234, BOX)

    def test_memoized(self):
        from torusclusters.potentials import _fourier_cached

        before = _fourier_cached.cache_info().hits
        k = 2.0 * np.pi / BOX
        fourier_coefficient(GAUSS, k, BOX)
        fourier_coefficient(GAUSS, k, BOX)
        assert _fourier_cached.cache_info().hits > before


class TestWrappedGaussian:
    def test_periodicity(self):
        wrapped = WrappedGaussian(sigma2=0.5, box=BOX, n_images=3)
        r = np.linspace(-4.0, 4.0, 17)
        # periodic up to the truncated images' tail
        assert np.allclose(wrapped.value(r + BOX), wrapped.value(r), atol=1e-8)

    def test_matches_plain_gaussian_near_origin(self):
        wrapped = WrappedGaussian(sigma2=0.5, box=BOX, n_images=3)
        r = np.linspace(0.0, 1.0, 11)
        # image terms are ~exp(-81) at this box size
        assert np.allclose(wrapped.value(r), GAUSS.value(r), atol=1e-12)
