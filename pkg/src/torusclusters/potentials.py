"""Attractive pair interaction potentials on the periodic box.

Three families are supported for particle forces -- Gaussian, Morse and the
generalized exponential model GEM-alpha -- plus a periodized (wrapped)
Gaussian that serves as an analytic cross-check for the numerically
computed Fourier coefficients.  The wrapped form is incompatible with the
minimum-image convention used by the force kernel, so it is not offered as
a simulation potential.

Conventions: W(r) is the potential at pair distance r >= 0, W'(r) its
radial derivative, and the gradient of W at displacement dx is
W'(|dx|) * dx / |dx| (zero at dx = 0).  The spatial Fourier coefficient on
a box of side L is

    what(k) = (1/L) * integral_{-L/2}^{L/2} W(|y|) exp(-i k y) dy,

real for even W, and negative for purely attractive interactions.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .linalg import integrate

__all__ = [
    "Gaussian",
    "Morse",
    "GEM",
    "WrappedGaussian",
    "evaluate",
    "gradient",
    "gradient_factor",
    "fourier_coefficient",
    "force_negligible_at_half_box",
]


@dataclass(frozen=True)
class Gaussian:
    """W(r) = -exp(-r^2 / (2 sigma2))."""

    sigma2: float = 0.5

    def __post_init__(self):
        if self.sigma2 <= 0:
            raise ValueError("sigma2 must be positive")

    def value(self, r):
        r = np.asarray(r, dtype=float)
        return -np.exp(-r * r / (2.0 * self.sigma2))

    def radial_derivative(self, r):
        r = np.asarray(r, dtype=float)
        return (r / self.sigma2) * np.exp(-r * r / (2.0 * self.sigma2))

    def gradient_factor(self, r):
        # W'(r)/r, finite everywhere
        r = np.asarray(r, dtype=float)
        return np.exp(-r * r / (2.0 * self.sigma2)) / self.sigma2

    def pair_terms(self, r):
        e = np.exp(-np.asarray(r, dtype=float) ** 2 / (2.0 * self.sigma2))
        return -e, e / self.sigma2


@dataclass(frozen=True)
class Morse:
    """W(r) = d_e (exp(-2 a r) - 2 exp(-a r)); depth -d_e at r = 0."""

    a: float = 2.0
    d_e: float = 1.0

    def __post_init__(self):
        if self.a <= 0 or self.d_e <= 0:
            raise ValueError("a and d_e must be positive")

    def value(self, r):
        r = np.asarray(r, dtype=float)
        e = np.exp(-self.a * r)
        return self.d_e * (e * e - 2.0 * e)

    def radial_derivative(self, r):
        r = np.asarray(r, dtype=float)
        e = np.exp(-self.a * r)
        return 2.0 * self.a * self.d_e * (e - e * e)

    def gradient_factor(self, r):
        r = np.asarray(r, dtype=float)
        # (e^{-ar} - e^{-2ar})/r -> a as r -> 0
        safe = np.where(r > 1.0e-12, r, 1.0)
        e = np.exp(-self.a * safe)
        out = 2.0 * self.a * self.d_e * (e - e * e) / safe
        return np.where(r > 1.0e-12, out, 2.0 * self.a ** 2 * self.d_e)

    def pair_terms(self, r):
        r = np.asarray(r, dtype=float)
        safe = np.where(r > 1.0e-12, r, 1.0)
        e = np.exp(-self.a * safe)
        w = self.d_e * (e * e - 2.0 * e)
        gf = np.where(
            r > 1.0e-12,
            2.0 * self.a * self.d_e * (e - e * e) / safe,
            2.0 * self.a ** 2 * self.d_e,
        )
        # r < 1e-12 entries evaluated at safe=1; restore the true value
        w = np.where(r > 1.0e-12, w, -self.d_e)
        return w, gf


@dataclass(frozen=True)
class GEM:
    """GEM-alpha: W(r) = -exp(-(r / sqrt(2 sigma2))^alpha), alpha >= 2.

    Reduces to the Gaussian for alpha = 2; supergaussian for alpha > 2.
    """

    sigma2: float = 0.5
    alpha: float = 4.0

    def __post_init__(self):
        if self.sigma2 <= 0:
            raise ValueError("sigma2 must be positive")
        if self.alpha < 2:
            raise ValueError("alpha must be >= 2")

    @property
    def _scale(self):
        return np.sqrt(2.0 * self.sigma2)

    def value(self, r):
        u = np.asarray(r, dtype=float) / self._scale
        return -np.exp(-(u ** self.alpha))

    def radial_derivative(self, r):
        u = np.asarray(r, dtype=float) / self._scale
        return (self.alpha / self._scale) * u ** (self.alpha - 1.0) * np.exp(-(u ** self.alpha))

    def gradient_factor(self, r):
        u = np.asarray(r, dtype=float) / self._scale
        # u^(alpha-2) is finite at 0 for alpha >= 2 (equals 1 when alpha = 2)
        return (self.alpha / (2.0 * self.sigma2)) * u ** (self.alpha - 2.0) * np.exp(-(u ** self.alpha))

    def pair_terms(self, r):
        u = np.asarray(r, dtype=float) / self._scale
        e = np.exp(-(u ** self.alpha))
        return -e, (self.alpha / (2.0 * self.sigma2)) * u ** (self.alpha - 2.0) * e


@dataclass(frozen=True)
class WrappedGaussian:
    """Periodized Gaussian: W(r) = -sum_n exp(-(r + n L)^2 / (2 sigma2)).

    The sum keeps the 2 n_images + 1 central image terms.  Its Fourier
    coefficients are available in closed form (Poisson summation), which
    makes it the reference case for validating quadrature.
    """

    sigma2: float = 0.5
    box: float = 10.0
    n_images: int = 3

    def __post_init__(self):
        if self.sigma2 <= 0 or self.box <= 0:
            raise ValueError("sigma2 and box must be positive")
        if self.n_images < 1:
            raise ValueError("n_images must be >= 1")

    def _images(self, r):
        r = np.asarray(r, dtype=float)
        shifts = self.box * np.arange(-self.n_images, self.n_images + 1)
        return r[..., None] + shifts

    def value(self, r):
        z = self._images(r)
        return -np.exp(-z * z / (2.0 * self.sigma2)).sum(axis=-1)

    def radial_derivative(self, r):
        z = self._images(r)
        return (z / self.sigma2 * np.exp(-z * z / (2.0 * self.sigma2))).sum(axis=-1)

    def gradient_factor(self, r):
        r = np.asarray(r, dtype=float)
        safe = np.where(np.abs(r) > 1.0e-12, r, 1.0)
        out = self.radial_derivative(r) / safe
        # image terms cancel pairwise at r = 0
        return np.where(np.abs(r) > 1.0e-12, out, 0.0)

    def fourier_analytic(self, k):
        """Closed-form what(k) = -(sqrt(2 pi sigma2)/L) exp(-sigma2 k^2 / 2)."""
        sigma = np.sqrt(self.sigma2)
        return -np.sqrt(2.0 * np.pi) * sigma / self.box * np.exp(-0.5 * self.sigma2 * k * k)


def evaluate(spec, r):
    """Potential value W(r) at pair distance r >= 0."""
    return spec.value(r)


def gradient(spec, dx):
    """Gradient of W at displacement vector dx; zero vector at dx = 0."""
    dx = np.atleast_1d(np.asarray(dx, dtype=float))
    r = np.linalg.norm(dx)
    if r == 0.0:
        return np.zeros_like(dx)
    return spec.gradient_factor(r) * dx


def gradient_factor(spec, r):
    """W'(r)/r with the r -> 0 limit built in; the force-kernel primitive."""
    return spec.gradient_factor(r)


def _fourier_quadrature(spec, k, box, tol=1.0e-12):
    def integrand(y):
        return spec.value(np.abs(y)) * np.exp(-1j * k * y)

    val = integrate(integrand, -0.5 * box, 0.5 * box, tol=tol) / box
    if abs(val.imag) >= 1.0e-10:
        raise ValueError(
            f"Fourier coefficient has non-negligible imaginary part {val.imag:g}; "
            "potential is expected to be even"
        )
    return float(val.real)


@lru_cache(maxsize=65536)
def _fourier_cached(spec, k, box):
    return _fourier_quadrature(spec, k, box)


def fourier_coefficient(spec, k, box):
    """Spatial Fourier coefficient what(k) on a box of side `box`.

    k must be a torus wavenumber 2 pi n / box.  Computed by adaptive
    quadrature over one period and memoized per (spec, k, box); stability
    scans reuse the same handful of coefficients heavily.
    """
    n = k * box / (2.0 * np.pi)
    if abs(n - round(n)) > 1.0e-9:
        raise ValueError(f"k={k} is not a multiple of 2*pi/box")
    return _fourier_cached(spec, float(k), float(box))


def force_negligible_at_half_box(spec, box, threshold=1.0e-3):
    """True when |W'(box/2)| < threshold.

    The minimum-image convention silently truncates the interaction at
    half the box; parameters should keep the gradient negligible there.
    """
    return bool(abs(float(np.asarray(spec.radial_derivative(0.5 * box)))) < threshold)
