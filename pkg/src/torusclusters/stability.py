"""Linear stability of the uniform state of the kinetic mean-field equation.

Linearizing the kinetic Fokker-Planck equation around the spatially uniform,
Maxwellian-in-velocity state and expanding in Fourier modes (position) times
normalized Hermite polynomials (velocity) turns the perturbation dynamics for
each wavenumber k into a linear ODE system dc/dt = A(k, beta) c with the
tridiagonal operator

    A[0][1] = -i k sqrt(1/beta)
    A[1][0] = -i k sqrt(1/beta) - i k sqrt(beta) what(k)
    A[m][m]   = -m gamma
    A[m][m+1] = -i k sqrt((m+1)/beta)
    A[m][m-1] = -i k sqrt(m/beta)       (m >= 2)

(0-based Hermite order m; what(k) is the potential's Fourier coefficient).
The uniform state is unstable when the spectral abscissa

    psi_max(beta) = max_k max{Re(lambda) : lambda eigenvalue of A(k, beta)}

is positive; the critical inverse temperature beta_c is the smallest beta at
which that happens.  k = 0 is included in the max, which pins psi_max = 0
below threshold and makes beta_c a zero-crossing of a monotone quantity.

The analysis is one-dimensional; the operator is truncated to hermite_dim
rows and n_wavenumbers positive Fourier modes (negative modes carry the
conjugate spectrum and add nothing to the max).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .linalg import eigen_abscissa
from .potentials import fourier_coefficient

__all__ = [
    "HermiteBasis",
    "StabilityConfig",
    "NoTransitionError",
    "hermite_eval",
    "assemble_operator",
    "psi_max_at_k",
    "psi_max",
    "is_unstable",
    "beta_critical",
]

# eigensolver noise floor used when deciding "psi > 0"
_POSITIVITY_TOL = 1.0e-9


class NoTransitionError(RuntimeError):
    """No unstable inverse temperature found within the bracket budget."""


@dataclass(frozen=True)
class HermiteBasis:
    """Normalized Hermite polynomials h_n(v) = H_n(sqrt(beta) v) / sqrt(n!).

    H_n are the probabilists' Hermite polynomials, H_{n+1}(u) = u H_n(u)
    - n H_{n-1}(u).  The h_n are orthonormal under the Maxwellian weight
    F(v) and are eigenfunctions of the Ornstein-Uhlenbeck generator with
    eigenvalues -n.
    """

    beta: float
    max_n: int

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if self.max_n < 0:
            raise ValueError("max_n must be >= 0")

    def eval(self, n, v):
        if not 0 <= n <= self.max_n:
            raise ValueError(f"order n={n} outside [0, {self.max_n}]")
        v = np.asarray(v, dtype=float)
        u = np.sqrt(self.beta) * v
        # forward recursion on the normalized polynomials:
        # h_{n+1} = (u h_n - sqrt(n) h_{n-1}) / sqrt(n+1)
        h_prev = np.zeros_like(u)
        h = np.ones_like(u)
        for j in range(n):
            h, h_prev = (u * h - np.sqrt(j) * h_prev) / np.sqrt(j + 1), h
        if not np.all(np.isfinite(h)):
            raise OverflowError(
                f"Hermite recursion overflowed at n={n}, beta={self.beta}"
            )
        return h if h.shape else float(h)


def hermite_eval(basis, n, v):
    """Value of the n-th normalized Hermite polynomial at velocity v."""
    return basis.eval(n, v)


@dataclass(frozen=True)
class StabilityConfig:
    """Truncation and physics parameters for the stability operator.

    hermite_dim rows of the operator are kept; wavenumbers 2 pi n / box for
    n = 1..n_wavenumbers are scanned (plus k = 0).  Defaults follow the
    truncation study: 100 rows and 30 wavenumbers resolve psi_max to well
    below 1e-6 for the potentials considered here.
    """

    potential: object
    box: float = 10.0
    beta: float = 25.0
    gamma: float = 1.0
    hermite_dim: int = 100
    n_wavenumbers: int = 30

    def __post_init__(self):
        if self.hermite_dim < 2:
            raise ValueError("hermite_dim must be >= 2")
        if self.n_wavenumbers < 1:
            raise ValueError("n_wavenumbers must be >= 1")
        if self.beta <= 0 or self.box <= 0:
            raise ValueError("beta and box must be positive")
        if self.gamma < 0:
            raise ValueError("gamma must be >= 0")

    def wavenumbers(self, include_zero=True):
        ks = 2.0 * np.pi * np.arange(1, self.n_wavenumbers + 1) / self.box
        return np.concatenate(([0.0], ks)) if include_zero else ks


def assemble_operator(cfg, k):
    """Truncated operator A(k, beta) as a dense complex matrix."""
    m = cfg.hermite_dim
    beta = cfg.beta
    a = np.zeros((m, m), dtype=np.complex128)
    orders = np.arange(m)
    a[orders, orders] = -orders * cfg.gamma
    coupling = -1j * k * np.sqrt(np.arange(1, m) / beta)
    a[orders[:-1], orders[:-1] + 1] = coupling
    a[orders[:-1] + 1, orders[:-1]] = coupling
    what = fourier_coefficient(cfg.potential, k, cfg.box)
    a[1, 0] += -1j * k * np.sqrt(beta) * what
    return a


def psi_max_at_k(cfg, k):
    """Largest eigenvalue real part of A(k, beta) at one wavenumber."""
    return eigen_abscissa(assemble_operator(cfg, k))


def psi_max(cfg):
    """Spectral abscissa maximized over k in {0} u {2 pi n / box, n <= K}."""
    return max(psi_max_at_k(cfg, k) for k in cfg.wavenumbers())


def is_unstable(cfg):
    """True when psi_max(cfg) > 0; scans low wavenumbers first and stops early.

    Instability always enters through a low mode for short-ranged attractive
    potentials, so a sign query rarely needs the full scan.
    """
    for k in cfg.wavenumbers(include_zero=False):
        if psi_max_at_k(cfg, k) > _POSITIVITY_TOL:
            return True
    return False


def beta_critical(
    cfg,
    beta_lo=1.0,
    beta_hi=16.0,
    tol=1.0e-3,
    max_expansions=12,
):
    """Smallest inverse temperature at which the uniform state goes unstable.

    Bisection on the instability predicate; psi_max is exactly flat at zero
    below threshold, so derivative-based root finding is not applicable.
    The initial bracket [beta_lo, beta_hi] is expanded geometrically when it
    does not straddle the transition.  ``cfg.beta`` is ignored.

    Raises NoTransitionError when no unstable beta is found within the
    expansion budget (interaction too weak to destabilize the uniform
    state).
    """
    if not 0 < beta_lo < beta_hi:
        raise ValueError("need 0 < beta_lo < beta_hi")

    lo, hi = float(beta_lo), float(beta_hi)
    for _ in range(max_expansions):
        if not is_unstable(replace(cfg, beta=lo)):
            break
        lo *= 0.5
    else:
        raise NoTransitionError(
            f"still unstable at beta={lo:g}; no stable lower bracket found"
        )
    for _ in range(max_expansions):
        if is_unstable(replace(cfg, beta=hi)):
            break
        hi *= 2.0
    else:
        raise NoTransitionError(
            f"no transition found up to beta={hi:g}; "
            "potential too weak to destabilize the uniform state"
        )

    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if is_unstable(replace(cfg, beta=mid)):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
