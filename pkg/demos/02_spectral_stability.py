"""Stability of the uniform state: growth rates and the critical beta.

Assembles the Fourier-Hermite operator of the linearized kinetic mean-field
equation, scans the spectral abscissa over inverse temperature, and locates
the critical point by bisection.  Below beta_c the abscissa sits exactly at
zero (pinned by the k = 0 mode); above it the uniform state is unstable
and clusters form.

Run:  python3 demos/02_spectral_stability.py   (about a minute)
"""

import numpy as np

from torusclusters import Gaussian
from torusclusters.experiments import closed_form_beta_critical
from torusclusters.stability import StabilityConfig, beta_critical, psi_max

BOX = 10.0
potential = Gaussian(sigma2=0.5)

print("psi_max across the transition (gamma = 1, M = 60, K = 12):")
for beta in (3.0, 5.0, 6.0, 6.5, 8.0, 12.0, 25.0):
    cfg = StabilityConfig(
        potential=potential, box=BOX, beta=beta, gamma=1.0, hermite_dim=60, n_wavenumbers=12
    )
    print(f"  beta = {beta:5.1f}: psi_max = {psi_max(cfg):.6f}")

print("\nbisection for beta_c at three frictions (identical by construction):")
for gamma in (0.1, 1.0, 10.0):
    cfg = StabilityConfig(
        potential=potential, box=BOX, gamma=gamma, hermite_dim=60, n_wavenumbers=12
    )
    print(f"  gamma = {gamma:5.1f}: beta_c = {beta_critical(cfg):.4f}")

limit = closed_form_beta_critical(0.5, BOX)
print(f"\nnarrow-interaction overdamped limit L/(sqrt(2 pi) sigma) = {limit:.4f}")
