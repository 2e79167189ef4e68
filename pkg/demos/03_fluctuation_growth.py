"""Fluctuations around the mean field and the onset-of-clustering time.

In the unstable regime the two-point function of the density perturbation
develops a growing oscillatory component; its log-slope equals twice the
spectral abscissa.  Dividing ln N by that rate predicts when an N-particle
simulation starts to form clusters.

Run:  python3 demos/03_fluctuation_growth.py   (about a minute)
"""

import numpy as np

from torusclusters import Gaussian
from torusclusters.fluctuations import (
    FluctuationConfig,
    covariance_profile,
    oscillation_amplitude,
    predict_onset_time,
)
from torusclusters.stability import StabilityConfig, psi_max

BOX = 10.0
st = StabilityConfig(
    potential=Gaussian(0.5), box=BOX, beta=25.0, gamma=1.0, hermite_dim=40, n_wavenumbers=8
)
cfg = FluctuationConfig(stability=st)

print("covariance profile E[rho1(x) rho1*(x')] vs separation, growing in time:")
dx = np.linspace(0.0, BOX, 9, endpoint=False)
for t in (0.5, 20.0, 40.0, 60.0):
    profile = covariance_profile(cfg, t, dx)
    print(f"  t = {t:5.1f}: " + " ".join(f"{v:9.3g}" for v in profile))

psi = psi_max(st)
print(f"\nspectral abscissa psi_max = {psi:.5f}; expected amplitude rate 2 psi = {2 * psi:.5f}")
ts = np.linspace(45.0, 70.0, 5)
amps = [oscillation_amplitude(cfg, t) for t in ts]
slope = np.polyfit(ts, np.log(amps), 1)[0]
print(f"fitted late-time amplitude log-slope = {slope:.5f}")

print("\npredicted clustering onset times t_cl = ln(N) / (2 psi_max):")
for n in (200, 800, 3200):
    print(f"  N = {n:5d}: t_cl = {predict_onset_time(n, psi):6.1f}")
