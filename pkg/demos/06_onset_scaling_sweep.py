"""Onset-time scaling with particle count, against the spectral prediction.

Runs a small ensemble per particle count, detects each trajectory's
clustering onset, and fits t_cl against ln N.  The fitted slope should sit
near 1/(2 psi_max) from the independent linear stability analysis -- the
cross-validation at the heart of this package.

Run:  python3 demos/06_onset_scaling_sweep.py   (a few minutes)
"""

from torusclusters import Gaussian
from torusclusters.experiments import SweepPlan, run_onset_sweep
from torusclusters.simulator import SimConfig
from torusclusters.stability import StabilityConfig, psi_max

base = SimConfig(
    n_particles=200,
    potential=Gaussian(0.5),
    dims=1,
    box=10.0,
    beta=25.0,
    gamma=1.0,
    h=0.25,
    n_steps=240,
    print_every=4,
    seed=0,
)
plan = SweepPlan(
    variable="n_particles",
    values=(200, 400, 600, 800),
    n_trajectories=8,
    base=base,
    seed_base=0,
)
rows, fit = run_onset_sweep(plan, eps_tilde=0.05, min_pts_tilde=0.18, n_fit_min=0, workers=2)

print("N      mean t_cl   ci95   not-detected   seeds")
for r in rows:
    print(
        f"{r['n_particles']:5d} {r['mean_t_cl']:9.2f} {r['ci95']:7.2f} "
        f"{r['n_not_detected']:9d}      {r['seed_lo']}..{r['seed_hi']}"
    )

psi = psi_max(
    StabilityConfig(
        potential=base.potential, box=base.box, beta=base.beta, gamma=base.gamma,
        hermite_dim=40, n_wavenumbers=8,
    )
)
print(f"\nfitted slope      : {fit.slope:.2f} +- {fit.slope_ci95:.2f}")
print(f"spectral 1/(2 psi): {1.0 / (2.0 * psi):.2f}")
