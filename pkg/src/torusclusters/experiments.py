"""Ensemble sweeps and statistics for the cluster-formation experiments.

A sweep runs an ensemble of independent trajectories per parameter value,
derives each trajectory's seed deterministically (seed_base + global
trajectory index, so any row can be reproduced bit-exactly in isolation),
and aggregates first-passage statistics with normal-approximation 95%
confidence intervals.  "Not reached" / "not detected" outcomes are counted
and flagged, never fabricated.

Three experiment families:

* convergence sweep over friction: time for d_com to drop below a
  characteristic length, with the stepsize scaled as h ~ min(gamma, 1/gamma)
  to keep integration accuracy comparable across friction values;
* onset sweep over particle count: first frame with a detected cluster,
  fitted against ln N;
* critical scan over inverse temperature: the divergence point of the
  convergence time brackets the critical beta, compared against the
  spectral prediction and the narrow-interaction closed form
  L^d / ((2 pi)^(d/2) sigma^d).
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .clustering import onset_time
from .observables import convergence_time
from .potentials import Gaussian
from .simulator import SimConfig, run
from .stability import StabilityConfig, beta_critical, is_unstable

__all__ = [
    "SweepPlan",
    "FitResult",
    "fit_log",
    "run_ensemble",
    "run_convergence_sweep",
    "run_onset_sweep",
    "run_critical_scan",
    "closed_form_beta_critical",
]

SIGMA = math.sqrt(0.5)  # default convergence threshold: potential width


@dataclass(frozen=True)
class SweepPlan:
    """One sweep: which field varies, its values, and the ensemble sizes.

    ``n_trajectories`` is either one integer for all values or a sequence
    with one entry per value (larger ensembles are typically needed at
    larger friction, where first-passage times carry more variance).
    """

    variable: str
    values: tuple
    n_trajectories: object
    base: SimConfig
    seed_base: int = 0

    def __post_init__(self):
        if self.variable not in ("gamma", "n_particles", "beta"):
            raise ValueError("variable must be gamma, n_particles or beta")
        if len(self.values) == 0:
            raise ValueError("values must be non-empty")
        counts = self.counts()
        if len(counts) != len(self.values) or any(c < 1 for c in counts):
            raise ValueError("need >= 1 trajectory per value")

    def counts(self):
        if np.isscalar(self.n_trajectories):
            return [int(self.n_trajectories)] * len(self.values)
        return [int(c) for c in self.n_trajectories]

    def configs(self):
        """Per value: list of configs with deterministic derived seeds."""
        out = []
        global_index = 0
        for value, count in zip(self.values, self.counts()):
            cfgs = []
            for _ in range(count):
                cfgs.append(
                    replace(
                        self.base,
                        **{self.variable: value},
                        seed=self.seed_base + global_index,
                    )
                )
                global_index += 1
            out.append((value, cfgs))
        return out


@dataclass(frozen=True)
class FitResult:
    """Least-squares line with normal-approximation 95% half-widths."""

    slope: float
    intercept: float
    slope_ci95: float
    intercept_ci95: float
    n_points: int


def fit_log(xs, ys):
    """Ordinary least squares of y against ln(x) (natural log)."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.size < 3:
        raise ValueError("need at least 3 points")
    if np.any(xs < 2):
        raise ValueError("x values must be >= 2")
    if np.ptp(xs) == 0:
        raise ValueError("x values are all equal")
    lx = np.log(xs)
    n = lx.size
    mx = lx.mean()
    sxx = float(np.sum((lx - mx) ** 2))
    slope = float(np.sum((lx - mx) * (ys - ys.mean())) / sxx)
    intercept = float(ys.mean() - slope * mx)
    resid = ys - (slope * lx + intercept)
    s2 = float(np.sum(resid**2) / max(n - 2, 1))
    se_slope = math.sqrt(s2 / sxx)
    se_intercept = math.sqrt(s2 * (1.0 / n + mx * mx / sxx))
    return FitResult(
        slope=slope,
        intercept=intercept,
        slope_ci95=1.96 * se_slope,
        intercept_ci95=1.96 * se_intercept,
        n_points=n,
    )


def _run_config(cfg):
    return run(cfg)


def run_ensemble(configs, workers=None):
    """Run independent trajectories, optionally on a process pool.

    Results come back ordered like ``configs`` regardless of scheduling, so
    aggregation is deterministic.
    """
    configs = list(configs)
    if workers is None or workers <= 1 or len(configs) <= 1:
        return [run(cfg) for cfg in configs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_config, configs, chunksize=1))


def _mean_ci(values):
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return math.nan, math.nan
    mean = float(values.mean())
    if values.size == 1:
        return mean, math.nan
    ci = 1.96 * float(values.std(ddof=1)) / math.sqrt(values.size)
    return mean, ci


def _seed_range(cfgs):
    seeds = [c.seed for c in cfgs]
    return min(seeds), max(seeds)


def _warn_if_stable(potential, box, beta):
    if potential is None:
        warnings.warn("no interaction potential: uniform state will not cluster", stacklevel=3)
        return
    probe = StabilityConfig(
        potential=potential, box=box, beta=beta, gamma=1.0, hermite_dim=40, n_wavenumbers=8
    )
    if not is_unstable(probe):
        warnings.warn(
            f"beta={beta:g} appears to be below the critical inverse temperature; "
            "convergence times will mostly be 'not reached'",
            stacklevel=3,
        )


def run_convergence_sweep(plan, threshold=SIGMA, workers=None):
    """Mean time for d_com to cross the threshold, per friction value.

    Trajectories use the h ~ min(gamma, 1/gamma) stepsize scaling.  Rows
    with no converged trajectory at all are flagged.
    """
    if plan.variable != "gamma":
        raise ValueError("convergence sweep varies gamma")
    _warn_if_stable(plan.base.potential, plan.base.box, plan.base.beta)
    rows = []
    for value, cfgs in plan.configs():
        cfgs = [replace(c, auto_scale_h=True) for c in cfgs]
        records = run_ensemble(cfgs, workers=workers)
        times = [
            convergence_time(r.times, r.d_com, threshold) for r in records
        ]
        reached = [t for t in times if t is not None]
        mean, ci = _mean_ci(reached)
        lo, hi = _seed_range(cfgs)
        rows.append(
            {
                "gamma": value,
                "mean_t": mean,
                "ci95": ci,
                "n_traj": len(cfgs),
                "n_not_reached": len(times) - len(reached),
                "seed_lo": lo,
                "seed_hi": hi,
                "flagged": len(reached) == 0,
            }
        )
    return rows


def run_onset_sweep(plan, eps_tilde, min_pts_tilde, n_fit_min=600, workers=None):
    """Mean clustering onset time per particle count, plus a ln N fit.

    Frames are scanned with particle-count-scaled detection parameters.
    The fit uses values with N >= n_fit_min (the ln N scaling is an
    asymptotic statement) and needs at least three such values; otherwise
    the fit is None.
    """
    if plan.variable != "n_particles":
        raise ValueError("onset sweep varies n_particles")
    _warn_if_stable(plan.base.potential, plan.base.box, plan.base.beta)
    rows = []
    for value, cfgs in plan.configs():
        cfgs = [replace(c, dump_trajectory=True) for c in cfgs]
        records = run_ensemble(cfgs, workers=workers)
        times = [
            onset_time(r.frames, plan.base.box, eps_tilde, min_pts_tilde) for r in records
        ]
        detected = [t for t in times if t is not None]
        mean, ci = _mean_ci(detected)
        lo, hi = _seed_range(cfgs)
        rows.append(
            {
                "n_particles": value,
                "mean_t_cl": mean,
                "ci95": ci,
                "n_traj": len(cfgs),
                "n_not_detected": len(times) - len(detected),
                "seed_lo": lo,
                "seed_hi": hi,
                "flagged": len(detected) == 0,
            }
        )
    fit_rows = [
        r for r in rows if r["n_particles"] >= n_fit_min and not math.isnan(r["mean_t_cl"])
    ]
    fit = None
    if len(fit_rows) >= 3:
        fit = fit_log(
            [r["n_particles"] for r in fit_rows], [r["mean_t_cl"] for r in fit_rows]
        )
    return rows, fit


def closed_form_beta_critical(sigma2, box, dims=1):
    """Narrow-interaction overdamped limit: L^d / ((2 pi)^(d/2) sigma^d)."""
    sigma = math.sqrt(sigma2)
    return box**dims / ((2.0 * math.pi) ** (dims / 2.0) * sigma**dims)


def run_critical_scan(
    beta_values,
    sigma2_values,
    base,
    n_trajectories=5,
    seed_base=0,
    threshold_factor=1.43,
    workers=None,
    stability_hermite_dim=100,
    stability_wavenumbers=30,
):
    """Convergence-time divergence scan over beta, per interaction width.

    For each sigma^2, trajectories at successively smaller beta measure the
    time to reach the one-cluster state with threshold 1.43 sigma^2 (wider
    than the usual sigma: cluster widths grow near the transition).  The
    beta where the times diverge brackets the critical point.  Reference
    values per sigma^2: the spectral beta_c and the closed-form limit.
    """
    if base.dims != 1:
        raise ValueError("critical scan is a 1D experiment")
    rows = []
    refs = []
    global_index = 0
    for sigma2 in sigma2_values:
        potential = Gaussian(sigma2=sigma2)
        spectral = beta_critical(
            StabilityConfig(
                potential=potential,
                box=base.box,
                gamma=base.gamma,
                hermite_dim=stability_hermite_dim,
                n_wavenumbers=stability_wavenumbers,
            )
        )
        refs.append(
            {
                "sigma2": sigma2,
                "beta_c_spectral": spectral,
                "beta_c_closed_form": closed_form_beta_critical(sigma2, base.box),
            }
        )
        for beta in beta_values:
            cfgs = []
            for _ in range(n_trajectories):
                cfgs.append(
                    replace(
                        base,
                        potential=potential,
                        beta=beta,
                        seed=seed_base + global_index,
                    )
                )
                global_index += 1
            records = run_ensemble(cfgs, workers=workers)
            times = [
                convergence_time(r.times, r.d_com, threshold_factor * sigma2)
                for r in records
            ]
            reached = [t for t in times if t is not None]
            mean, ci = _mean_ci(reached)
            lo, hi = _seed_range(cfgs)
            rows.append(
                {
                    "sigma2": sigma2,
                    "beta": beta,
                    "mean_t": mean,
                    "ci95": ci,
                    "n_traj": len(cfgs),
                    "n_not_reached": len(times) - len(reached),
                    "diverged": len(reached) == 0,
                    "seed_lo": lo,
                    "seed_hi": hi,
                }
            )
    return rows, refs
