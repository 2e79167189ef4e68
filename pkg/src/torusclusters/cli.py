"""Command-line front end.

Subcommands: simulate, stability, fluctuations, detect, sweep-convergence,
sweep-onset, sweep-critical.  Every run writes its outputs plus a
manifest.txt with the fully resolved configuration into --out; exit code 0
on success, 1 with a message when a result row is flagged (for example a
sweep value where no trajectory reached its criterion), 2 on usage or
input errors.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .clustering import DbscanParams, dbscan, onset_time
from .experiments import (
    SweepPlan,
    closed_form_beta_critical,
    run_convergence_sweep,
    run_critical_scan,
    run_onset_sweep,
)
from .fluctuations import FluctuationConfig, covariance_profile, oscillation_amplitude
from .potentials import GEM, Gaussian, Morse
from .simulator import SimConfig, read_frames, run, write_frames, write_observables_csv
from .stability import NoTransitionError, StabilityConfig, beta_critical, psi_max

__all__ = ["main"]


def _fmt(value):
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def write_csv(path, header, rows):
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row[k]) for k in header) + "\n")


def write_manifest(out_dir, args, extra=None):
    entries = {"command": args.command, "version": __version__}
    for key, value in sorted(vars(args).items()):
        if key in ("command", "func"):
            continue
        entries[key] = value
    if extra:
        entries.update(extra)
    with open(Path(out_dir) / "manifest.txt", "w", newline="\n") as fh:
        for key in sorted(entries):
            fh.write(f"{key}={_fmt(entries[key])}\n")


def build_potential(args):
    if args.potential == "gaussian":
        return Gaussian(sigma2=args.sigma2)
    if args.potential == "morse":
        return Morse(a=args.morse_a, d_e=args.morse_de)
    if args.potential == "gem":
        return GEM(sigma2=args.sigma2, alpha=args.gem_alpha)
    if args.potential == "none":
        return None
    raise ValueError(f"unknown potential {args.potential}")


def build_sim_config(args, **overrides):
    base = dict(
        n_particles=args.n,
        potential=build_potential(args),
        dims=args.dims,
        box=args.box,
        beta=args.beta,
        gamma=args.gamma,
        h=args.h,
        n_steps=args.steps,
        print_every=args.print_every,
        integrator=args.integrator,
        seed=args.seed,
        dump_trajectory=args.dump_traj,
    )
    base.update(overrides)
    return SimConfig(**base)


def _parse_floats(text):
    return tuple(float(tok) for tok in text.split(",") if tok)


def _parse_ints(text):
    return tuple(int(tok) for tok in text.split(",") if tok)


def _out_dir(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_simulate(args):
    out = _out_dir(args)
    cfg = build_sim_config(args)
    record = run(cfg)
    write_observables_csv(record, out / "observables.csv")
    if cfg.dump_trajectory:
        write_frames(record.frames, out / "trajectory.txt")
    write_manifest(out, args, {"effective_h": cfg.effective_h})
    return 0


def cmd_stability(args):
    out = _out_dir(args)
    potential = build_potential(args)
    if potential is None:
        print("stability analysis needs an interaction potential", file=sys.stderr)
        return 2
    gammas = _parse_floats(args.gammas)
    betas = np.linspace(args.beta_min, args.beta_max, args.beta_steps)
    rows = []
    for gamma in gammas:
        for beta in betas:
            cfg = StabilityConfig(
                potential=potential,
                box=args.box,
                beta=float(beta),
                gamma=gamma,
                hermite_dim=args.hermite_dim,
                n_wavenumbers=args.wavenumbers,
            )
            rows.append({"gamma": gamma, "beta": float(beta), "psi_max": psi_max(cfg)})
    write_csv(out / "psi_grid.csv", ("gamma", "beta", "psi_max"), rows)

    extra = {}
    flagged = False
    if not args.skip_beta_critical:
        cfg = StabilityConfig(
            potential=potential,
            box=args.box,
            gamma=gammas[0],
            hermite_dim=args.hermite_dim,
            n_wavenumbers=args.wavenumbers,
        )
        try:
            bc = beta_critical(cfg)
            write_csv(
                out / "beta_critical.csv",
                ("potential", "beta_c"),
                [{"potential": args.potential, "beta_c": bc}],
            )
            extra["beta_c"] = bc
        except NoTransitionError as err:
            print(f"no transition found: {err}", file=sys.stderr)
            flagged = True
    write_manifest(out, args, extra)
    return 1 if flagged else 0


def cmd_fluctuations(args):
    out = _out_dir(args)
    potential = build_potential(args)
    if potential is None:
        print("fluctuation analysis needs an interaction potential", file=sys.stderr)
        return 2
    st = StabilityConfig(
        potential=potential,
        box=args.box,
        beta=args.beta,
        gamma=args.gamma,
        hermite_dim=args.hermite_dim,
        n_wavenumbers=args.wavenumbers,
    )
    times = _parse_floats(args.times)
    cfg = FluctuationConfig(stability=st, quadrature_points=args.quadrature_points, times=times)
    dx = np.linspace(0.0, args.box, args.n_offsets, endpoint=False)
    cov_rows = []
    amp_rows = []
    for t in times:
        profile = covariance_profile(cfg, t, dx)
        cov_rows.extend(
            {"t": t, "dx": float(x), "covariance": float(c)} for x, c in zip(dx, profile)
        )
        amp_rows.append(
            {"t": t, "amplitude": oscillation_amplitude(cfg, t), "gamma": args.gamma}
        )
    write_csv(out / "covariance.csv", ("t", "dx", "covariance"), cov_rows)
    write_csv(out / "amplitude.csv", ("t", "amplitude", "gamma"), amp_rows)
    write_manifest(out, args)
    return 0


def cmd_detect(args):
    out = _out_dir(args)
    rows = []
    for traj_id, path in enumerate(args.traj):
        frames = read_frames(path)
        t_on = onset_time(frames, args.box, args.eps_tilde, args.min_pts_tilde)
        n_at_onset = 0
        if t_on is not None:
            for time, positions in frames:
                if time == t_on:
                    params = DbscanParams.from_dimensionless(
                        args.eps_tilde, args.min_pts_tilde, len(positions), args.box
                    )
                    n_at_onset = dbscan(positions, args.box, params).n_clusters
                    break
        rows.append(
            {
                "trajectory_id": traj_id,
                "onset_time": math.nan if t_on is None else t_on,
                "n_clusters_at_onset": n_at_onset,
            }
        )
    write_csv(out / "detect.csv", ("trajectory_id", "onset_time", "n_clusters_at_onset"), rows)
    write_manifest(out, args)
    return 0


def _flag_check(rows, out, what):
    flagged = [r for r in rows if r.get("flagged")]
    if flagged:
        print(
            f"{len(flagged)} {what} value(s) had no successful trajectory; "
            "see the flagged rows",
            file=sys.stderr,
        )
        return 1
    return 0


def cmd_sweep_convergence(args):
    out = _out_dir(args)
    base = build_sim_config(args, dump_trajectory=False)
    plan = SweepPlan(
        variable="gamma",
        values=_parse_floats(args.gammas),
        n_trajectories=args.n_traj,
        base=base,
        seed_base=args.seed,
    )
    rows = run_convergence_sweep(plan, threshold=args.threshold, workers=args.threads)
    header = ("gamma", "mean_t", "ci95", "n_traj", "n_not_reached", "seed_lo", "seed_hi")
    write_csv(out / "convergence.csv", header, rows)
    write_manifest(out, args)
    return _flag_check(rows, out, "gamma")


def cmd_sweep_onset(args):
    out = _out_dir(args)
    base = build_sim_config(args, dump_trajectory=True)
    plan = SweepPlan(
        variable="n_particles",
        values=_parse_ints(args.ns),
        n_trajectories=args.n_traj,
        base=base,
        seed_base=args.seed,
    )
    rows, fit = run_onset_sweep(
        plan,
        eps_tilde=args.eps_tilde,
        min_pts_tilde=args.min_pts_tilde,
        n_fit_min=args.fit_min,
        workers=args.threads,
    )
    header = (
        "n_particles", "mean_t_cl", "ci95", "n_traj", "n_not_detected", "seed_lo", "seed_hi",
    )
    write_csv(out / "onset.csv", header, rows)
    extra = {}
    if fit is not None:
        write_csv(
            out / "onset_fit.csv",
            ("slope", "intercept", "slope_ci95", "intercept_ci95", "n_points"),
            [vars(fit)],
        )
        extra = {"fit_slope": fit.slope, "fit_intercept": fit.intercept}
    write_manifest(out, args, extra)
    return _flag_check(rows, out, "n_particles")


def cmd_sweep_critical(args):
    out = _out_dir(args)
    base = build_sim_config(args, dump_trajectory=False)
    rows, refs = run_critical_scan(
        beta_values=_parse_floats(args.betas),
        sigma2_values=_parse_floats(args.sigma2s),
        base=base,
        n_trajectories=args.n_traj,
        seed_base=args.seed,
        threshold_factor=args.threshold_factor,
        workers=args.threads,
        stability_hermite_dim=args.hermite_dim,
        stability_wavenumbers=args.wavenumbers,
    )
    header = (
        "sigma2", "beta", "mean_t", "ci95", "n_traj", "n_not_reached",
        "diverged", "seed_lo", "seed_hi",
    )
    write_csv(out / "critical.csv", header, rows)
    write_csv(
        out / "critical_refs.csv",
        ("sigma2", "beta_c_spectral", "beta_c_closed_form"),
        refs,
    )
    write_manifest(out, args)
    return 0


# ---------------------------------------------------------------------------
# argument wiring
# ---------------------------------------------------------------------------


def _add_common_physics(p):
    p.add_argument("--potential", choices=("gaussian", "morse", "gem", "none"), default="gaussian")
    p.add_argument("--sigma2", type=float, default=0.5, help="width^2 of gaussian/gem")
    p.add_argument("--morse-a", type=float, default=2.0, dest="morse_a")
    p.add_argument("--morse-de", type=float, default=1.0, dest="morse_de")
    p.add_argument("--gem-alpha", type=float, default=4.0, dest="gem_alpha")
    p.add_argument("--box", type=float, default=10.0)
    p.add_argument("--beta", type=float, default=25.0)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--threads", type=int, default=1, help="worker processes for ensembles")


def _add_sim_flags(p):
    p.add_argument("--n", type=int, default=200, help="particle count")
    p.add_argument("--dims", type=int, default=1, choices=(1, 2, 3))
    p.add_argument("--h", type=float, default=0.1, help="base stepsize")
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--print-every", type=int, default=10, dest="print_every")
    p.add_argument("--integrator", choices=("baoab", "obabo", "abo", "ubu"), default="baoab")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dump-traj", action="store_true", dest="dump_traj")


def _add_spectral_flags(p, hermite_default):
    p.add_argument("--hermite-dim", type=int, default=hermite_default, dest="hermite_dim")
    p.add_argument("--wavenumbers", type=int, default=30)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="torusclusters",
        description="cluster formation in kinetic Langevin particle systems",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one trajectory")
    _add_common_physics(p)
    _add_sim_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("stability", help="spectral abscissa grid and critical beta")
    _add_common_physics(p)
    _add_spectral_flags(p, hermite_default=100)
    p.add_argument("--gammas", default="1.0", help="comma-separated friction values")
    p.add_argument("--beta-min", type=float, default=1.0, dest="beta_min")
    p.add_argument("--beta-max", type=float, default=16.0, dest="beta_max")
    p.add_argument("--beta-steps", type=int, default=16, dest="beta_steps")
    p.add_argument("--skip-beta-critical", action="store_true", dest="skip_beta_critical")
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("fluctuations", help="fluctuation covariance and growth amplitude")
    _add_common_physics(p)
    _add_spectral_flags(p, hermite_default=40)
    p.add_argument("--times", default="0.5,2,8,14", help="comma-separated evaluation times")
    p.add_argument("--n-offsets", type=int, default=128, dest="n_offsets")
    p.add_argument("--quadrature-points", type=int, default=64, dest="quadrature_points")
    p.set_defaults(func=cmd_fluctuations)

    p = sub.add_parser("detect", help="cluster onset detection on trajectory dumps")
    p.add_argument("--traj", nargs="+", required=True, help="trajectory dump files")
    p.add_argument("--box", type=float, default=10.0)
    p.add_argument("--eps-tilde", type=float, default=0.05, dest="eps_tilde")
    p.add_argument("--min-pts-tilde", type=float, default=0.18, dest="min_pts_tilde")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("sweep-convergence", help="convergence time vs friction")
    _add_common_physics(p)
    _add_sim_flags(p)
    p.add_argument("--gammas", default="0.5,1,2,4")
    p.add_argument("--n-traj", type=int, default=10, dest="n_traj")
    p.add_argument("--threshold", type=float, default=math.sqrt(0.5))
    p.set_defaults(func=cmd_sweep_convergence)

    p = sub.add_parser("sweep-onset", help="clustering onset time vs particle count")
    _add_common_physics(p)
    _add_sim_flags(p)
    p.add_argument("--ns", default="200,400,600,800", help="comma-separated particle counts")
    p.add_argument("--n-traj", type=int, default=20, dest="n_traj")
    p.add_argument("--eps-tilde", type=float, default=0.05, dest="eps_tilde")
    p.add_argument("--min-pts-tilde", type=float, default=0.18, dest="min_pts_tilde")
    p.add_argument("--fit-min", type=int, default=600, dest="fit_min")
    p.set_defaults(func=cmd_sweep_onset)

    p = sub.add_parser("sweep-critical", help="empirical critical beta scan")
    _add_common_physics(p)
    _add_sim_flags(p)
    _add_spectral_flags(p, hermite_default=100)
    p.add_argument("--sigma2s", default="0.5", help="comma-separated interaction widths^2")
    p.add_argument("--betas", default="25,15,10,8,7,6.5,6,5.5,5", help="comma-separated betas")
    p.add_argument("--n-traj", type=int, default=5, dest="n_traj")
    p.add_argument("--threshold-factor", type=float, default=1.43, dest="threshold_factor")
    p.set_defaults(func=cmd_sweep_critical)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
