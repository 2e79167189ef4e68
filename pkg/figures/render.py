#!/usr/bin/env python3
"""Render figures from the simulation toolkit's CSV and trajectory files.

Standalone by design: this script reads only the documented on-disk
formats (observable CSVs, sweep CSVs, trajectory frame dumps) and shares
no code with the library that produced them.

Usage:
    render.py --kind KIND --in PATH [PATH ...] --out FILE [options]

Kinds:
    observables        observables.csv -> four-panel time-series figure
    psi_surface        psi_grid.csv (gamma, beta, psi_max) -> heatmap
    fluct_snapshots    covariance.csv (t, dx, covariance) -> profile overlay
    convergence_sweep  convergence.csv -> mean convergence time vs friction
    onset_fit          onset.csv [onset_fit.csv] -> onset times vs ln N
    snapshot           trajectory dump -> worldlines (1D) or frame scatter (2D)

Output is deterministic: fixed style, no timestamps; rendering the same
inputs twice produces identical bytes.
"""

import argparse
import csv
import math
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

STYLE = {
    "figure.dpi": 120,
    "savefig.dpi": 120,
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.2,
}


class RenderInputError(ValueError):
    """Malformed or empty input, with file/line/column context."""


def read_csv_columns(path, required):
    """Parse a CSV into float columns, validating against `required`."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise RenderInputError(f"{path}: file is empty") from None
        missing = [name for name in required if name not in header]
        if missing:
            raise RenderInputError(f"{path}: header misses column(s) {missing}, got {header}")
        columns = {name: [] for name in header}
        n_rows = 0
        for line_no, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != len(header):
                raise RenderInputError(
                    f"{path}: line {line_no}: expected {len(header)} fields, got {len(row)}"
                )
            for name, token in zip(header, row):
                try:
                    columns[name].append(float(token))
                except ValueError:
                    raise RenderInputError(
                        f"{path}: line {line_no}: column '{name}': not a number: {token!r}"
                    ) from None
            n_rows += 1
    if n_rows == 0:
        raise RenderInputError(f"{path}: no data rows (header only)")
    return {name: np.asarray(vals) for name, vals in columns.items()}


def read_frames(path):
    frames = []
    time = None
    rows = []
    with open(path) as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                if time is not None:
                    frames.append((time, np.asarray(rows)))
                if "t=" not in line:
                    raise RenderInputError(f"{path}: line {line_no}: malformed frame header")
                try:
                    time = float(line.split("t=")[1])
                except ValueError:
                    raise RenderInputError(
                        f"{path}: line {line_no}: unparsable frame time"
                    ) from None
                rows = []
            else:
                if time is None:
                    raise RenderInputError(f"{path}: line {line_no}: data before frame header")
                try:
                    rows.append([float(tok) for tok in line.split()])
                except ValueError:
                    raise RenderInputError(
                        f"{path}: line {line_no}: unparsable coordinates"
                    ) from None
    if time is not None:
        frames.append((time, np.asarray(rows)))
    if not frames:
        raise RenderInputError(f"{path}: no frames found")
    return frames


# ---------------------------------------------------------------------------
# renderers
# ---------------------------------------------------------------------------


def render_observables(inputs, out, opts):
    data = read_csv_columns(inputs[0], ("time", "d_com", "msd", "t_kin", "u_pot"))
    fig, axes = plt.subplots(2, 2, figsize=(8, 5.5), sharex=True)
    t = data["time"]
    panels = (
        ("d_com", "distance to centre of mass"),
        ("msd", "mean squared displacement"),
        ("t_kin", "kinetic temperature"),
        ("u_pot", "potential energy"),
    )
    for ax, (name, label) in zip(axes.flat, panels):
        ax.plot(t, data[name], color="tab:blue")
        ax.set_ylabel(label)
    if opts.threshold is not None:
        axes[0, 0].axhline(opts.threshold, color="tab:red", ls="--", label="threshold s")
        axes[0, 0].legend(loc="best")
    if opts.beta is not None:
        axes[1, 0].axhline(1.0 / opts.beta, color="tab:red", ls="--", label="1/beta")
        axes[1, 0].legend(loc="best")
    for ax in axes[1]:
        ax.set_xlabel("time")
    fig.tight_layout()
    fig.savefig(out)


def render_psi_surface(inputs, out, opts):
    data = read_csv_columns(inputs[0], ("gamma", "beta", "psi_max"))
    gammas = np.unique(data["gamma"])
    betas = np.unique(data["beta"])
    grid = np.full((len(gammas), len(betas)), np.nan)
    for g, b, p in zip(data["gamma"], data["beta"], data["psi_max"]):
        grid[np.searchsorted(gammas, g), np.searchsorted(betas, b)] = p
    fig, ax = plt.subplots(figsize=(6, 4))
    mesh = ax.pcolormesh(betas, gammas, grid, shading="nearest", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label="psi_max")
    if len(gammas) > 1 and gammas.min() > 0 and gammas.max() / gammas.min() > 20:
        ax.set_yscale("log")
    ax.set_xlabel("beta")
    ax.set_ylabel("gamma")
    ax.set_title("spectral abscissa")
    fig.tight_layout()
    fig.savefig(out)


def render_fluct_snapshots(inputs, out, opts):
    data = read_csv_columns(inputs[0], ("t", "dx", "covariance"))
    fig, ax = plt.subplots(figsize=(6.5, 4))
    for t in np.unique(data["t"]):
        mask = data["t"] == t
        order = np.argsort(data["dx"][mask])
        ax.plot(data["dx"][mask][order], data["covariance"][mask][order], label=f"t = {t:g}")
    ax.set_xlabel("x - x'")
    ax.set_ylabel("perturbation covariance")
    ax.legend(loc="best")
    fig.tight_layout()
    fig.savefig(out)


def render_convergence_sweep(inputs, out, opts):
    data = read_csv_columns(inputs[0], ("gamma", "mean_t", "ci95"))
    ok = ~np.isnan(data["mean_t"])
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.errorbar(
        data["gamma"][ok], data["mean_t"][ok], yerr=np.nan_to_num(data["ci95"][ok]),
        fmt="o-", capsize=3,
    )
    ax.set_xscale("log")
    ax.set_xlabel("friction gamma")
    ax.set_ylabel("convergence time t*")
    if np.any(~ok):
        ax.set_title(f"{int(np.sum(~ok))} value(s) without converged trajectories omitted")
    fig.tight_layout()
    fig.savefig(out)


def render_onset_fit(inputs, out, opts):
    data = read_csv_columns(inputs[0], ("n_particles", "mean_t_cl", "ci95"))
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.errorbar(
        data["n_particles"], data["mean_t_cl"], yerr=np.nan_to_num(data["ci95"]),
        fmt="o", capsize=3, label="measured onset",
    )
    if len(inputs) > 1:
        fit = read_csv_columns(inputs[1], ("slope", "intercept"))
        ns = np.geomspace(data["n_particles"].min(), data["n_particles"].max(), 64)
        ax.plot(
            ns, fit["slope"][0] * np.log(ns) + fit["intercept"][0],
            color="tab:red", ls="--",
            label=f"fit: {fit['slope'][0]:.2f} ln N + {fit['intercept'][0]:.2f}",
        )
    ax.set_xscale("log")
    ax.set_xlabel("particle count N")
    ax.set_ylabel("onset time t_cl")
    ax.legend(loc="best")
    fig.tight_layout()
    fig.savefig(out)


def render_snapshot(inputs, out, opts):
    frames = read_frames(inputs[0])
    dims = frames[0][1].shape[1]
    fig, ax = plt.subplots(figsize=(6.5, 4))
    if dims == 1:
        # worldlines: every frame contributes a column of points
        for time, positions in frames:
            ax.plot(
                np.full(len(positions), time), positions[:, 0],
                ".", color="black", markersize=1.0, rasterized=False,
            )
        ax.set_xlabel("time")
        ax.set_ylabel("position")
    else:
        index = opts.frame if opts.frame is not None else len(frames) - 1
        if not -len(frames) <= index < len(frames):
            raise RenderInputError(
                f"{inputs[0]}: frame index {index} out of range (0..{len(frames) - 1})"
            )
        time, positions = frames[index]
        ax.plot(positions[:, 0], positions[:, 1], ".", color="black", markersize=2.5)
        ax.set_aspect("equal")
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        ax.set_title(f"configuration at t = {time:g}")
    fig.tight_layout()
    fig.savefig(out)


RENDERERS = {
    "observables": render_observables,
    "psi_surface": render_psi_surface,
    "fluct_snapshots": render_fluct_snapshots,
    "convergence_sweep": render_convergence_sweep,
    "onset_fit": render_onset_fit,
    "snapshot": render_snapshot,
}


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--kind", required=True, choices=sorted(RENDERERS))
    parser.add_argument("--in", dest="inputs", nargs="+", required=True, metavar="PATH")
    parser.add_argument("--out", required=True, help="output image file (png)")
    parser.add_argument("--threshold", type=float, default=None,
                        help="convergence threshold overlay (observables)")
    parser.add_argument("--beta", type=float, default=None,
                        help="overlay 1/beta on the kinetic temperature panel")
    parser.add_argument("--frame", type=int, default=None,
                        help="frame index for 2D snapshots (default: last)")
    args = parser.parse_args(argv)

    plt.rcParams.update(STYLE)
    try:
        RENDERERS[args.kind](args.inputs, args.out, args)
    except RenderInputError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except FileNotFoundError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
