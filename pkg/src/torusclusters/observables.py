"""Scalar diagnostics of particle configurations.

The workhorses are the mean particle distance to the periodic centre of
mass (small in a single-cluster state, ~L/4 for a uniform gas in 1D), the
single-trajectory mean squared displacement (plateaus at L^2/12 per
dimension for free particles under the wrapped-difference convention), and
the kinetic temperature (equals 1/beta in canonical equilibrium).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .periodic import minimum_image, wrap_positions

__all__ = [
    "ObservableSample",
    "periodic_com",
    "d_com",
    "msd",
    "msd_unwrapped",
    "kinetic_temperature",
    "convergence_time",
    "msd_onset_time",
]


@dataclass(frozen=True)
class ObservableSample:
    time: float
    d_com: float
    msd: float
    t_kin: float
    u_pot: float


def periodic_com(positions, box):
    """Centre of mass under periodic boundaries, via circular means.

    Each coordinate is mapped to an angle on the unit circle; the angle of
    the mean vector is mapped back to [0, box).  Returns (com, degenerate):
    when the mean vector in some dimension is shorter than 1e-12 (perfectly
    balanced ring) the arithmetic mean of the wrapped coordinates is used
    for that dimension and the sample is flagged degenerate.
    """
    positions = np.atleast_2d(np.asarray(positions, dtype=float))
    if positions.shape[0] == 0:
        raise ValueError("need at least one particle")
    theta = 2.0 * np.pi * positions / box
    mean_cos = np.cos(theta).mean(axis=0)
    mean_sin = np.sin(theta).mean(axis=0)
    length = np.hypot(mean_cos, mean_sin)
    degenerate = bool(np.any(length < 1e-12))
    com = np.where(
        length < 1e-12,
        positions.mean(axis=0),
        wrap_positions(np.arctan2(mean_sin, mean_cos) * box / (2.0 * np.pi), box),
    )
    return com, degenerate


def d_com(positions, box):
    """Mean minimum-image distance of the particles to their periodic COM."""
    positions = np.atleast_2d(np.asarray(positions, dtype=float))
    com, _ = periodic_com(positions, box)
    delta = minimum_image(positions - com, box)
    return float(np.mean(np.linalg.norm(delta, axis=1)))


def msd(positions, initial_positions, box):
    """Mean squared displacement with wrapped (minimum-image) differences.

    Bounded by d (box/2)^2; for free particles the long-time plateau is
    box^2/12 per dimension, the variance of a uniform wrapped difference.
    """
    delta = minimum_image(
        np.asarray(positions, dtype=float) - np.asarray(initial_positions, dtype=float), box
    )
    return float(np.mean(np.sum(delta * delta, axis=-1)))


def msd_unwrapped(unwrapped_displacement):
    """Mean squared displacement from accumulated true displacements.

    Unbounded; the right quantity for diffusion-coefficient fits, not for
    the plateau criterion.
    """
    u = np.asarray(unwrapped_displacement, dtype=float)
    return float(np.mean(np.sum(u * u, axis=-1)))


def kinetic_temperature(velocities):
    """T_kin = <|v|^2> / d over all particles."""
    v = np.atleast_2d(np.asarray(velocities, dtype=float))
    n, d = v.shape
    return float(np.sum(v * v) / (n * d))


def convergence_time(times, values, threshold):
    """First sample time at which the series drops below the threshold.

    Returns None when no sample does ("not reached").
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.size == 0:
        raise ValueError("empty series")
    below = np.nonzero(values < threshold)[0]
    return float(times[below[0]]) if below.size else None


def msd_onset_time(times, msd_values, smooth_window=1):
    """Time of the first decrease of the (optionally smoothed) MSD series.

    Returns None when the series never decreases ("not detected").  At
    large friction the raw series is noisy enough that a decrease may be
    noise rather than a plateau; a moving-average window > 1 trades
    latency for robustness.
    """
    times = np.asarray(times, dtype=float)
    vals = np.asarray(msd_values, dtype=float)
    if times.size < 2:
        raise ValueError("need at least two samples")
    if smooth_window > 1:
        kernel = np.ones(smooth_window) / smooth_window
        vals = np.convolve(vals, kernel, mode="valid")
        times = times[smooth_window - 1:]
    drops = np.nonzero(np.diff(vals) < 0)[0]
    return float(times[drops[0] + 1]) if drops.size else None
