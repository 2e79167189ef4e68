"""Density-based cluster detection on position frames.

DBSCAN with the textbook core-point rule: p is a core point when its
eps-neighbourhood, *including p itself*, holds at least min_pts points
(implementations differ on the self-count, so it is pinned here).
Clusters grow by density reachability; border points attach to the first
cluster that reaches them; everything else is noise.  Deterministic for a
given input ordering.

Distances default to plain Euclidean, deliberately ignoring the periodic
wrap: by the time clusters exist they are small against the box, and the
non-periodic metric is what the detection thresholds were tuned for.  The
minimum-image metric is available via ``periodic=True``.

Neighbour search is a dense O(N^2) distance pass; frame sizes here are a
few thousand points at most, well below where spatial indexing pays off.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .periodic import minimum_image

__all__ = [
    "DbscanParams",
    "ClusterLabels",
    "NOISE",
    "dbscan",
    "onset_time",
    "DEFAULTS_1D",
    "DEFAULTS_2D",
]

NOISE = -1

# tuned dimensionless (eps/L, min_pts/N) detection defaults: chosen so that
# an initial uniform frame never shows a cluster while transition frames do
DEFAULTS_1D = (0.05, 0.18)
DEFAULTS_2D = (0.025, 0.025)


@dataclass(frozen=True)
class DbscanParams:
    """Neighbourhood radius and core-point threshold.

    ``scaled`` keeps the dimensionless density threshold min_pts/N fixed
    when the particle count changes: min_pts = round(min_pts_0 * n / n_0).
    """

    eps: float
    min_pts: int

    def __post_init__(self):
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        if self.min_pts < 2:
            raise ValueError("min_pts must be >= 2")

    @classmethod
    def scaled(cls, eps, min_pts_0, n, n_0):
        return cls(eps=eps, min_pts=int(round(min_pts_0 * n / n_0)))

    @classmethod
    def from_dimensionless(cls, eps_tilde, min_pts_tilde, n, box):
        return cls(eps=eps_tilde * box, min_pts=max(2, int(round(min_pts_tilde * n))))


@dataclass(frozen=True)
class ClusterLabels:
    """Per-point labels: -1 noise, 0..n_clusters-1 cluster ids."""

    labels: np.ndarray
    n_clusters: int

    def cluster_sizes(self):
        return np.bincount(self.labels[self.labels >= 0], minlength=self.n_clusters)


def _neighbour_matrix(positions, box, eps, periodic):
    diff = positions[:, None, :] - positions[None, :, :]
    if periodic:
        diff = minimum_image(diff, box)
    dist2 = np.sum(diff * diff, axis=-1)
    return dist2 <= eps * eps


def dbscan(positions, box, params, periodic=False):
    """Label a frame of positions into clusters and noise."""
    positions = np.atleast_2d(np.asarray(positions, dtype=float))
    n = positions.shape[0]
    within = _neighbour_matrix(positions, box, params.eps, periodic)
    # the neighbourhood count includes the point itself (diagonal is True)
    core = within.sum(axis=1) >= params.min_pts

    labels = np.full(n, NOISE, dtype=int)
    cluster = 0
    for seed in range(n):
        if not core[seed] or labels[seed] != NOISE:
            continue
        labels[seed] = cluster
        queue = deque([seed])
        while queue:
            p = queue.popleft()
            if not core[p]:
                continue
            for q in np.nonzero(within[p])[0]:
                if labels[q] == NOISE:
                    labels[q] = cluster
                    queue.append(q)
        cluster += 1
    return ClusterLabels(labels=labels, n_clusters=cluster)


def onset_time(frames, box, eps_tilde, min_pts_tilde, periodic=False):
    """Time of the first frame in which at least one cluster is detected.

    ``frames`` is a time-ordered list of (time, positions); detection
    parameters are derived per frame from the dimensionless pair, so mixed
    particle counts are handled.  Returns None when no frame shows a
    cluster ("not detected").  With properly tuned parameters the first
    (uniform) frame never triggers.
    """
    if not frames:
        raise ValueError("empty frame list")
    for time, positions in frames:
        n = np.atleast_2d(positions).shape[0]
        params = DbscanParams.from_dimensionless(eps_tilde, min_pts_tilde, n, box)
        if dbscan(positions, box, params, periodic=periodic).n_clusters > 0:
            return float(time)
    return None
