"""Torus geometry helpers shared by the simulator and the observables."""

from __future__ import annotations

import numpy as np

__all__ = ["minimum_image", "wrap_positions"]


def minimum_image(dx, box):
    """Map displacements into [-box/2, box/2) per component.

    The half-open convention sends +box/2 to -box/2, so every displacement
    has exactly one image.
    """
    dx = np.asarray(dx, dtype=float)
    y = dx - box * np.round(dx / box)
    return np.where(y >= 0.5 * box, y - box, y)


def wrap_positions(x, box):
    """Map coordinates into [0, box) per component."""
    return np.mod(x, box)
