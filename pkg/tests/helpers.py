"""Seeded random smooth radial fields for tests."""
from __future__ import annotations

import numpy as np

from spsolve.fields import Field


def smooth_field(grid, rng, n_bumps: int = 3, amp: float = 2.0, signed: bool = True) -> Field:
    """Sum of Gaussian bumps, tapered to vanish at r_max."""
    v = np.zeros(grid.n)
    for _ in range(n_bumps):
        a = rng.uniform(-amp, amp) if signed else rng.uniform(0.2, amp)
        c = rng.uniform(0.0, 0.5 * grid.r_max)
        w = rng.uniform(0.05, 0.2) * grid.r_max
        v += a * np.exp(-(((grid.r - c) / w) ** 2))
    v *= 1.0 - (grid.r / grid.r_max) ** 2
    v[-1] = 0.0
    return Field(grid, v)
