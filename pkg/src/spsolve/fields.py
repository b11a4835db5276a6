"""Radial fields with their norms and finite-difference operators."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import RadialGrid

__all__ = [
    "Field",
    "radial_derivative",
    "radial_laplacian",
    "dirichlet_form",
    "stiffness_apply",
    "norm",
]


@dataclass(frozen=True, eq=False)
class Field:
    """Samples of a radial profile on a grid.

    The last node is r_max, where fields take their Dirichlet value 0.
    """

    grid: RadialGrid
    v: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.v, dtype=float)
        if v.shape != self.grid.r.shape:
            raise ValueError(f"field has shape {v.shape}, grid has {self.grid.r.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("field contains non-finite values")
        object.__setattr__(self, "v", v)

    @classmethod
    def from_function(cls, grid: RadialGrid, fn) -> "Field":
        return cls(grid, fn(grid.r))

    @classmethod
    def zeros(cls, grid: RadialGrid) -> "Field":
        return cls(grid, np.zeros(grid.n))

    def with_values(self, v: np.ndarray) -> "Field":
        return Field(self.grid, v)

    def __add__(self, other: "Field") -> "Field":
        return Field(self.grid, self.v + _values(other))

    def __sub__(self, other: "Field") -> "Field":
        return Field(self.grid, self.v - _values(other))

    def __mul__(self, c: float) -> "Field":
        return Field(self.grid, self.v * c)

    __rmul__ = __mul__

    def __neg__(self) -> "Field":
        return Field(self.grid, -self.v)

    def __abs__(self) -> "Field":
        return Field(self.grid, np.abs(self.v))

    def is_zero(self) -> bool:
        return not np.any(self.v)


def _values(x) -> np.ndarray:
    return x.v if isinstance(x, Field) else np.asarray(x, dtype=float)


def radial_derivative(u: Field) -> Field:
    """du/dr: second-order central differences inside, one-sided at the ends."""
    if u.grid.n < 3:
        raise ValueError("need at least 3 nodes")
    return Field(u.grid, np.gradient(u.v, u.grid.r, edge_order=2))


def radial_laplacian(u: Field, dim: int | None = None) -> Field:
    """u'' + (N-1)/r u' by finite differences.

    Interior nodes use the three-point nonuniform stencil.  The first node
    uses the flux balance of the ball of radius (r0+r1)/2 around the origin
    (symmetry u'(0) = 0), which is exact for r^2; the last node uses a
    one-sided second-order stencil.
    """
    g = u.grid
    if g.n < 3:
        raise ValueError("need at least 3 nodes")
    N = g.dim if dim is None else dim
    r, v = g.r, u.v
    out = np.empty_like(v)
    hm = r[1:-1] - r[:-2]
    hp = r[2:] - r[1:-1]
    d2 = 2.0 * (hm * v[2:] - (hm + hp) * v[1:-1] + hp * v[:-2]) / (hm * hp * (hm + hp))
    d1 = (hm**2 * v[2:] + (hp**2 - hm**2) * v[1:-1] - hp**2 * v[:-2]) / (hm * hp * (hm + hp))
    out[1:-1] = d2 + (N - 1) / r[1:-1] * d1
    rhalf = 0.5 * (r[0] + r[1])
    out[0] = N * (v[1] - v[0]) / ((r[1] - r[0]) * rhalf)
    # last node: quadratic through the final three nodes
    x0, x1, x2 = r[-3], r[-2], r[-1]
    y0, y1, y2 = v[-3], v[-2], v[-1]
    a = (y0 / ((x0 - x1) * (x0 - x2)) + y1 / ((x1 - x0) * (x1 - x2)) + y2 / ((x2 - x0) * (x2 - x1)))
    d2_end = 2.0 * a
    d1_end = (
        y0 * (x2 - x1) / ((x0 - x1) * (x0 - x2))
        + y1 * (x2 - x0) / ((x1 - x0) * (x1 - x2))
        + y2 * (2 * x2 - x0 - x1) / ((x2 - x0) * (x2 - x1))
    )
    out[-1] = d2_end + (N - 1) / x2 * d1_end
    return Field(g, out)


def dirichlet_form(grid: RadialGrid, v: np.ndarray) -> float:
    """Finite-volume approximation of int_{B_rmax} |grad v|^2."""
    return float(np.dot(grid.cond, np.diff(v) ** 2))


def stiffness_apply(grid: RadialGrid, v: np.ndarray) -> np.ndarray:
    """Gradient of dirichlet_form/2 with respect to the nodal values."""
    flux = grid.cond * np.diff(v)
    out = np.zeros_like(v)
    out[:-1] -= flux
    out[1:] += flux
    return out


def norm(u: Field, kind: str = "H1", p: float | None = None) -> float:
    """H1, Lp or D12 norm of a radial field with the N-dimensional measure.

    ``kind`` is one of ``"H1"``, ``"D12"``, ``"Lp"`` (``p`` required) or a
    shorthand such as ``"L2"``.
    """
    g = u.grid
    if kind.upper().startswith("L") and kind.upper() != "LP":
        p = float(kind[1:])
        kind = "Lp"
    kind_u = kind.upper()
    if kind_u == "H1":
        return float(np.sqrt(dirichlet_form(g, u.v) + np.dot(g.w, u.v**2)))
    if kind_u == "D12":
        return float(np.sqrt(dirichlet_form(g, u.v)))
    if kind_u == "LP":
        if p is None or not p >= 1:
            raise ValueError(f"invalid Lp exponent {p!r}")
        return float(np.dot(g.w, np.abs(u.v) ** p) ** (1.0 / p))
    raise ValueError(f"unknown norm kind {kind!r}")
