"""Newtonian potential of the charge density rho*u^2.

The potential solves -lap(phi) = rho u^2 on R^N with the charge confined to
the ball of radius r_max.  On the grid this is the finite-volume system

    c_{i+1/2} (phi_i - phi_{i+1}) = Q_i,          i < n-1
    phi_{n-1} = Q_total / (omega r_max^{N-2})

where Q_i is the charge enclosed by the i-th interface and c the interface
conductances of the grid.  The last relation is the exact exterior solution,
so the potential needs no artificial boundary value.  Written as a matrix,
A phi = W rho u^2 with A the stiffness matrix plus a Robin term
kappa = omega r_max^{N-2} on the last node, hence

    D(phi) + kappa phi_{n-1}^2 = sum_i w_i rho_i phi_i u_i^2

holds to rounding error.  The left side is int_{R^N} |grad phi|^2 including
the exterior shell r > r_max.
"""
from __future__ import annotations

import numpy as np

from .fields import Field, dirichlet_form
from .grid import RadialGrid
from .weights import WeightModel

__all__ = [
    "solve_phi",
    "charge",
    "potential_from_charge",
    "coulomb_integral",
    "grad_phi_sq",
    "phi_identity_residual",
    "robin_coefficient",
    "green_matrix",
]


def _rho_samples(grid: RadialGrid, rho) -> np.ndarray:
    vals = rho(grid.r) if callable(rho) else np.asarray(rho, dtype=float)
    vals = np.broadcast_to(np.asarray(vals, dtype=float), grid.r.shape)
    if np.any(vals < 0) or not np.all(np.isfinite(vals)):
        raise ValueError("weight must be finite and nonnegative on the grid")
    return vals


def robin_coefficient(grid: RadialGrid) -> float:
    """kappa = omega r_max^{N-2}: exterior field energy per unit potential^2."""
    return grid.omega * grid.r_max ** (grid.dim - 2)


def charge(grid: RadialGrid, rho: WeightModel, u: Field) -> np.ndarray:
    """Nodal charges w_i rho_i u_i^2."""
    return grid.w * _rho_samples(grid, rho) * u.v**2


def solve_phi(grid: RadialGrid, rho: WeightModel, u: Field) -> Field:
    """Potential of rho*u^2 by an inward charge sweep and outward summation.

    Linear in u^2. For any u it is nonnegative and nonincreasing in r.
    """
    if u.grid.n != grid.n:
        raise ValueError("field and grid do not match")
    return Field(grid, potential_from_charge(grid, charge(grid, rho, u)))


def potential_from_charge(grid: RadialGrid, g: np.ndarray) -> np.ndarray:
    """Nodal potential generated by nodal charges ``g`` (any sign)."""
    q = np.cumsum(g)
    phi = np.empty(grid.n)
    phi[-1] = q[-1] / robin_coefficient(grid)
    steps = q[:-1] / grid.cond
    # phi_i = phi_last + sum_{k >= i} Q_k / c_{k+1/2}
    phi[:-1] = phi[-1] + np.cumsum(steps[::-1])[::-1]
    return phi


def coulomb_integral(grid: RadialGrid, rho: WeightModel, u: Field, phi: Field | None = None) -> float:
    """int rho phi_u u^2."""
    if phi is None:
        phi = solve_phi(grid, rho, u)
    return float(np.dot(charge(grid, rho, u), phi.v))


def grad_phi_sq(grid: RadialGrid, phi: Field) -> float:
    """int_{R^N} |grad phi|^2, the exterior shell included."""
    return dirichlet_form(grid, phi.v) + robin_coefficient(grid) * phi.v[-1] ** 2


def phi_identity_residual(grid: RadialGrid, rho: WeightModel, u: Field, phi: Field) -> float:
    """|int |grad phi|^2 - int rho phi u^2| / max(1, int |grad phi|^2)."""
    lhs = grad_phi_sq(grid, phi)
    rhs = coulomb_integral(grid, rho, u, phi)
    return abs(lhs - rhs) / max(1.0, lhs)


def green_matrix(grid: RadialGrid) -> np.ndarray:
    """Dense inverse of the discrete Poisson operator.

    ``solve_phi(u).v == green_matrix(grid) @ charge(grid, rho, u)``.  The
    entries depend on max(i, j) only.
    """
    inv_c = 1.0 / grid.cond
    gamma = np.empty(grid.n)
    gamma[-1] = 1.0 / robin_coefficient(grid)
    gamma[:-1] = gamma[-1] + np.cumsum(inv_c[::-1])[::-1]
    idx = np.arange(grid.n)
    return gamma[np.maximum.outer(idx, idx)]
