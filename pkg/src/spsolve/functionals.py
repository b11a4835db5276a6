"""Energy functional, its gradient, and the scalar constraint functionals.

All quantities are evaluated with the grid's quadrature, so they are exact
functions of the nodal values.  In particular the nodal gradient returned by
:func:`energy_gradient` is the true derivative of :func:`energy`, and
:func:`gradient_field` divides it by the quadrature weights to obtain the
strong form

    -lap u + u + lambda^2 rho phi_u u - mu |u|^{q-1} u.

The last grid node carries the Dirichlet value u = 0 and is not a degree of
freedom; gradients are reported as 0 there.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .fields import Field, dirichlet_form, stiffness_apply
from .grid import critical_exponent
from .poisson import charge, grad_phi_sq, solve_phi
from .weights import WeightModel

__all__ = [
    "Params",
    "EnergyBreakdown",
    "Integrals",
    "integrals",
    "energy",
    "energy_gradient",
    "gradient_field",
    "nehari_G",
    "nehari_terms",
    "pohozaev_residual",
    "pohozaev_terms",
    "j_functional",
    "j_terms",
    "coulomb_sobolev_gap",
    "e_norm",
    "default_nu",
    "kbar_interval",
    "resolve_kbar",
]


@dataclass(frozen=True)
class Params:
    """Model parameters.

    ``b``, ``c`` and ``d`` weight the mass, Coulomb and power terms of the
    Pohozaev functional; left as ``None`` they default to 1, lam**2 and mu.
    ``nu`` and ``kbar`` enter the fibering functional only.  ``k`` is the
    constant of the Pohozaev inequality for non-homogeneous weights.
    """

    dim: int = 3
    q: float = 3.0
    lam: float = 1.0
    mu: float = 1.0
    nu: float | None = None
    kbar: float | None = None
    k: float | None = None
    b: float | None = None
    c: float | None = None
    d: float | None = None

    def __post_init__(self):
        if self.dim not in (3, 4, 5, 6):
            raise ValueError(f"unsupported dimension {self.dim}")
        top = critical_exponent(self.dim) - 1.0
        if not (1.0 < self.q <= top + 1e-12):
            raise ValueError(f"q={self.q} outside (1, {top:g}]")
        if self.lam < 0:
            raise ValueError("lambda must be nonnegative")
        if not (0.5 <= self.mu <= 1.0):
            raise ValueError("mu must lie in [1/2, 1]")
        if self.nu is not None and self.kbar is not None:
            lo, hi = kbar_interval(self.dim, self.q, self.nu)
            if self.nu <= max(self.dim / 2.0, 2.0 / (self.q - 1.0)) or not (lo < self.kbar < hi):
                raise ValueError(
                    f"inadmissible nu={self.nu}, kbar={self.kbar}: need kbar in ({lo:g}, {hi:g})"
                )

    @property
    def is_critical(self) -> bool:
        return abs(self.q - (critical_exponent(self.dim) - 1.0)) < 1e-12

    @property
    def b_eff(self) -> float:
        return 1.0 if self.b is None else self.b

    @property
    def c_eff(self) -> float:
        return self.lam**2 if self.c is None else self.c

    @property
    def d_eff(self) -> float:
        return self.mu if self.d is None else self.d

    def with_(self, **kw) -> "Params":
        return replace(self, **kw)


def kbar_interval(dim: int, q: float, nu: float) -> tuple[float, float]:
    """Open interval of homogeneity degrees admissible for a given nu."""
    return (nu * (3.0 - q) - 2.0) / 2.0, (4.0 * nu - dim - 2.0) / 2.0


def default_nu(dim: int, q: float, kbar: float | None = None) -> float:
    """Smallest nu = max(N/2, 2/(q-1)) + j/2, j >= 1, whose interval holds kbar."""
    base = max(dim / 2.0, 2.0 / (q - 1.0))
    for j in range(1, 400):
        nu = base + 0.5 * j
        if kbar is None:
            return nu
        lo, hi = kbar_interval(dim, q, nu)
        if lo < kbar < hi:
            return nu
        if lo >= kbar:
            break
    raise ValueError(f"no admissible nu for dim={dim}, q={q}, kbar={kbar}")


def resolve_kbar(p: Params, rho: WeightModel) -> float:
    """Homogeneity degree from the params, else from the weight model."""
    if p.kbar is not None:
        return float(p.kbar)
    if rho.kind == "homogeneous":
        return float(rho.kbar)
    if rho.kind == "constant":
        return 0.0
    raise ValueError("weight is not homogeneous; fibering needs a homogeneity degree")


@dataclass(frozen=True)
class Integrals:
    """Raw integrals of a field: grad = int |grad u|^2, mass = int u^2,
    coul = int rho phi_u u^2, pw = int |u|^{q+1}."""

    grad: float
    mass: float
    coul: float
    pw: float
    phi: Field


def integrals(u: Field, p: Params, rho: WeightModel, phi: Field | None = None) -> Integrals:
    g = u.grid
    if phi is None:
        phi = solve_phi(g, rho, u)
    return Integrals(
        grad=dirichlet_form(g, u.v),
        mass=float(np.dot(g.w, u.v**2)),
        coul=float(np.dot(charge(g, rho, u), phi.v)),
        pw=float(np.dot(g.w, np.abs(u.v) ** (p.q + 1.0))),
        phi=phi,
    )


@dataclass(frozen=True)
class EnergyBreakdown:
    kinetic: float
    mass: float
    coulomb: float
    power: float
    total: float
    h1_norm: float
    e_norm: float


def _check(u: Field, p: Params):
    if u.grid.dim != p.dim:
        raise ValueError(f"grid dimension {u.grid.dim} differs from params dimension {p.dim}")


def energy(u: Field, p: Params, rho: WeightModel, phi: Field | None = None) -> EnergyBreakdown:
    """Perturbed energy 1/2 |grad u|^2 + 1/2 u^2 + lam^2/4 rho phi u^2 - mu/(q+1)|u|^{q+1}."""
    _check(u, p)
    it = integrals(u, p, rho, phi)
    kin, mass = 0.5 * it.grad, 0.5 * it.mass
    coul = 0.25 * p.lam**2 * it.coul
    pw = p.mu / (p.q + 1.0) * it.pw
    h1 = math.sqrt(it.grad + it.mass)
    en = math.sqrt(it.grad + it.mass + p.lam * math.sqrt(u.grid.omega * it.coul))
    return EnergyBreakdown(kin, mass, coul, pw, kin + mass + coul - pw, h1, en)


def energy_gradient(u: Field, p: Params, rho: WeightModel, phi: Field | None = None) -> np.ndarray:
    """Derivative of the discrete energy with respect to the nodal values."""
    _check(u, p)
    g = u.grid
    if phi is None:
        phi = solve_phi(g, rho, u)
    rv = rho(g.r)
    v = u.v
    out = stiffness_apply(g, v) + g.w * (
        v + p.lam**2 * rv * phi.v * v - p.mu * np.abs(v) ** (p.q - 1.0) * v
    )
    out[-1] = 0.0
    return out


def gradient_field(u: Field, p: Params, rho: WeightModel, phi: Field | None = None) -> Field:
    """Strong form of the energy derivative, in L2 duality with the quadrature."""
    return Field(u.grid, energy_gradient(u, p, rho, phi) / u.grid.w)


def nehari_terms(u: Field, p: Params, rho: WeightModel, phi: Field | None = None) -> np.ndarray:
    it = integrals(u, p, rho, phi)
    return np.array([it.grad + it.mass, p.lam**2 * it.coul, -p.mu * it.pw])


def nehari_G(u: Field, p: Params, rho: WeightModel, phi: Field | None = None) -> float:
    """||u||_H1^2 + lam^2 int rho phi u^2 - mu int |u|^{q+1}, the pairing I'(u)u."""
    _check(u, p)
    return float(np.sum(nehari_terms(u, p, rho, phi)))


def _pohozaev_k(p: Params, rho: WeightModel) -> float:
    if p.k is not None:
        return float(p.k)
    if rho.kind == "homogeneous":
        return float(rho.kbar)
    if rho.kind == "constant":
        return 0.0
    raise ValueError("non-homogeneous weight: supply the Pohozaev constant k in Params")


def pohozaev_terms(u: Field, p: Params, rho: WeightModel, phi: Field | None = None) -> np.ndarray:
    N = p.dim
    k = _pohozaev_k(p, rho)
    it = integrals(u, p, rho, phi)
    return np.array(
        [
            (N - 2.0) / 2.0 * it.grad,
            N * p.b_eff / 2.0 * it.mass,
            (N + 2.0 + 2.0 * k) * p.c_eff / 4.0 * it.coul,
            -N * p.d_eff / (p.q + 1.0) * it.pw,
        ]
    )


def pohozaev_residual(u: Field, p: Params, rho: WeightModel, phi: Field | None = None) -> float:
    """Pohozaev functional; zero on solutions for homogeneous weights, <= 0 otherwise."""
    _check(u, p)
    return float(np.sum(pohozaev_terms(u, p, rho, phi)))


def _fiber_nu_kbar(p: Params, rho: WeightModel) -> tuple[float, float]:
    kbar = resolve_kbar(p, rho)
    nu = p.nu if p.nu is not None else default_nu(p.dim, p.q, kbar)
    lo, hi = kbar_interval(p.dim, p.q, nu)
    if nu <= max(p.dim / 2.0, 2.0 / (p.q - 1.0)) or not (lo < kbar < hi):
        raise ValueError(f"inadmissible nu={nu} for kbar={kbar}")
    return nu, kbar


def j_terms(u: Field, p: Params, rho: WeightModel, phi: Field | None = None) -> np.ndarray:
    N, q = p.dim, p.q
    nu, kbar = _fiber_nu_kbar(p, rho)
    it = integrals(u, p, rho, phi)
    return np.array(
        [
            (2 * nu + 2 - N) / 2.0 * it.grad,
            (2 * nu - N) / 2.0 * it.mass,
            (4 * nu - N - 2 - 2 * kbar) / 4.0 * p.lam**2 * it.coul,
            -(nu * (q + 1) - N) / (q + 1) * p.mu * it.pw,
        ]
    )


def j_functional(u: Field, p: Params, rho: WeightModel, phi: Field | None = None) -> float:
    """Derivative at t = 1 of the energy along t -> t^nu u(t r)."""
    _check(u, p)
    return float(np.sum(j_terms(u, p, rho, phi)))


def coulomb_sobolev_gap(u: Field, rho: WeightModel) -> float:
    """(int |grad u|^2)^{1/2} (int |grad phi_u|^2)^{1/2} - int rho |u|^3.

    Nonnegative up to rounding for every field vanishing at r_max.
    """
    g = u.grid
    phi = solve_phi(g, rho, u)
    lhs = math.sqrt(dirichlet_form(g, u.v)) * math.sqrt(grad_phi_sq(g, phi))
    return lhs - float(np.dot(g.w, rho(g.r) * np.abs(u.v) ** 3))


def e_norm(u: Field, p: Params, rho: WeightModel) -> float:
    """(||u||_H1^2 + lam (omega int rho phi_u u^2)^{1/2})^{1/2}."""
    return energy(u, p, rho).e_norm
