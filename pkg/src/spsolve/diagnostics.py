"""Closed-form constants, thresholds, a-priori bounds and tail audits."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np

from .fields import Field, dirichlet_form
from .functionals import Params, energy
from .grid import RadialGrid, critical_exponent, omega
from .weights import WeightModel

__all__ = [
    "ConstantsReport",
    "AprioriBounds",
    "TailMass",
    "AuditReport",
    "sobolev_S",
    "sobolev_S_dim",
    "s_lambda_const",
    "lambda1_threshold",
    "cbar_pipeline",
    "apriori_bounds",
    "apriori_audit",
    "kbar_threshold",
    "tail_mass",
    "sobolev_best_constant",
    "critical_nonexistence_audit",
    "constants_report",
]


def sobolev_S_dim(dim: int) -> float:
    """Best constant of |grad u|_2^2 >= S |u|_{2*}^2 in R^N."""
    return dim * (dim - 2) * math.pi * (math.gamma(dim / 2) / math.gamma(dim)) ** (2.0 / dim)


def sobolev_S() -> float:
    """The three-dimensional constant 3 (pi/2)^{4/3}."""
    return 3.0 * (math.pi / 2.0) ** (4.0 / 3.0)


def _check_q_range(q: float):
    if not (3.0 <= q < 5.0):
        raise ValueError(f"q={q} outside [3, 5)")


def s_lambda_const(q: float, lam: float, mbar: float) -> float:
    """(q-2) [3(q+1)]^{-3/(q-2)} (2(5-q)/(lam mbar))^{(5-q)/(q-2)}."""
    _check_q_range(q)
    if not (lam > 0 and mbar > 0):
        raise ValueError("lambda and mbar must be positive")
    return (q - 2.0) * (3.0 * (q + 1.0)) ** (-3.0 / (q - 2.0)) * (
        2.0 * (5.0 - q) / (lam * mbar)
    ) ** ((5.0 - q) / (q - 2.0))


def lambda1_threshold(q: float, mbar: float, Cbar: float) -> float:
    """Smallest lambda with s_lambda_const(q, lambda, mbar) <= S^3 / (4 Cbar^4)."""
    _check_q_range(q)
    if not (mbar > 0 and Cbar > 0):
        raise ValueError("mbar and Cbar must be positive")
    target = sobolev_S() ** 3 / (4.0 * Cbar**4)
    pref = (q - 2.0) * (3.0 * (q + 1.0)) ** (-3.0 / (q - 2.0))
    expo = (5.0 - q) / (q - 2.0)
    return 2.0 * (5.0 - q) / (mbar * (target / pref) ** (1.0 / expo))


def cbar_pipeline(q: float, p: Params, rho_vanishing: WeightModel, v: Field, s_q1: float | None = None):
    """Mountain-pass ceiling cbar from a profile supported where rho = 0,
    and the E-norm bound Cbar it implies for Palais-Smale sequences.

    cbar = max_t I_0(t v) in closed form.  For q > 3 the level identity
    bounds the H1 and Coulomb parts separately; for q = 3 the power term is
    controlled through the H1 -> L4 constant ``s_q1`` (estimated on v's grid
    when not supplied).
    """
    g = v.grid
    rv = rho_vanishing(g.r)
    if not np.any(v.v):
        raise ValueError("v must be nonzero")
    if np.any((v.v != 0) & (rv != 0)):
        raise ValueError("v is not supported in the zero set of the weight")
    A = dirichlet_form(g, v.v) + float(np.dot(g.w, v.v**2))
    C = p.mu * float(np.dot(g.w, np.abs(v.v) ** (q + 1)))
    cbar = (q - 1) / (2 * (q + 1)) * A ** ((q + 1) / (q - 1)) / C ** (2 / (q - 1))
    om = omega(p.dim)
    if q > 3:
        h1_sq = 2 * (q + 1) * cbar / (q - 1)
        coul = 4 * (q + 1) * cbar / (q - 3)
    elif q == 3:
        if s_q1 is None:
            s_q1 = sobolev_best_constant(3.0, g)
        h1_sq = 4 * cbar
        coul = 4 * (cbar + h1_sq + h1_sq**2 / s_q1**4)
    else:
        raise ValueError("the uniform bound needs q >= 3")
    return cbar, math.sqrt(h1_sq + math.sqrt(om * coul))


class AprioriBounds(NamedTuple):
    delta_max: float
    gamma_max: float


def apriori_bounds(c: float, k: float, q: float, dim: int) -> AprioriBounds:
    """Bounds on mu int |u|^{q+1} and lam^2 int rho phi u^2 at level c.

    The Nehari equation and the level equation, combined with the Pohozaev
    inequality, are solved for the Coulomb and power integrals.
    """
    den = 2.0 * (q - 2.0) + k * (q - 1.0)
    if den <= 0:
        raise ValueError(f"need k > -2(q-2)/(q-1); got k={k}, q={q}")
    delta = c * (6.0 - dim + 2.0 * k) * (q + 1.0) / den
    gamma = 2.0 * c * (2.0 * (q + 1.0) - dim * (q - 1.0)) / den
    return AprioriBounds(delta, gamma)


def apriori_audit(report, rho: WeightModel, k: float | None = None, tol: float = 1e-6) -> dict:
    """Check a solver report against :func:`apriori_bounds` at its level."""
    p = report.params
    u = report.u
    g = u.grid
    k = rho.pohozaev_k() if k is None else k
    e = energy(u, p, rho)
    alpha = 2.0 * (e.kinetic + e.mass)
    gamma = 4.0 * e.coulomb
    delta = (p.q + 1.0) * e.power
    b = apriori_bounds(report.level, k, p.q, p.dim)
    scale = max(1.0, abs(b.delta_max))
    return {
        "alpha": alpha,
        "gamma": gamma,
        "delta": delta,
        "delta_max": b.delta_max,
        "gamma_max": b.gamma_max,
        "delta_ok": delta <= b.delta_max + tol * scale,
        "gamma_ok": gamma <= b.gamma_max + tol * scale,
        "alpha_identity": abs(alpha - (delta - gamma)) / scale,
        "grid_n": g.n,
    }


def kbar_threshold(dim: int, q: float) -> float:
    """(max(N/4, 1/(q-1)) (3-q) - 1)_+."""
    if q <= 2:
        raise ValueError("need q > 2")
    return max(0.0, max(dim / 4.0, 1.0 / (q - 1.0)) * (3.0 - q) - 1.0)


class TailMass(NamedTuple):
    a_part: float
    b_part: float
    bound_a: float


def tail_mass(u: Field, rho: WeightModel, R: float, M: float, lam: float) -> TailMass:
    """Split int_{r > R} |u|^3 by the level set {rho >= M}.

    ``bound_a = omega^{-1/2} ||u||_E^3 / (lam M)`` bounds a_part for every
    field vanishing at r_max.
    """
    g = u.grid
    if R >= g.r_max:
        raise ValueError("R must be below r_max")
    if not (lam > 0 and M > 0):
        raise ValueError("lambda and M must be positive")
    rv = rho(g.r)
    cube = g.w * np.abs(u.v) ** 3
    outside = g.r > R
    a = float(np.sum(cube[outside & (rv >= M)]))
    b = float(np.sum(cube[outside & (rv < M)]))
    en = energy(u, Params(dim=g.dim, q=2.0, lam=lam), rho).e_norm
    return TailMass(a, b, en**3 / (math.sqrt(g.omega) * lam * M))


def sobolev_best_constant(q: float, grid: RadialGrid) -> float:
    """inf ||u||_H1 / ||u||_{q+1} over radial profiles on the grid.

    For q + 1 < 2* the infimum is attained at the positive solution w of
    -lap w + w = w^q, where it equals ||w||_H1^{(q-1)/(q+1)}.  At q + 1 = 2*
    the infimum equals sqrt(S_N) and is not attained.
    """
    from .solvers import solve_groundstate
    from .weights import WeightModel as _WM

    top = critical_exponent(grid.dim)
    if not (2.0 < q + 1.0 <= top + 1e-12):
        raise ValueError(f"q+1={q + 1} outside (2, {top:g}]")
    if abs(q + 1.0 - top) < 1e-12:
        return math.sqrt(sobolev_S_dim(grid.dim))
    rep = solve_groundstate(Params(dim=grid.dim, q=q, lam=0.0), _WM.constant(0.0), grid)
    if not rep.converged:
        raise RuntimeError("Sobolev quotient minimisation did not converge")
    w = rep.u.v
    h1 = math.sqrt(dirichlet_form(grid, w) + float(np.dot(grid.w, w**2)))
    lq = float(np.dot(grid.w, np.abs(w) ** (q + 1))) ** (1.0 / (q + 1))
    return h1 / lq


@dataclass(frozen=True)
class AuditReport:
    infeasible: bool
    grad_coefficient: float
    mass_coefficient: float
    coulomb_coefficient: float
    explanation: str


def critical_nonexistence_audit(p: Params, k: float) -> AuditReport:
    """Pohozaev minus (N-2)/2 times Nehari at q = 2*-1.

    What remains is  mass_coefficient int u^2 + coulomb_coefficient
    lam^2 int rho phi u^2 <= 0, with gradient and power terms cancelled.
    """
    N = p.dim
    if not p.is_critical:
        raise ValueError("the audit applies to q = 2*-1 only")
    grad = (N - 2) / 2.0 - (N - 2) / 2.0
    mass = N / 2.0 - (N - 2) / 2.0
    coul = (N + 2 + 2 * k) / 4.0 - (N - 2) / 2.0
    if k >= (N - 6) / 2.0:
        msg = (
            f"with k={k:g} >= (N-6)/2 every term left is nonnegative, so int u^2 <= 0 "
            "and the only solution is u = 0"
        )
        return AuditReport(True, grad, mass, coul, msg)
    msg = f"k={k:g} < (N-6)/2: the Coulomb coefficient {coul:g} is negative and no conclusion follows"
    return AuditReport(False, grad, mass, coul, msg)


@dataclass(frozen=True)
class ConstantsReport:
    sobolev_S: float
    s_q1: float
    s_lambda: float
    lambda1: float
    cbar_level: float
    Cbar: float
    alpha: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def constants_report(
    p: Params, rho_vanishing: WeightModel, v: Field, mbar: float, alpha: float | None = None
) -> ConstantsReport:
    """All vanishing-weight constants for one configuration.

    ``alpha`` is an observed lower bound on int |u|^{q+1} along iterates (an
    empirical stand-in; the constant itself is not computable).
    """
    s_q1 = sobolev_best_constant(p.q, v.grid)
    cbar, Cbar = cbar_pipeline(p.q, p, rho_vanishing, v, s_q1 if p.q == 3 else None)
    return ConstantsReport(
        sobolev_S=sobolev_S(),
        s_q1=s_q1,
        s_lambda=s_lambda_const(p.q, p.lam, mbar),
        lambda1=lambda1_threshold(p.q, mbar, Cbar),
        cbar_level=cbar,
        Cbar=Cbar,
        alpha=alpha,
    )
