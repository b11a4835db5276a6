"""Scaling fibers t -> t^nu u(t r) and scalar Nehari projection."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .fields import Field
from .functionals import Params, _fiber_nu_kbar, integrals
from .weights import WeightModel

__all__ = [
    "FiberPolynomial",
    "scale_field",
    "fiber_coeffs",
    "fiber_argmax",
    "nehari_project",
    "project_to_fiber_max",
]


@dataclass(frozen=True)
class FiberPolynomial:
    """f(t) = a t^e0 + b t^e1 + c t^e2 - d t^e3 with e3 the largest exponent."""

    a: float
    b: float
    c: float
    d: float
    exponents: tuple

    def __post_init__(self):
        if len(self.exponents) != 4:
            raise ValueError("need four exponents")

    @property
    def positive_part(self) -> tuple:
        return (self.a, self.b, self.c)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        e = self.exponents
        return self.a * t ** e[0] + self.b * t ** e[1] + self.c * t ** e[2] - self.d * t ** e[3]

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        e = self.exponents
        return (
            self.a * e[0] * t ** (e[0] - 1)
            + self.b * e[1] * t ** (e[1] - 1)
            + self.c * e[2] * t ** (e[2] - 1)
            - self.d * e[3] * t ** (e[3] - 1)
        )


def scale_field(u: Field, t: float, nu: float) -> Field:
    """Samples of t^nu u(t r) on u's grid.

    The profile is interpolated by a cubic spline of its even extension and
    taken to vanish beyond r_max.
    """
    if not t > 0:
        raise ValueError("scale factor must be positive")
    if t == 1.0:
        return u.with_values(u.v.copy())
    g = u.grid
    x = np.concatenate([-g.r[::-1], g.r])
    y = np.concatenate([u.v[::-1], u.v])
    spline = CubicSpline(x, y)
    s = t * g.r
    vals = np.where(s <= g.r_max, spline(np.minimum(s, g.r_max)), 0.0)
    vals[-1] = 0.0 if u.v[-1] == 0.0 else vals[-1]
    return Field(g, t**nu * vals)


def fiber_coeffs(u: Field, p: Params, rho: WeightModel) -> FiberPolynomial:
    """Coefficients of the energy along the fiber of u, f(1) = energy(u).total."""
    nu, kbar = _fiber_nu_kbar(p, rho)
    N, q = p.dim, p.q
    it = integrals(u, p, rho)
    fp = FiberPolynomial(
        a=0.5 * it.grad,
        b=0.5 * it.mass,
        c=0.25 * p.lam**2 * it.coul,
        d=p.mu / (q + 1.0) * it.pw,
        exponents=(2 * nu + 2 - N, 2 * nu - N, 4 * nu - N - 2 - 2 * kbar, nu * (q + 1) - N),
    )
    if not (fp.a > 0 and fp.b > 0 and fp.d > 0):
        raise ValueError("degenerate fiber: the field vanishes")
    return fp


def _decreasing_root(fn, x0: float = 0.0) -> float:
    """Root of a strictly decreasing function of x by bracketing then brentq."""
    lo = hi = x0
    step = 1.0
    while fn(lo) <= 0:
        lo -= step
        step *= 2
        if step > 1e4:
            raise ValueError("failed to bracket root")
    step = 1.0
    while fn(hi) >= 0:
        hi += step
        step *= 2
        if step > 1e4:
            raise ValueError("failed to bracket root")
    return brentq(fn, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)


def fiber_argmax(fp: FiberPolynomial) -> float:
    """Unique t* > 0 with f'(t*) = 0.

    With P the top exponent, f'(t) = 0 reads
    sum_i coeff_i e_i t^{e_i - P} = d P, whose left side strictly decreases
    from +inf to 0.  The root is located in log t.
    """
    e = fp.exponents
    top = e[3]
    terms = [(cf, ei) for cf, ei in zip(fp.positive_part, e[:3]) if cf != 0.0]
    if fp.d <= 0 or fp.a <= 0 or fp.b <= 0 or fp.c < 0:
        raise ValueError("degenerate fiber coefficients")
    if any(ei <= 0 or ei >= top for _, ei in terms):
        raise ValueError(f"inadmissible exponents {e}")
    logs = [(math.log(cf * ei), ei - top) for cf, ei in terms]
    target = math.log(fp.d * top)

    def h(x):
        z = np.array([lc + de * x for lc, de in logs])
        zmax = z.max()
        return zmax + math.log(np.exp(z - zmax).sum()) - target

    return math.exp(_decreasing_root(h))


def nehari_project(u: Field, p: Params, rho: WeightModel) -> float:
    """t* > 0 with nehari_G(t* u) = 0.

    t^2 A + t^4 B = t^{q+1} C with A = ||u||_H1^2, B = lam^2 int rho phi u^2,
    C = mu int |u|^{q+1}.
    """
    it = integrals(u, p, rho)
    A = it.grad + it.mass
    B = p.lam**2 * it.coul
    C = p.mu * it.pw
    if not (A > 0 and C > 0):
        raise ValueError("cannot project the zero field")
    q = p.q
    if B == 0.0:
        return (A / C) ** (1.0 / (q - 1.0))
    if abs(q - 3.0) < 1e-14:
        if C <= B:
            raise ValueError("fiber has no Nehari crossing (C <= B)")
        return math.sqrt(A / (C - B))
    if q < 3.0:
        raise ValueError("Nehari projection is not unique for q < 3 with lam > 0")

    # (A t^{1-q} + B t^{3-q}) / C - 1 is strictly decreasing in t
    la, lb, lc = math.log(A), math.log(B), math.log(C)

    def h(x):
        return float(np.logaddexp(la + (1 - q) * x, lb + (3 - q) * x)) - lc

    x = _decreasing_root(h)
    if x > 100.0:
        # C barely exceeds B near q = 3: the crossing is far out on the ray
        raise ValueError(f"Nehari point out of range (log t = {x:.3g})")
    return math.exp(x)


def project_to_fiber_max(u: Field, p: Params, rho: WeightModel) -> tuple[Field, float]:
    """Move u to the maximum of the energy along its fiber."""
    fp = fiber_coeffs(u, p, rho)
    t = fiber_argmax(fp)
    nu, _ = _fiber_nu_kbar(p, rho)
    return scale_field(u, t, nu), t
