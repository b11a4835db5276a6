"""Groundstates, mountain-pass levels, nodal states and decay flows.

All solvers work on the nodal values of the free nodes (every node except
the Dirichlet node at r_max).  Descent directions are preconditioned by the
tridiagonal matrix K + W (1 + lam^2 rho phi), refreshed with the current
potential; the string relaxation uses the fixed H1 Gram matrix K + W.  After
every step the iterate is moved back onto a natural constraint set (Nehari
set, fiber maxima or nodal Nehari set).  A final Newton polish uses the
exact Hessian of the discrete energy, whose Coulomb part is dense.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import cho_solve_banded, cholesky_banded, solve, solveh_banded
from scipy.special import eval_genlaguerre

from .fibering import fiber_argmax, fiber_coeffs, nehari_project, scale_field
from .fields import Field, dirichlet_form, stiffness_apply
from .functionals import (
    Params,
    _fiber_nu_kbar,
    energy,
    j_terms,
    nehari_terms,
    pohozaev_terms,
)
from .grid import RadialGrid
from .poisson import green_matrix, potential_from_charge
from .weights import WeightModel

__all__ = [
    "SolverOptions",
    "SolveReport",
    "FlowReport",
    "gaussian_init",
    "solve_groundstate",
    "continuation_mu",
    "make_endpoint",
    "mountain_pass_estimate",
    "excited_state",
    "nonexistence_flow",
    "count_nodes",
]


@dataclass(frozen=True)
class SolverOptions:
    tol: float = 1e-8
    constraint_tol: float = 1e-10
    max_iters: int = 50_000
    armijo: float = 0.5
    step0: float = 1.0
    switch_tol: float = 1e-5
    newton_iters: int = 40
    n_path: int = 32
    relax_sweeps: int = 200
    seed: int = 42

    def with_(self, **kw) -> "SolverOptions":
        return replace(self, **kw)


@dataclass
class SolveReport:
    u: Field
    level: float
    grad_residual: float
    nehari_residual: float
    pohozaev_residual: float
    j_residual: float | None
    iterations: int
    converged: bool
    c_mu_trace: list | None = None
    params: Params | None = None
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "level": self.level,
            "grad_residual": self.grad_residual,
            "nehari_residual": self.nehari_residual,
            "pohozaev_residual": self.pohozaev_residual,
            "j_residual": self.j_residual,
            "iterations": self.iterations,
            "converged": self.converged,
            "c_mu_trace": [list(x) for x in self.c_mu_trace] if self.c_mu_trace is not None else None,
        }
        out.update(self.extras)
        return out


@dataclass
class FlowReport:
    decayed: bool
    final_h1: float
    trace: list


# ---------------------------------------------------------------------------
# discrete problem


class _Problem:
    """Energy, gradient, Hessian and preconditioner on the free nodes."""

    def __init__(self, grid: RadialGrid, p: Params, rho: WeightModel):
        if grid.dim != p.dim:
            raise ValueError(f"grid dimension {grid.dim} differs from params dimension {p.dim}")
        self.grid, self.p, self.rho = grid, p, rho
        self.rv = np.asarray(rho(grid.r), dtype=float)
        if np.any(self.rv < 0):
            raise ValueError("weight must be nonnegative")
        self.w = grid.w
        self.m = grid.n - 1
        c = grid.cond
        diag = self.w.copy()
        diag[:-1] += c
        diag[1:] += c
        self._pdiag = diag[: self.m]
        self._poff = -c[: self.m - 1]
        ab = np.zeros((2, self.m))
        ab[0, 1:] = self._poff
        ab[1] = self._pdiag
        self._pchol = cholesky_banded(ab)
        self._green = None

    # helpers -------------------------------------------------------------
    def full(self, x: np.ndarray) -> np.ndarray:
        return np.append(x, 0.0)

    def phi(self, v: np.ndarray) -> np.ndarray:
        return potential_from_charge(self.grid, self.w * self.rv * v**2)

    def energy(self, v: np.ndarray, phi: np.ndarray | None = None) -> float:
        p = self.p
        if phi is None:
            phi = self.phi(v)
        return float(
            0.5 * dirichlet_form(self.grid, v)
            + 0.5 * np.dot(self.w, v**2)
            + 0.25 * p.lam**2 * np.dot(self.w * self.rv * v**2, phi)
            - p.mu / (p.q + 1.0) * np.dot(self.w, np.abs(v) ** (p.q + 1.0))
        )

    def gradient(self, v: np.ndarray, phi: np.ndarray | None = None) -> np.ndarray:
        """Nodal gradient on the free nodes."""
        p = self.p
        if phi is None:
            phi = self.phi(v)
        g = stiffness_apply(self.grid, v) + self.w * (
            v + p.lam**2 * self.rv * phi * v - p.mu * np.abs(v) ** (p.q - 1.0) * v
        )
        return g[: self.m]

    def residual(self, g: np.ndarray) -> float:
        """L2 norm of the strong-form gradient."""
        return float(np.sqrt(np.sum(g**2 / self.w[: self.m])))

    def precond(self, g: np.ndarray, phi: np.ndarray | None = None) -> np.ndarray:
        """Solve with K + W, or with K + W(1 + lam^2 rho phi) when phi is given."""
        if phi is None or self.p.lam == 0.0:
            return cho_solve_banded((self._pchol, False), g)
        ab = np.zeros((2, self.m))
        ab[0, 1:] = self._poff
        ab[1] = self._pdiag + self.w[: self.m] * self.p.lam**2 * self.rv[: self.m] * phi[: self.m]
        return solveh_banded(ab, g, check_finite=False)

    def pnorm(self, x: np.ndarray) -> float:
        px = self._pdiag * x
        px[:-1] += self._poff * x[1:]
        px[1:] += self._poff * x[:-1]
        return float(np.sqrt(max(np.dot(x, px), 0.0)))

    def hessian(self, v: np.ndarray, phi: np.ndarray | None = None) -> np.ndarray:
        p, m = self.p, self.m
        if phi is None:
            phi = self.phi(v)
        if self._green is None:
            self._green = green_matrix(self.grid)[:m, :m]
        w, rv, x = self.w[:m], self.rv[:m], v[:m]
        H = np.zeros((m, m))
        idx = np.arange(m)
        H[idx, idx] = self._pdiag + w * (
            p.lam**2 * rv * phi[:m] - p.mu * p.q * np.abs(x) ** (p.q - 1.0)
        )
        H[idx[:-1], idx[1:]] = self._poff
        H[idx[1:], idx[:-1]] = self._poff
        if p.lam > 0:
            a = w * rv * x
            H += 2.0 * p.lam**2 * (a[:, None] * self._green * a[None, :])
        return H

    # Newton ----------------------------------------------------------------
    def newton(self, v: np.ndarray, tol: float, iters: int) -> tuple[np.ndarray, float, int]:
        """Damped Newton on the nodal gradient, merit = strong-form residual."""
        phi = self.phi(v)
        g = self.gradient(v, phi)
        res = self.residual(g)
        it = 0
        for it in range(1, iters + 1):
            if res <= tol:
                return v, res, it - 1
            H = self.hessian(v, phi)
            try:
                step = solve(H, -g, assume_a="sym", check_finite=False)
            except np.linalg.LinAlgError:
                break
            alpha = 1.0
            while alpha > 1e-6:
                cand = self.full(v[: self.m] + alpha * step)
                cphi = self.phi(cand)
                cg = self.gradient(cand, cphi)
                cres = self.residual(cg)
                if cres < res:
                    break
                alpha *= 0.5
            else:
                break
            v, phi, g, res = cand, cphi, cg, cres
        return v, res, it


def gaussian_init(grid: RadialGrid, width: float = 1.0, amplitude: float = 1.0) -> Field:
    v = amplitude * np.exp(-0.5 * (grid.r / width) ** 2)
    v[-1] = 0.0
    return Field(grid, v)


def _normalized(terms: np.ndarray) -> float:
    return float(np.sum(terms) / max(1.0, float(np.max(np.abs(terms)))))


def _report(
    prob: _Problem, v: np.ndarray, res: float, iters: int, opts: SolverOptions, fiber: bool, extras=None
) -> SolveReport:
    grid, p, rho = prob.grid, prob.p, prob.rho
    u = Field(grid, v)
    phi = Field(grid, prob.phi(v))
    k = p.k if p.k is not None else rho.pohozaev_k()
    pk = p.with_(k=k)
    neh = _normalized(nehari_terms(u, p, rho, phi))
    poh = _normalized(pohozaev_terms(u, pk, rho, phi))
    jr = None
    if fiber or rho.kind in ("homogeneous", "constant"):
        try:
            jr = _normalized(j_terms(u, p, rho, phi))
        except ValueError:
            jr = None
    level = energy(u, p, rho, phi).total
    conv = bool(res <= opts.tol and abs(neh) <= max(opts.tol, opts.constraint_tol * 1e2))
    return SolveReport(
        u=u,
        level=level,
        grad_residual=res,
        nehari_residual=neh,
        pohozaev_residual=poh,
        j_residual=jr,
        iterations=iters,
        converged=conv,
        params=p,
        extras=dict(extras or {}),
    )


# ---------------------------------------------------------------------------
# groundstates


def _strategy(p: Params, rho: WeightModel) -> str:
    if p.q <= 2.0:
        raise ValueError(f"no nontrivial solutions are sought for q={p.q} <= 2")
    if p.is_critical:
        raise ValueError(
            "q = 2*-1: the Nehari and Pohozaev identities force every solution to vanish "
            "(nonexistence in the critical case)"
        )
    if p.q >= 3.0 or p.lam == 0.0:
        return "nehari"
    if rho.kind not in ("homogeneous", "constant") and p.kbar is None:
        raise ValueError("q < 3 requires a homogeneous weight for the fiber projection")
    _fiber_nu_kbar(p, rho)
    return "fiber"


def _projector(prob: _Problem, strategy: str):
    grid, p, rho = prob.grid, prob.p, prob.rho

    if strategy == "nehari":

        def project(v):
            t = nehari_project(Field(grid, v), p, rho)
            return t * v

    else:
        nu, _ = _fiber_nu_kbar(p, rho)

        def project(v):
            u = Field(grid, v)
            t = fiber_argmax(fiber_coeffs(u, p, rho))
            return scale_field(u, t, nu).v

    return project


def _descend(prob: _Problem, v: np.ndarray, project, opts: SolverOptions, accept=None, monitor=None):
    """Preconditioned projected descent; returns (v, iterations, dual_norm).

    ``monitor`` is called with every iterate on the constraint set.
    """
    v = project(v)
    if monitor is not None:
        monitor(v)
    phi = prob.phi(v)
    E = prob.energy(v, phi)
    g = prob.gradient(v, phi)
    tau = opts.step0
    dual = math.inf
    it = 0
    for it in range(1, opts.max_iters + 1):
        d = prob.precond(g, phi)
        slope = -float(np.dot(g, d))
        dual = math.sqrt(max(-slope, 0.0))
        scale = max(1.0, prob.pnorm(v[: prob.m]))
        if dual <= opts.switch_tol * scale:
            break
        tau = min(opts.step0, 2.0 * tau)
        accepted = False
        while tau > 1e-14:
            try:
                cand = project(prob.full(v[: prob.m] - tau * d))
                ok = np.all(np.isfinite(cand)) and (accept is None or accept(cand))
            except (ValueError, FloatingPointError):
                ok = False
            if ok:
                cphi = prob.phi(cand)
                cE = prob.energy(cand, cphi)
                if cE <= E + 1e-4 * tau * slope:
                    accepted = True
                    break
            tau *= opts.armijo
        if not accepted:
            break
        v, phi, E = cand, cphi, cE
        if monitor is not None:
            monitor(v)
        g = prob.gradient(v, phi)
    return v, it, dual


def solve_groundstate(
    p: Params,
    rho: WeightModel,
    grid: RadialGrid,
    init: Field | str | None = None,
    opts: SolverOptions | None = None,
) -> SolveReport:
    """Positive groundstate by constrained descent followed by Newton.

    q >= 3 (or lam = 0): descent on the Nehari set with radial rescaling
    t u.  2 < q < 3: descent on the set of fiber maxima of
    t -> t^nu u(t r), which requires a homogeneous weight.
    """
    opts = opts or SolverOptions()
    strategy = _strategy(p, rho)
    prob = _Problem(grid, p, rho)
    if init is None or isinstance(init, str):
        preset = init or "gaussian"
        if preset != "gaussian":
            raise ValueError(f"unknown init preset {preset!r}")
        init = gaussian_init(grid)
    if init.grid.n != grid.n:
        raise ValueError("init lives on a different grid")
    v0 = init.v.copy()
    v0[-1] = 0.0
    if not np.any(v0):
        raise ValueError("cannot start from the zero field")
    project = _projector(prob, strategy)
    powers = []
    v, it, _ = _descend(
        prob, v0, project, opts, monitor=lambda x: powers.append(float(np.dot(grid.w, np.abs(x) ** (p.q + 1))))
    )
    v = np.abs(v)
    v, res, nit = prob.newton(v, opts.tol, opts.newton_iters)
    h1 = math.sqrt(dirichlet_form(grid, v) + np.dot(grid.w, v**2))
    rep = _report(prob, v, res, it + nit, opts, strategy == "fiber", {"strategy": strategy})
    rep.extras["power_integral"] = float(np.dot(grid.w, np.abs(v) ** (p.q + 1)))
    # empirical stand-in for the universal lower bound on int |u|^{q+1}
    rep.extras["alpha_proxy"] = min(powers + [rep.extras["power_integral"]])
    if h1 < 1e-8 or rep.level <= 0 or np.any(v[:-1] < 0):
        rep.converged = False
    return rep


def continuation_mu(
    p: Params,
    rho: WeightModel,
    grid: RadialGrid,
    mus=None,
    opts: SolverOptions | None = None,
    init: Field | None = None,
) -> SolveReport:
    """Solve along an increasing ladder of mu, each rung seeded by the last."""
    if mus is None:
        mus = np.linspace(0.5, 1.0, 6)
    mus = [float(m) for m in mus]
    if not mus or any(b <= a for a, b in zip(mus, mus[1:])):
        raise ValueError("mu ladder must be nonempty and strictly increasing")
    trace = []
    rep = None
    u = init
    for mu in mus:
        rep = solve_groundstate(p.with_(mu=mu), rho, grid, u, opts)
        if not rep.converged:
            raise RuntimeError(f"continuation rung mu={mu} did not converge (residual {rep.grad_residual:.3g})")
        trace.append((mu, rep.level))
        u = rep.u
    rep.c_mu_trace = trace
    return rep


# ---------------------------------------------------------------------------
# mountain pass


def make_endpoint(u: Field, p: Params, rho: WeightModel, factor: float = 1.5) -> Field:
    """A point of negative energy on the ray or fiber through u."""
    if u.is_zero():
        raise ValueError("cannot build an endpoint from the zero field")
    s = 1.0
    for _ in range(200):
        cand = u * s
        if energy(cand, p, rho).total < 0:
            return cand
        s *= factor
        if s > 1e8:
            break
    nu, _ = _fiber_nu_kbar(p, rho)
    t = 1.0
    for _ in range(60):
        cand = scale_field(u, t, nu)
        if energy(cand, p, rho).total < 0:
            return cand
        t *= 1.2
    raise ValueError("no negative-energy point found along the ray or fiber")


def _reparametrize(prob: _Problem, path: np.ndarray) -> np.ndarray:
    seg = np.array([prob.pnorm(path[i + 1] - path[i]) for i in range(len(path) - 1)])
    s = np.concatenate([[0.0], np.cumsum(seg)])
    if s[-1] == 0:
        return path
    target = np.linspace(0.0, s[-1], len(path))
    out = np.empty_like(path)
    out[0], out[-1] = path[0], path[-1]
    for j in range(1, len(path) - 1):
        i = min(np.searchsorted(s, target[j]) - 1, len(path) - 2)
        i = max(i, 0)
        th = (target[j] - s[i]) / seg[i] if seg[i] > 0 else 0.0
        out[j] = (1 - th) * path[i] + th * path[i + 1]
    return out


def _path_max(prob: _Problem, path: np.ndarray, samples: int = 24) -> float:
    """Maximum of the energy along the polygonal path, refined near the top."""
    best, where = -math.inf, (0, 0.0)
    ths = np.linspace(0.0, 1.0, samples + 1)
    for i in range(len(path) - 1):
        for th in ths:
            e = prob.energy(prob.full((1 - th) * path[i] + th * path[i + 1]))
            if e > best:
                best, where = e, (i, th)
    i, th = where
    lo, hi = max(0.0, th - 1.0 / samples), min(1.0, th + 1.0 / samples)
    # golden-section refinement on the top segment (and its neighbours' end)
    gr = (math.sqrt(5) - 1) / 2
    f = lambda t: prob.energy(prob.full((1 - t) * path[i] + t * path[i + 1]))
    a, b = lo, hi
    for _ in range(60):
        c, d = b - gr * (b - a), a + gr * (b - a)
        if f(c) > f(d):
            b = d
        else:
            a = c
    return max(best, f(0.5 * (a + b)))


def mountain_pass_estimate(
    p: Params,
    rho: WeightModel,
    grid: RadialGrid,
    endpoint: Field,
    n_path: int | None = None,
    opts: SolverOptions | None = None,
    return_path: bool = False,
):
    """Upper estimate of the mountain-pass level over paths 0 -> endpoint.

    A string of ``n_path`` interior nodes is relaxed by preconditioned
    descent with arclength reparametrisation.  The highest node is then
    refined to the nearby saddle by Newton iterations, the rest of the string
    is relaxed again, and the energy maximum over the resulting polygonal
    path is returned.
    """
    opts = opts or SolverOptions()
    n_path = opts.n_path if n_path is None else n_path
    prob = _Problem(grid, p, rho)
    end = endpoint.v.copy()
    end[-1] = 0.0
    if prob.energy(end) >= 0:
        raise ValueError("endpoint must have negative energy")
    m = prob.m
    ts = np.linspace(0.0, 1.0, n_path + 2)
    path = ts[:, None] * end[None, :m]

    def relax(path, sweeps, frozen=()):
        for _ in range(sweeps):
            length = sum(prob.pnorm(path[i + 1] - path[i]) for i in range(len(path) - 1))
            cap = 0.5 * length / (len(path) - 1)
            for j in range(1, len(path) - 1):
                if j in frozen:
                    continue
                d = prob.precond(prob.gradient(prob.full(path[j])))
                nd = prob.pnorm(d)
                step = min(opts.step0 * 0.5, cap / nd) if nd > 0 else 0.0
                path[j] = path[j] - step * d
            if not frozen:
                path = _reparametrize(prob, path)
        return path

    path = relax(path, opts.relax_sweeps)
    energies = [prob.energy(prob.full(x)) for x in path]
    top = int(np.argmax(energies))
    sv, res, _ = prob.newton(prob.full(path[top]), opts.tol, opts.newton_iters)
    saddle_ok = res < 1e-6 and prob.energy(sv) > 0.5 * energies[top]
    if saddle_ok:
        path[top] = sv[:m]
        path = relax(path, max(10, opts.relax_sweeps // 4), frozen=(top,))
    level = _path_max(prob, path)
    if return_path:
        return level, Field(grid, prob.full(path[top])), path
    return level


# ---------------------------------------------------------------------------
# nodal (excited) states


def count_nodes(v: np.ndarray, rel: float = 1e-12) -> int:
    """Sign changes of a profile, ignoring the Dirichlet node and tiny values."""
    x = v[:-1]
    x = x[np.abs(x) > rel * np.max(np.abs(x))] if np.any(x) else x
    return int(np.count_nonzero(np.signbit(x[1:]) != np.signbit(x[:-1])))


def _components(v: np.ndarray, m: int) -> list[np.ndarray] | None:
    """Split the free-node values into sign-constant pieces."""
    x = v[:m]
    s = np.sign(x)
    if np.any(s == 0):
        return None
    cuts = np.nonzero(s[1:] != s[:-1])[0] + 1
    edges = np.concatenate([[0], cuts, [m]])
    return [np.arange(edges[i], edges[i + 1]) for i in range(len(edges) - 1)]


def _nodal_project(prob: _Problem, v: np.ndarray, nodes: int) -> np.ndarray:
    """Maximise the energy over independent rescalings of the sign pieces."""
    p, grid = prob.p, prob.grid
    comps = _components(v, prob.m)
    if comps is None or len(comps) != nodes + 1:
        raise ValueError("sign pattern changed")
    k = len(comps)
    pieces = []
    for idx in comps:
        e = np.zeros(grid.n)
        e[idx] = v[idx]
        pieces.append(e)
    Kp = [stiffness_apply(grid, e) for e in pieces]
    Q = np.array([[np.dot(Kp[a], pieces[b]) for b in range(k)] for a in range(k)])
    Q += np.diag([np.dot(grid.w, e**2) for e in pieces])
    P = np.array([np.dot(grid.w, np.abs(e) ** (p.q + 1)) for e in pieces])
    if p.lam > 0:
        charges = [grid.w * prob.rv * e**2 for e in pieces]
        pots = [potential_from_charge(grid, c) for c in charges]
        Gam = np.array([[np.dot(charges[a], pots[b]) for b in range(k)] for a in range(k)])
    else:
        Gam = np.zeros((k, k))
    lam2, mu, q = p.lam**2, p.mu, p.q

    def grad(t):
        return Q @ t + lam2 * t * (Gam @ t**2) - mu * t**q * P

    def hess(t):
        H = Q + lam2 * (np.diag(Gam @ t**2) + 2.0 * np.outer(t, t) * Gam)
        return H - np.diag(mu * q * t ** (q - 1) * P)

    # start from the single-piece Nehari scalings
    t = np.array([_piece_scale(Q[a, a], lam2 * Gam[a, a], mu * P[a], q) for a in range(k)])
    r = np.linalg.norm(grad(t))
    for _ in range(100):
        if r <= 1e-14 * max(1.0, np.abs(Q).max()):
            break
        try:
            step = np.linalg.solve(hess(t), -grad(t))
        except np.linalg.LinAlgError:
            raise ValueError("singular nodal Hessian")
        a = 1.0
        while a > 1e-10:
            cand = t + a * step
            if np.all(cand > 0):
                cr = np.linalg.norm(grad(cand))
                if cr < r:
                    break
            a *= 0.5
        else:
            break
        t, r = cand, cr
    if np.linalg.norm(grad(t)) > 1e-8 * max(1.0, np.abs(Q).max()):
        raise ValueError("nodal projection did not converge")
    if np.any(np.linalg.eigvalsh(hess(t)) >= 0):
        raise ValueError("nodal projection is not a maximum")
    out = np.zeros(grid.n)
    for ta, e in zip(t, pieces):
        out += ta * e
    return out


def _piece_scale(A: float, B: float, C: float, q: float) -> float:
    """Root of A + B t^2 = C t^{q-1}, or 1 when there is none."""
    h = lambda t: A + B * t * t - C * t ** (q - 1)
    if h(1.0) == 0:
        return 1.0
    lo, hi = 1.0, 1.0
    for _ in range(200):
        if h(hi) < 0:
            break
        hi *= 2.0
    else:
        return 1.0
    while h(lo) < 0 and lo > 1e-30:
        lo *= 0.5
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        if h(mid) > 0:
            lo = mid
        else:
            hi = mid
    return math.sqrt(lo * hi)


def _nodal_init(grid: RadialGrid, nodes: int, width: float) -> np.ndarray:
    x = (grid.r / width) ** 2
    v = eval_genlaguerre(nodes, grid.dim / 2.0 - 1.0, x) * np.exp(-0.5 * x)
    v[-1] = 0.0
    return v


def excited_state(
    p: Params,
    rho: WeightModel,
    grid: RadialGrid,
    nodes: int,
    opts: SolverOptions | None = None,
    width: float | None = None,
    init: Field | None = None,
) -> SolveReport:
    """Radial state with exactly ``nodes`` sign changes.

    Descent on the nodal Nehari set (each sign piece rescaled to maximise the
    energy), then Newton.  For 2 < q < 3 with lam > 0 the state is continued
    in q from q = 3.5.
    """
    opts = opts or SolverOptions()
    if nodes < 0:
        raise ValueError("node count must be nonnegative")
    if nodes == 0:
        return solve_groundstate(p, rho, grid, init, opts)
    if p.is_critical or p.q <= 2.0:
        raise ValueError(f"no nodal states are sought for q={p.q}")
    if p.q < 3.0 and p.lam > 0:
        return _excited_by_q_continuation(p, rho, grid, nodes, opts, width)
    prob = _Problem(grid, p, rho)

    def project(v):
        return _nodal_project(prob, v, nodes)

    if init is not None:
        v0 = init.v.copy()
    else:
        # shrink the initial profile until every sign piece can be rescaled
        # onto the nodal Nehari set
        widths = [width] if width is not None else 0.15 * grid.r_max * 0.7 ** np.arange(12)
        v0 = None
        for wd in widths:
            cand = _nodal_init(grid, nodes, wd)
            try:
                project(cand)
            except ValueError:
                continue
            v0 = cand
            break
        if v0 is None:
            raise ValueError(f"no feasible {nodes}-node starting profile on this grid")
    if count_nodes(v0) != nodes:
        raise ValueError("initial guess has the wrong number of nodes")

    v, it, _ = _descend(prob, v0, project, opts, accept=lambda c: count_nodes(c) == nodes)
    v, res, nit = prob.newton(v, opts.tol, opts.newton_iters)
    rep = _report(prob, v, res, it + nit, opts, False, {"nodes": nodes, "strategy": "nodal"})
    if count_nodes(v) != nodes:
        rep.converged = False
        rep.extras["node_count"] = count_nodes(v)
    return rep


def _excited_by_q_continuation(p, rho, grid, nodes, opts, width):
    q = 3.5
    rep = excited_state(p.with_(q=q, nu=None), rho, grid, nodes, opts, width)
    if not rep.converged:
        return rep
    v = rep.u.v
    dq = 0.1
    while q > p.q:
        qn = max(p.q, q - dq)
        prob = _Problem(grid, p.with_(q=qn), rho)
        cand, res, _ = prob.newton(v, opts.tol, opts.newton_iters)
        if res <= opts.tol and count_nodes(cand) == nodes:
            v, q = cand, qn
            dq = min(0.2, dq * 1.5)
        else:
            dq *= 0.5
            if dq < 1e-4:
                break
    prob = _Problem(grid, p, rho)
    v, res, nit = prob.newton(v, opts.tol, opts.newton_iters)
    out = _report(prob, v, res, nit, opts, False, {"nodes": nodes, "strategy": "nodal+q-continuation"})
    if count_nodes(v) != nodes or q > p.q:
        out.converged = False
    return out


# ---------------------------------------------------------------------------
# decay flow


def nonexistence_flow(
    p: Params,
    rho: WeightModel,
    grid: RadialGrid,
    init: Field,
    opts: SolverOptions | None = None,
    max_iters: int = 2000,
    h1_floor: float = 1e-6,
) -> FlowReport:
    """Preconditioned gradient flow of the energy from ``init``.

    Reports decay when the H1 norm drops below ``h1_floor``.  A run whose
    norm or energy escapes to 1e6 in magnitude is reported as not decayed.
    """
    opts = opts or SolverOptions()
    prob = _Problem(grid, p, rho)
    v = init.v.copy()
    v[-1] = 0.0
    trace = []
    h1 = math.sqrt(dirichlet_form(grid, v) + np.dot(grid.w, v**2))
    E = prob.energy(v)
    tau = opts.step0
    for _ in range(max_iters):
        trace.append((h1, E))
        if h1 < h1_floor:
            return FlowReport(True, h1, trace)
        if h1 > 1e6 or E < -1e6:
            return FlowReport(False, h1, trace)
        g = prob.gradient(v)
        d = prob.precond(g)
        slope = -float(np.dot(g, d))
        tau = min(opts.step0, 2.0 * tau)
        while True:
            with np.errstate(over="ignore", invalid="ignore"):
                cand = prob.full(v[: prob.m] - tau * d)
                cE = prob.energy(cand)
            if np.isfinite(cE) and cE <= E + 1e-4 * tau * slope:
                break
            tau *= opts.armijo
            if tau < 1e-12:
                if slope == 0.0:
                    return FlowReport(h1 < h1_floor, h1, trace)
                raise RuntimeError("step size collapsed in the decay flow")
        v, E = cand, cE
        h1 = math.sqrt(dirichlet_form(grid, v) + np.dot(grid.w, v**2))
    trace.append((h1, E))
    return FlowReport(h1 < h1_floor, h1, trace)
