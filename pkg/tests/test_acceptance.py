"""The thirteen acceptance criteria, one test each.

Every test records a one-line PASS/FAIL summary that is printed at the end
of the pytest run, then asserts the criterion at its stated tolerance.
"""
from __future__ import annotations

import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from fiber_cases import dense_argmax, random_fiber
from helpers import smooth_field
from oracles import ball_potential, shooting_level
from spsolve.diagnostics import (
    apriori_audit,
    kbar_threshold,
    lambda1_threshold,
    s_lambda_const,
    sobolev_S,
)
from spsolve.fibering import FiberPolynomial, fiber_argmax
from spsolve.fields import Field
from spsolve.functionals import Params, coulomb_sobolev_gap, energy, gradient_field
from spsolve.grid import make_grid
from spsolve.poisson import phi_identity_residual, solve_phi
from spsolve.solvers import (
    continuation_mu,
    count_nodes,
    excited_state,
    gaussian_init,
    make_endpoint,
    mountain_pass_estimate,
    nonexistence_flow,
    solve_groundstate,
)
from spsolve.weights import WeightModel

FOUR_WEIGHTS = [
    WeightModel.constant(1.0),
    WeightModel.homogeneous(1.0),
    WeightModel.homogeneous(2.0),
    WeightModel.vanishing_ball(r0=2.0, rho_inf=1.0),
]


def record(n: int, ok: bool, name: str, detail: str):
    ACCEPTANCE_LINES[n] = f"ACCEPTANCE {n:2d} {'PASS' if ok else 'FAIL'} {name}: {detail}"
    print(ACCEPTANCE_LINES[n])
    assert ok, ACCEPTANCE_LINES[n]


@pytest.fixture(scope="module")
def q4_setup():
    grid = make_grid(3, 10.0, 2048)
    p, rho = Params(dim=3, q=4.0, lam=1.0), WeightModel.homogeneous(2.0)
    t0 = time.perf_counter()
    rep = solve_groundstate(p, rho, grid)
    return grid, p, rho, rep, time.perf_counter() - t0


def test_c01_ball_potential():
    t0 = time.perf_counter()
    grid = make_grid(3, 2.0, 4096)
    u2 = np.where(grid.r < 1.0, 1.0, 0.0)
    u2[np.isclose(grid.r, 1.0)] = 0.5
    phi = solve_phi(grid, WeightModel.constant(), Field(grid, np.sqrt(u2)))
    elapsed = time.perf_counter() - t0
    exact = ball_potential(grid.r)
    err = float(np.max(np.abs(phi.v - exact) / exact))
    record(1, err <= 1e-6 and elapsed < 1.0, "uniform-ball potential",
           f"max rel err {err:.3g} (<= 1e-6), {elapsed:.3f} s (< 1 s)")


def test_c02_energy_identity():
    grid = make_grid(3, 10.0, 1024)
    rng = np.random.default_rng(2)
    worst = 0.0
    for i in range(100):
        rho = FOUR_WEIGHTS[i % 4]
        u = smooth_field(grid, rng)
        worst = max(worst, phi_identity_residual(grid, rho, u, solve_phi(grid, rho, u)))
    record(2, worst <= 1e-6, "energy identity", f"max residual {worst:.3g} over 100 fields (<= 1e-6)")


def test_c03_gradient_consistency():
    grid = make_grid(3, 10.0, 1024)
    rng = np.random.default_rng(3)
    p = Params(q=3.5, lam=1.0, mu=0.8)
    ratios = []
    for i in range(20):
        rho = FOUR_WEIGHTS[i % 4]
        u, v = smooth_field(grid, rng), smooth_field(grid, rng)
        exact = float(np.dot(grid.w, gradient_field(u, p, rho).v * v.v))
        errs = []
        for eps in (1e-2, 5e-3, 2.5e-3):
            fd = (energy(u + eps * v, p, rho).total - energy(u - eps * v, p, rho).total) / (2 * eps)
            errs.append(abs(fd - exact))
        ratios += [errs[0] / errs[1], errs[1] / errs[2]]
    lo = min(ratios)
    record(3, lo >= 3.5, "gradient consistency", f"min error ratio {lo:.3f} over 20 pairs (>= 3.5)")


def test_c04_coulomb_sobolev():
    grid = make_grid(3, 10.0, 1024)
    rng = np.random.default_rng(4)
    gaps = [coulomb_sobolev_gap(smooth_field(grid, rng, amp=5.0), FOUR_WEIGHTS[i % 4]) for i in range(100)]
    lo = min(gaps)
    record(4, lo >= -1e-8, "Coulomb-Sobolev inequality", f"min gap {lo:.3g} over 100 fields (>= -1e-8)")


def test_c05_fibering_uniqueness():
    rng = np.random.default_rng(5)
    bad_sign, worst = 0, 0.0
    for _ in range(1000):
        fp = random_fiber(rng)
        changes, t_ref = dense_argmax(fp)
        if changes != 1:
            bad_sign += 1
            continue
        worst = max(worst, abs(fiber_argmax(fp) - t_ref) / t_ref)
    wc = FiberPolynomial(1.0, 1.0, 1.0, 1.0, (3, 1, 1, 5))
    t = fiber_argmax(wc)
    worked = abs(t - 1.0) <= 1e-12 and abs(float(wc(t)) - 2.0) <= 1e-12
    ok = bad_sign == 0 and worst <= 1e-8 and worked
    record(5, ok, "fibering uniqueness",
           f"{1000 - bad_sign}/1000 single sign changes, max argmax rel err {worst:.3g} (<= 1e-8), "
           f"worked case t*={t:.15g} f={float(wc(t)):.15g}")


def test_c06_groundstate_audits(q4_setup):
    grid, p, rho, rep, elapsed = q4_setup
    positive = bool(np.all(rep.u.v[:-1] > 0))
    ok = (rep.converged and abs(rep.nehari_residual) <= 1e-6 and abs(rep.pohozaev_residual) <= 1e-4
          and positive and elapsed < 60)
    record(6, ok, "groundstate audits",
           f"level {rep.level:.10g}, |G|/scale {abs(rep.nehari_residual):.2g} (<= 1e-6), "
           f"|P|/scale {abs(rep.pohozaev_residual):.2g} (<= 1e-4), u > 0 {positive}, {elapsed:.2f} s (< 60 s)")


def test_c07_level_coincidence(q4_setup):
    grid, p, rho, rep, _ = q4_setup
    end = make_endpoint(gaussian_init(grid), p, rho)
    mp = mountain_pass_estimate(p, rho, grid, end)
    gap = abs(mp - rep.level) / abs(rep.level)
    record(7, gap <= 0.01, "level coincidence q > 3",
           f"mountain pass {mp:.8g} vs Nehari {rep.level:.8g}, rel gap {gap:.3g} (<= 1e-2)")


def test_c08_manifold_membership():
    grid = make_grid(3, 10.0, 2048)
    p, rho = Params(dim=3, q=2.5, lam=1.0), WeightModel.homogeneous(1.0)
    rep = solve_groundstate(p, rho, grid)
    audit = apriori_audit(rep, rho, k=1.0)
    ok = rep.converged and abs(rep.j_residual) <= 1e-4 and audit["delta_ok"] and audit["gamma_ok"]
    record(8, ok, "manifold membership q < 3",
           f"|J|/scale {abs(rep.j_residual):.2g} (<= 1e-4), delta {audit['delta']:.6g} <= {audit['delta_max']:.6g}, "
           f"gamma {audit['gamma']:.6g} <= {audit['gamma_max']:.6g}")


def test_c09_continuation_monotone():
    grid = make_grid(3, 10.0, 1024)
    p, rho = Params(dim=3, q=4.0, lam=1.0), WeightModel.homogeneous(2.0)
    rep = continuation_mu(p, rho, grid, np.linspace(0.5, 1.0, 6))
    levels = [c for _, c in rep.c_mu_trace]
    rises = [b - a for a, b in zip(levels, levels[1:])]
    ok = len(levels) == 6 and max(rises) <= 1e-6
    record(9, ok, "continuation monotonicity",
           "c_mu " + ", ".join(f"{c:.6g}" for c in levels) + f"; max rise {max(rises):.3g} (<= 1e-6)")


def test_c10_nonexistence_decay():
    grid = make_grid(3, 10.0, 512)
    rho = WeightModel.coercive(offset=1.0)
    runs = decayed = 0
    worst = 0.0
    for q in (1.5, 2.0):
        for lam in (0.5, 1.0):
            p = Params(dim=3, q=q, lam=lam)
            for seed in range(20):
                init = smooth_field(grid, np.random.default_rng(1000 + seed), amp=3.0)
                fl = nonexistence_flow(p, rho, grid, init)
                runs += 1
                decayed += fl.decayed
                worst = max(worst, fl.final_h1)
    # control: q = 4 started beyond the mountain pass runs away from zero
    pc = Params(dim=3, q=4.0, lam=1.0)
    rho_c = WeightModel.coercive(offset=1.0)
    end = make_endpoint(gaussian_init(grid), pc, rho_c)
    control = nonexistence_flow(pc, rho_c, grid, end)
    ok = decayed == runs == 80 and not control.decayed
    record(10, ok, "nonexistence decay",
           f"{decayed}/{runs} decayed (max final H1 {worst:.2g}); q=4 control decayed={control.decayed}")


def test_c11_constants():
    s = s_lambda_const(3.0, 4.0, 1.0)
    k1, k2 = kbar_threshold(5, 11 / 5), kbar_threshold(5, 2.1)
    closes = []
    for q in (3.0, 3.5, 4.0, 4.5):
        for cbar in (0.3, 1.0, 2.0):
            lam = lambda1_threshold(q, 1.0, cbar)
            target = sobolev_S() ** 3 / (4 * cbar**4)
            closes.append(abs(s_lambda_const(q, lam, 1.0) - target) / max(1.0, target))
    ok = s == 1.0 / 1728.0 and k1 == 0.0 and abs(k2 - 0.125) <= 1e-15 and max(closes) <= 1e-12
    record(11, ok, "constants",
           f"s_lambda {s!r} (1/1728), kbar_threshold {k1!r}, {k2!r}, closure err {max(closes):.2g}")


@pytest.fixture(scope="module")
def free_grid():
    return make_grid(3, 20.0, 2048)


def test_c12_shooting_oracle(free_grid):
    p, rho = Params(dim=3, q=3.0, lam=0.0), WeightModel.constant(0.0)
    gs = solve_groundstate(p, rho, free_grid)
    ex = excited_state(p, rho, free_grid, 1)
    _, ref0 = shooting_level(0)
    _, ref1 = shooting_level(1)
    e0 = abs(gs.level - ref0) / ref0
    e1 = abs(ex.level - ref1) / ref1
    ok = gs.converged and ex.converged and e0 <= 1e-3 and e1 <= 1e-2
    record(12, ok, "lambda = 0 oracle",
           f"groundstate {gs.level:.8g} vs {ref0:.8g} (rel {e0:.2g} <= 1e-3), "
           f"one node {ex.level:.8g} vs {ref1:.8g} (rel {e1:.2g} <= 1e-2)")


def test_c13_excited_growth(q4_setup):
    grid, p, rho, rep, _ = q4_setup
    levels, nodes, conv = [rep.level], [count_nodes(rep.u.v)], [rep.converged]
    for m in (1, 2):
        ex = excited_state(p, rho, grid, m)
        levels.append(ex.level)
        nodes.append(count_nodes(ex.u.v))
        conv.append(ex.converged)
    ok = all(conv) and nodes == [0, 1, 2] and levels[0] < levels[1] < levels[2]
    record(13, ok, "excited-level growth",
           "levels " + ", ".join(f"{c:.6g}" for c in levels) + f"; nodes {nodes}; converged {conv}")
