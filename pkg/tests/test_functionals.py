import math

import numpy as np
import pytest

from helpers import smooth_field
from spsolve.fields import Field
from spsolve.fibering import fiber_coeffs
from spsolve.functionals import (
    Params,
    coulomb_sobolev_gap,
    default_nu,
    e_norm,
    energy,
    gradient_field,
    j_functional,
    nehari_G,
    pohozaev_residual,
)
from spsolve.grid import make_grid
from spsolve.poisson import solve_phi
from spsolve.weights import WeightModel


@pytest.fixture
def grid():
    return make_grid(3, 10.0, 1024)


def test_params_validation():
    with pytest.raises(ValueError):
        Params(q=5.5)
    with pytest.raises(ValueError):
        Params(q=1.0)
    with pytest.raises(ValueError):
        Params(mu=0.4)
    with pytest.raises(ValueError):
        Params(q=2.5, nu=2.0, kbar=2.0)
    assert Params(q=2.5, nu=2.0, kbar=1.0).kbar == 1.0
    assert Params(dim=3, q=5.0).is_critical


def test_default_nu_worked_case():
    assert default_nu(3, 2.5, 1.0) == 2.0


def test_zero_field(grid):
    z = Field.zeros(grid)
    p, rho = Params(q=3.5), WeightModel.homogeneous(1.0)
    e = energy(z, p, rho)
    assert (e.kinetic, e.mass, e.coulomb, e.power, e.total) == (0, 0, 0, 0, 0)
    assert nehari_G(z, p, rho) == 0.0
    assert pohozaev_residual(z, p, rho) == 0.0
    assert coulomb_sobolev_gap(z, rho) == 0.0
    assert e_norm(z, p, rho) == 0.0
    assert gradient_field(z, p, rho).is_zero()
    assert j_functional(z, Params(q=2.5), rho) == 0.0


def test_energy_components(grid):
    u = smooth_field(grid, np.random.default_rng(0))
    e = energy(u, Params(q=3.5, lam=0.7), WeightModel.homogeneous(2.0))
    assert min(e.kinetic, e.mass, e.coulomb, e.power) >= 0
    assert e.total == e.kinetic + e.mass + e.coulomb - e.power
    assert e.h1_norm**2 == pytest.approx(2 * (e.kinetic + e.mass))
    om = grid.omega
    assert e.e_norm**2 == pytest.approx(e.h1_norm**2 + 0.7 * math.sqrt(om * 4 * e.coulomb / 0.7**2))


def test_mu_monotone(grid):
    u = smooth_field(grid, np.random.default_rng(1))
    rho = WeightModel.constant()
    assert energy(u, Params(mu=1.0), rho).total <= energy(u, Params(mu=0.5), rho).total


def test_uniform_ball_coulomb_matches_analytic():
    g = make_grid(3, 2.0, 4096)
    u2 = np.where(g.r < 1.0, 1.0, 0.0)
    u2[np.isclose(g.r, 1.0)] = 0.5
    u = Field(g, np.sqrt(u2))
    e = energy(u, Params(q=3.0, lam=1.0), WeightModel.constant())
    assert e.coulomb == pytest.approx(0.25 * 4 * math.pi * (1 / 6 - 1 / 30), rel=1e-5)


def test_nehari_equals_gradient_pairing(grid):
    u = smooth_field(grid, np.random.default_rng(2))
    p, rho = Params(q=4.0, lam=1.3, mu=0.8), WeightModel.homogeneous(2.0)
    pair = float(np.dot(grid.w, gradient_field(u, p, rho).v * u.v))
    assert nehari_G(u, p, rho) == pytest.approx(pair, rel=1e-12)


def test_nehari_closed_form_lambda_zero(grid):
    u = smooth_field(grid, np.random.default_rng(3))
    p, rho = Params(q=3.0, lam=0.0), WeightModel.constant()
    e = energy(u, p, rho)
    A, C = e.h1_norm**2, 4 * e.power
    for t in (0.3, 1.0, 2.0):
        assert nehari_G(t * u, p, rho) == pytest.approx(t**2 * A - t**4 * C, rel=1e-10, abs=1e-10)
    t0 = math.sqrt(A / C)
    assert abs(nehari_G(t0 * u, p, rho)) < 1e-9 * A


def test_gradient_strong_form_away_from_origin(grid):
    # the strong form approximates -lap u + u + ... pointwise
    u = Field(grid, np.exp(-grid.r**2))
    p, rho = Params(q=3.0, lam=0.0), WeightModel.constant()
    gf = gradient_field(u, p, rho).v
    exact = -(4 * grid.r**2 - 6) * np.exp(-grid.r**2) + u.v - u.v**3
    mid = (grid.r > 0.5) & (grid.r < 5)
    assert np.max(np.abs(gf[mid] - exact[mid])) < 1e-3


def test_pohozaev_needs_k_for_non_homogeneous(grid):
    u = smooth_field(grid, np.random.default_rng(4))
    with pytest.raises(ValueError):
        pohozaev_residual(u, Params(q=3.5), WeightModel.vanishing_ball())
    pohozaev_residual(u, Params(q=3.5, k=0.0), WeightModel.vanishing_ball())


def test_critical_coefficient_sanity():
    # N = 6, q = 2* - 1 = 2, k = 0: Pohozaev - 2 Nehari leaves int u^2 with coefficient 1
    g = make_grid(5, 8.0, 512)  # any grid; coefficient arithmetic only
    N, q, k = 6, 2.0, 0.0
    mass = N / 2 - (N - 2) / 2
    coul = (N + 2 + 2 * k) / 4 - (N - 2) / 2
    power = -N / (q + 1) + (N - 2) / 2
    assert (mass, coul, power) == (1.0, 0.0, 0.0)
    assert g.n == 512


def test_j_matches_fiber_derivative(grid):
    u = smooth_field(grid, np.random.default_rng(5))
    p, rho = Params(q=2.5, lam=1.0), WeightModel.homogeneous(1.0)
    fp = fiber_coeffs(u, p, rho)
    assert j_functional(u, p, rho) == pytest.approx(float(fp.derivative(1.0)), rel=1e-8)


def test_j_rejects_inadmissible(grid):
    u = smooth_field(grid, np.random.default_rng(6))
    with pytest.raises(ValueError):
        j_functional(u, Params(q=2.5, nu=2.0), WeightModel.homogeneous(3.0))


def test_coulomb_sobolev_ball():
    g = make_grid(3, 3.0, 2048)
    u = Field(g, np.clip(1 - g.r**2, 0, None))
    rho = WeightModel.constant()
    phi = solve_phi(g, rho, u)
    assert coulomb_sobolev_gap(u, rho) > 0
    assert np.all(np.diff(phi.v) <= 0)


def test_e_norm_lambda_zero(grid):
    u = smooth_field(grid, np.random.default_rng(8))
    rho = WeightModel.homogeneous(2.0)
    assert e_norm(u, Params(lam=0.0), rho) == pytest.approx(energy(u, Params(lam=0.0), rho).h1_norm)
