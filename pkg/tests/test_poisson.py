import numpy as np
import pytest

from oracles import ball_potential
from helpers import smooth_field
from spsolve.fields import Field
from spsolve.grid import make_grid
from spsolve.poisson import charge, green_matrix, grad_phi_sq, phi_identity_residual, solve_phi
from spsolve.weights import WeightModel


def ball_field(grid):
    u2 = np.where(grid.r < 1.0, 1.0, 0.0)
    u2[np.isclose(grid.r, 1.0)] = 0.5
    return Field(grid, np.sqrt(u2))


def test_zero_source():
    g = make_grid(3, 5.0, 128)
    phi = solve_phi(g, WeightModel.constant(), Field.zeros(g))
    assert phi.is_zero()
    assert phi_identity_residual(g, WeightModel.constant(), Field.zeros(g), phi) == 0.0


def test_uniform_ball_potential():
    g = make_grid(3, 2.0, 4096)
    phi = solve_phi(g, WeightModel.constant(), ball_field(g))
    exact = ball_potential(g.r)
    assert np.max(np.abs(phi.v - exact) / exact) <= 1e-6


@pytest.mark.parametrize("dim", [4, 5])
def test_uniform_ball_other_dims(dim):
    g = make_grid(dim, 2.0, 4096)
    phi = solve_phi(g, WeightModel.constant(), ball_field(g))
    assert np.max(np.abs(phi.v - ball_potential(g.r, dim)) / ball_potential(g.r, dim)) < 1e-5


def test_quadratic_scaling():
    g = make_grid(3, 8.0, 256)
    u = smooth_field(g, np.random.default_rng(1))
    rho = WeightModel.homogeneous(1.0)
    assert np.allclose(solve_phi(g, rho, 3.0 * u).v, 9.0 * solve_phi(g, rho, u).v, rtol=1e-13)


def test_identity_on_bump():
    g = make_grid(3, 8.0, 1024)
    u = smooth_field(g, np.random.default_rng(7))
    rho = WeightModel.homogeneous(2.0)
    phi = solve_phi(g, rho, u)
    assert phi_identity_residual(g, rho, u, phi) <= 1e-6


def test_ball_identity_against_analytic_energy():
    # int |grad phi|^2 = int phi 1_B = 4 pi int_0^1 (3 - r^2)/6 r^2 dr = 4 pi (1/6 - 1/30)
    g = make_grid(3, 2.0, 4096)
    u = ball_field(g)
    rho = WeightModel.constant()
    phi = solve_phi(g, rho, u)
    exact = 4 * np.pi * (1 / 6 - 1 / 30)
    assert grad_phi_sq(g, phi) == pytest.approx(exact, rel=1e-5)
    assert phi_identity_residual(g, rho, u, phi) <= 1e-6


def test_negative_weight_rejected():
    g = make_grid(3, 2.0, 64)
    with pytest.raises(ValueError):
        solve_phi(g, lambda r: -np.ones_like(r), Field(g, np.ones(g.n)))


def test_green_matrix_reproduces_solve():
    g = make_grid(3, 6.0, 200)
    u = smooth_field(g, np.random.default_rng(3))
    rho = WeightModel.homogeneous(1.0)
    G = green_matrix(g)
    assert np.allclose(G, G.T)
    assert np.allclose(G @ charge(g, rho, u), solve_phi(g, rho, u).v, rtol=1e-12)
