"""Radial solver for Schrodinger-Poisson systems with a weighted Coulomb term.

    -lap u + u + lambda^2 rho(x) phi_u u = mu |u|^{q-1} u,   -lap phi_u = rho u^2

on R^N (N = 3, 4, 5), restricted to radial profiles.
"""
from .diagnostics import (
    apriori_bounds,
    cbar_pipeline,
    critical_nonexistence_audit,
    kbar_threshold,
    lambda1_threshold,
    s_lambda_const,
    sobolev_best_constant,
    tail_mass,
)
from .fibering import FiberPolynomial, fiber_argmax, fiber_coeffs, nehari_project, scale_field
from .fields import Field, norm, radial_derivative, radial_laplacian
from .functionals import (
    EnergyBreakdown,
    Params,
    coulomb_sobolev_gap,
    e_norm,
    energy,
    gradient_field,
    j_functional,
    nehari_G,
    pohozaev_residual,
)
from .grid import RadialGrid, integrate, make_grid
from .poisson import phi_identity_residual, solve_phi
from .solvers import (
    SolverOptions,
    SolveReport,
    continuation_mu,
    excited_state,
    mountain_pass_estimate,
    nonexistence_flow,
    solve_groundstate,
)
from .weights import WeightModel, eval_weight, verify_weight_class

__version__ = "0.1.0"

__all__ = [
    "apriori_bounds",
    "cbar_pipeline",
    "critical_nonexistence_audit",
    "kbar_threshold",
    "lambda1_threshold",
    "s_lambda_const",
    "sobolev_best_constant",
    "tail_mass",
    "FiberPolynomial",
    "fiber_argmax",
    "fiber_coeffs",
    "nehari_project",
    "scale_field",
    "Field",
    "norm",
    "radial_derivative",
    "radial_laplacian",
    "EnergyBreakdown",
    "Params",
    "coulomb_sobolev_gap",
    "e_norm",
    "energy",
    "gradient_field",
    "j_functional",
    "nehari_G",
    "pohozaev_residual",
    "RadialGrid",
    "integrate",
    "make_grid",
    "phi_identity_residual",
    "solve_phi",
    "SolverOptions",
    "SolveReport",
    "continuation_mu",
    "excited_state",
    "mountain_pass_estimate",
    "nonexistence_flow",
    "solve_groundstate",
    "WeightModel",
    "eval_weight",
    "verify_weight_class",
]
