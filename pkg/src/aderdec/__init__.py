"""Arbitrary-high-order ADER and deferred-correction time integration.

Explicit and linearized-implicit one-step methods of any order built from
Lagrange bases on equispaced, Gauss-Lobatto or Gauss-Legendre subnodes, with
an A-stability scanner, a stiff-ODE suite and a 1D periodic
spectral-difference front end for scalar conservation laws.
"""

from .nodes import (
    FAMILIES,
    MAX_NODES,
    NodeSet,
    ThetaTable,
    lagrange_deriv,
    lagrange_eval,
    make_node_set,
    theta_table,
)
from .linalg import LUFactors, SingularMatrixError, condition_1norm, invert, lu_factor, lu_solve
from .odes import (
    DivergenceError,
    ODESystem,
    StiffSplit,
    Trajectory,
    fd_jacobian,
    make_biomass,
    make_lotka_volterra,
    make_problem,
    make_robertson,
    make_scalar_linear,
    make_scalar_nonlinear,
    PROBLEM_NAMES,
)
from .explicit import (
    METHODS,
    StepperConfig,
    ader_mass_matrix,
    ader_rhs,
    ader_step,
    dec_step,
    geometric_schedule,
    integrate,
    mass_matrix_condition,
    uniform_schedule,
)
from .implicit import imader_source_tensor, imader_step, imdec_step, robertson_schedule, time_gram_matrix
from .stability import (
    DEFAULT_BOUNDS,
    DEFAULT_RESOLUTION,
    StabilityGrid,
    amplification,
    region_members,
    stability_grid,
)
from .sd1d import (
    SDGrid,
    SDState,
    advection_flux,
    burgers_flux,
    cfl_timestep,
    dec_sd_step,
    ader_sd_step,
    integrate_sd,
    make_sd_grid,
    sd_spatial_derivative,
    total_integral,
)
from .harness import (
    ConvergenceRow,
    ReferenceAccuracyError,
    convergence_study,
    discrete_l2_error,
    pde_convergence_study,
    reference_solution,
    rows_to_csv,
    trajectory_to_csv,
)

__version__ = "0.1.0"
