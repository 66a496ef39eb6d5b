"""Fractional-Laplacian Dirichlet systems on balls: Green operators, fixed points
and existence/non-existence certificates."""

from fraxol.geometry import BallDomain, QuadratureGrid, ball_volume, build_grid
from fraxol.exterior import ConstantData, GaussianData, PowerCapData, exterior_from_dict
from fraxol.kernel import (
    QuadControl,
    QuadratureError,
    frac_laplacian_pointwise,
    gamma_fn,
    green_kernel,
    green_kernel_value,
    normalization_constant,
    torsion_closed_form,
)
from fraxol.green import (
    DiscreteGreenOperator,
    EigenPair,
    apply,
    assemble,
    solve_nonhomogeneous,
    spectral_radius,
    sup_norm_G1,
)
from fraxol.model import Box, ComponentSpec, DiscreteSystem, State, SystemSpec
from fraxol.solver import SolveReport, multistart_search, newton_solve, picard_solve, verify_solution
from fraxol.certificates import (
    Verdict,
    bounds_from_spec,
    certify,
    check_existence,
    check_nonexistence,
    existence_hypotheses,
    feasible_region_scan,
    nonexistence_hypotheses,
    parameter_boundary,
)

__version__ = "0.1.0"

__all__ = [
    "BallDomain",
    "Box",
    "ComponentSpec",
    "ConstantData",
    "DiscreteGreenOperator",
    "DiscreteSystem",
    "EigenPair",
    "GaussianData",
    "PowerCapData",
    "QuadControl",
    "QuadratureError",
    "QuadratureGrid",
    "SolveReport",
    "State",
    "SystemSpec",
    "Verdict",
    "apply",
    "assemble",
    "ball_volume",
    "bounds_from_spec",
    "certify",
    "build_grid",
    "check_existence",
    "check_nonexistence",
    "existence_hypotheses",
    "exterior_from_dict",
    "feasible_region_scan",
    "frac_laplacian_pointwise",
    "gamma_fn",
    "green_kernel",
    "green_kernel_value",
    "multistart_search",
    "newton_solve",
    "nonexistence_hypotheses",
    "normalization_constant",
    "parameter_boundary",
    "picard_solve",
    "solve_nonhomogeneous",
    "spectral_radius",
    "sup_norm_G1",
    "torsion_closed_form",
    "verify_solution",
]
