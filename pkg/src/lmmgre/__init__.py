"""Linear multistep methods with global Richardson extrapolation."""

from .analysis import ConvergenceReport, convergence_study, global_error, reference_solution
from .extrapolation import GreSolution, gre_combine, solve_with_gre
from .integrator import GridSolution, ImplicitSolveConfig, generate_starting_values, integrate, newton_solve
from .methods import Family, LMMCoefficients, make_method, method_from_id, verify_order_conditions
from .problems import IVP, builtin_problem, dahlquist, eval_rhs
from .stability import (
    RegionQuery,
    Verdict,
    a_alpha_angle,
    boundary_locus,
    check_lemma2_inclusions,
    convexity_probe,
    gre_region_member,
    in_stability_region,
    pencil_roots,
)

__version__ = "0.1.0"

__all__ = [
    "IVP",
    "ConvergenceReport",
    "Family",
    "GreSolution",
    "GridSolution",
    "ImplicitSolveConfig",
    "LMMCoefficients",
    "RegionQuery",
    "Verdict",
    "a_alpha_angle",
    "boundary_locus",
    "builtin_problem",
    "check_lemma2_inclusions",
    "convergence_study",
    "convexity_probe",
    "dahlquist",
    "eval_rhs",
    "generate_starting_values",
    "global_error",
    "gre_combine",
    "gre_region_member",
    "in_stability_region",
    "integrate",
    "make_method",
    "method_from_id",
    "newton_solve",
    "pencil_roots",
    "reference_solution",
    "solve_with_gre",
    "verify_order_conditions",
]
