"""Global (passive) Richardson extrapolation of LMM trajectories."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridMismatchError
from .integrator import DEFAULT_CONFIG, GridSolution, ImplicitSolveConfig, integrate
from .methods import LMMCoefficients
from .problems import IVP


@dataclass(frozen=True, eq=False)
class GreSolution:
    coarse: GridSolution
    fine: GridSolution
    combined: GridSolution
    p: int


def gre_weights(p: int) -> tuple[float, float]:
    """(fine weight, coarse weight) with r = w_f*fine - w_c*coarse."""
    d = 2.0**p - 1.0
    return 2.0**p / d, 1.0 / d


def gre_combine(coarse: GridSolution, fine: GridSolution, p: int) -> GridSolution:
    """r_n = 2^p/(2^p-1) * fine[2n] - 1/(2^p-1) * coarse[n] on the coarse grid."""
    if p < 1:
        raise ValueError("p must be a positive integer")
    if fine.n_steps != 2 * coarse.n_steps:
        raise GridMismatchError(f"fine grid has {fine.n_steps} steps, expected {2 * coarse.n_steps}")
    if coarse.states.shape[1] != fine.states.shape[1]:
        raise GridMismatchError("coarse and fine solutions have different dimensions")
    span = abs(coarse.times[-1] - coarse.times[0])
    tol = 64 * np.finfo(float).eps * max(1.0, span, abs(coarse.times[0]))
    if abs(fine.h - coarse.h / 2) > tol or np.max(np.abs(fine.times[::2] - coarse.times)) > tol:
        raise GridMismatchError("fine grid points do not line up with the coarse grid")
    w_fine, w_coarse = gre_weights(p)
    states = w_fine * fine.states[::2] - w_coarse * coarse.states
    return GridSolution(h=coarse.h, times=coarse.times.copy(), states=states, method_name=f"{coarse.method_name}-GRE")


def solve_with_gre(
    ivp: IVP,
    coeffs: LMMCoefficients,
    n_steps: int,
    solve_cfg: ImplicitSolveConfig = DEFAULT_CONFIG,
) -> GreSolution:
    # the two runs share nothing; each computes its own starting values
    coarse = integrate(ivp, coeffs, n_steps, solve_cfg)
    fine = integrate(ivp, coeffs, 2 * n_steps, solve_cfg)
    return GreSolution(coarse=coarse, fine=fine, combined=gre_combine(coarse, fine, coeffs.p), p=coeffs.p)
