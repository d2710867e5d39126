"""Reference solutions, max-norm global errors and convergence-order estimates."""

from __future__ import annotations

import csv
import functools
import io
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import GridMismatchError
from .extrapolation import solve_with_gre
from .integrator import DEFAULT_CONFIG, GridSolution, ImplicitSolveConfig, integrate, rk4_solve
from .methods import LMMCoefficients
from .problems import IVP

REFERENCE_STEPS = 2**16


def fmt(x: float) -> str:
    """17 significant digits: round-trips any double exactly."""
    return format(float(x), ".17g")


@functools.lru_cache(maxsize=16)
def reference_solution(ivp: IVP, n_steps: int = REFERENCE_STEPS) -> GridSolution:
    """Classical RK4 over ``n_steps`` uniform steps (cached per problem)."""
    return rk4_solve(ivp, n_steps)


def exact_grid_solution(ivp: IVP, n_steps: int) -> GridSolution:
    if ivp.exact_solution is None:
        raise ValueError(f"{ivp.name} has no closed-form solution")
    times = np.linspace(ivp.t0, ivp.t_final, n_steps + 1)
    states = np.array([ivp.exact_solution(t) for t in times])
    return GridSolution(h=(ivp.t_final - ivp.t0) / n_steps, times=times, states=states, method_name="exact")


def global_error(sol: GridSolution, ref: GridSolution) -> float:
    """Max over the grid points of sol of the max-norm distance to ref.

    The reference grid must nest the solution grid; no interpolation is done.
    """
    n, n_ref = sol.n_steps, ref.n_steps
    if n_ref % n:
        raise GridMismatchError(f"reference grid ({n_ref} steps) does not nest the solution grid ({n} steps)")
    stride = n_ref // n
    ref_times = ref.times[::stride]
    if np.max(np.abs(ref_times - sol.times)) > 1e-9 * max(1.0, abs(sol.times[-1])):
        raise GridMismatchError("reference and solution grids cover different intervals")
    return float(np.max(np.abs(sol.states - ref.states[::stride])))


def doubling_grids(start: int, stop: int) -> list[int]:
    if start < 1 or stop < start:
        raise ValueError(f"invalid grid range {start}:{stop}")
    grids = [start]
    while grids[-1] * 2 <= stop:
        grids.append(grids[-1] * 2)
    if grids[-1] != stop:
        raise ValueError(f"{stop} is not {start} times a power of two")
    return grids


def estimated_orders(errors: Sequence[float]) -> list[float]:
    return [math.log2(errors[i] / errors[i + 1]) for i in range(len(errors) - 1)]


@dataclass
class ConvergenceReport:
    method_name: str
    problem_name: str
    grid_sizes: list[int]
    errors: list[float]
    estimated_orders: list[float] = field(default_factory=list)

    def rows(self):
        for i, (n, e) in enumerate(zip(self.grid_sizes, self.errors)):
            yield n, e, (self.estimated_orders[i - 1] if i > 0 else None)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "error", "estimated_order"])
        for n, e, order in self.rows():
            w.writerow([n, fmt(e), "" if order is None else fmt(order)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, method_name: str = "", problem_name: str = "") -> "ConvergenceReport":
        rows = list(csv.DictReader(io.StringIO(text)))
        return cls(
            method_name,
            problem_name,
            [int(r["n"]) for r in rows],
            [float(r["error"]) for r in rows],
            [float(r["estimated_order"]) for r in rows[1:]],
        )

    def to_table(self) -> str:
        lines = [f"{self.method_name} on {self.problem_name}", f"{'n':>8}  {'max-norm error':>14}  {'order':>7}"]
        for n, e, order in self.rows():
            lines.append(f"{n:>8}  {e:>14.6e}  {'' if order is None else f'{order:7.4f}':>7}")
        return "\n".join(lines)


def convergence_study(
    ivp: IVP,
    coeffs: LMMCoefficients,
    grids: Sequence[int],
    use_gre: bool = False,
    solve_cfg: ImplicitSolveConfig = DEFAULT_CONFIG,
    reference: Optional[GridSolution] = None,
) -> ConvergenceReport:
    """Errors and consecutive log2 error ratios over doubling grids.

    Problems with a closed-form solution are measured against it; otherwise
    against the RK4 reference (or ``reference`` when given).
    """
    grids = [int(n) for n in grids]
    if any(b != 2 * a for a, b in zip(grids, grids[1:])):
        raise ValueError(f"grid sizes must double: {grids}")
    if min(grids) < coeffs.k:
        raise ValueError(f"{coeffs.name} needs at least {coeffs.k} steps")
    errors = []
    for n in grids:
        sol = solve_with_gre(ivp, coeffs, n, solve_cfg).combined if use_gre else integrate(ivp, coeffs, n, solve_cfg)
        if reference is None and ivp.exact_solution is not None:
            ref = exact_grid_solution(ivp, n)
        else:
            ref = reference if reference is not None else reference_solution(ivp)
        errors.append(global_error(sol, ref))
    name = f"{coeffs.name}-GRE" if use_gre else coeffs.name
    return ConvergenceReport(name, ivp.name, grids, errors, estimated_orders(errors))
