"""Drivers for the BDFk-GRE angle table, the Lotka-Volterra order table and the
van der Pol error-vs-n data."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .analysis import ConvergenceReport, convergence_study, doubling_grids, fmt
from .errors import NumericalError
from .integrator import DEFAULT_CONFIG, ImplicitSolveConfig
from .methods import make_method, method_from_id
from .problems import builtin_problem
from .stability import a_alpha_angle

STUDY_METHODS = ("ab2", "am2", "bdf2", "ab3", "am3", "bdf3")
STUDY_GRIDS = (64, 128, 256, 512, 1024)


@dataclass
class AngleRow:
    k: int
    gre_order: int
    angle: float

    @property
    def a_stable(self) -> bool:
        return self.angle == 90.0


def table1(n_radii: int = 1000) -> list[AngleRow]:
    """Order and A(alpha) angle of BDFk-GRE, k = 1..6.

    The extrapolated method has order k+1 and the angle of BDFk itself.
    """
    return [AngleRow(k, k + 1, a_alpha_angle(make_method("BDF", k), n_radii=n_radii)) for k in range(1, 7)]


def format_table1(rows: list[AngleRow]) -> str:
    lines = [f"{'k':>2}  {'order':>5}  A(alpha) angle", "-" * 36]
    for r in rows:
        note = ", A-stable" if r.a_stable else ""
        lines.append(f"{r.k:>2}  {'p=' + str(r.gre_order):>5}  {r.angle:.3f} deg{note}")
    return "\n".join(lines)


def run_study(problem: str, method: str, grids, use_gre: bool = True, solve_cfg: ImplicitSolveConfig = DEFAULT_CONFIG):
    """Convergence study that records a diverged grid as an infinite error
    instead of aborting (coarse explicit runs can blow up on van der Pol)."""
    ivp = builtin_problem(problem)
    coeffs = method_from_id(method)
    errors = []
    for n in grids:
        try:
            errors.append(convergence_study(ivp, coeffs, [n], use_gre, solve_cfg).errors[0])
        except NumericalError:
            errors.append(math.inf)
    orders = []
    for a, b in zip(errors, errors[1:]):
        orders.append(math.log2(a / b) if math.isfinite(a) and math.isfinite(b) else math.nan)
    name = f"{coeffs.name}-GRE" if use_gre else coeffs.name
    return ConvergenceReport(name, ivp.name, list(grids), errors, orders)


def table2(grids=STUDY_GRIDS, methods=STUDY_METHODS) -> list[ConvergenceReport]:
    ivp = builtin_problem("lotka-volterra")
    return [convergence_study(ivp, method_from_id(m), grids, use_gre=True) for m in methods]


def format_table2(reports: list[ConvergenceReport]) -> str:
    width = 10
    header = " ".join(f"{r.method_name:>{width}}" for r in reports)
    lines = [header, "-" * len(header)]
    for i in range(len(reports[0].estimated_orders)):
        lines.append(" ".join(f"{r.estimated_orders[i]:>{width}.4f}" for r in reports))
    return "\n".join(lines)


def figure1(grids=STUDY_GRIDS, methods=STUDY_METHODS) -> list[ConvergenceReport]:
    return [run_study("van-der-pol", m, grids, use_gre=True) for m in methods]


def loglog_slope(n_a: int, err_a: float, n_b: int, err_b: float) -> float:
    return math.log(err_b / err_a) / math.log(n_b / n_a)


def figure1_csv(reports: list[ConvergenceReport]) -> str:
    lines = ["method,n,error"]
    for r in reports:
        for n, e in zip(r.grid_sizes, r.errors):
            lines.append(f"{r.method_name},{n},{fmt(e) if math.isfinite(e) else 'nan'}")
    return "\n".join(lines) + "\n"


def gnuplot_script(data_file: str, reports: list[ConvergenceReport]) -> str:
    plots = ", \\\n     ".join(
        f"'< grep ^{r.method_name}, {data_file}' using 2:3 with linespoints title '{r.method_name}'" for r in reports
    )
    return (
        "set datafile separator ','\n"
        "set logscale xy\n"
        "set xlabel 'number of grid points'\n"
        "set ylabel 'global error (max norm)'\n"
        "set key bottom left\n"
        f"plot {plots}\n"
    )


def parse_grids(text: str) -> list[int]:
    """``A:B`` means A, 2A, 4A, ..., B; a comma list is taken verbatim."""
    if ":" in text:
        a, _, b = text.partition(":")
        return doubling_grids(int(a), int(b))
    return [int(x) for x in text.split(",")]
