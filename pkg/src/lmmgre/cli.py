"""Command-line front end.

Exit status: 0 on success, 1 for usage errors, 2 for numerical failures.
"""

from __future__ import annotations

import argparse
import io
import math
import os
import sys

import numpy as np

from . import reproduce
from .analysis import convergence_study, fmt
from .errors import LMMError, NumericalError
from .extrapolation import solve_with_gre
from .integrator import integrate
from .methods import METHOD_IDS, method_from_id
from .problems import PROBLEM_NAMES, builtin_problem
from .stability import (
    Verdict,
    a_alpha_angle,
    boundary_locus,
    convexity_probe,
    gre_region_member,
    in_stability_region,
    lemma2_report,
    region_mask,
)

EXIT_USAGE = 1
EXIT_NUMERICAL = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lmmgre", description="Linear multistep methods with global Richardson extrapolation.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_text):
        return sub.add_parser(name, help=help_text, description=help_text)

    method_help = f"method identifier ({', '.join(METHOD_IDS)})"
    problem_help = f"problem ({', '.join(PROBLEM_NAMES)})"

    p = add("solve", "integrate one problem and write the trajectory CSV")
    p.add_argument("--method", required=True, help=method_help)
    p.add_argument("--problem", required=True, help=problem_help)
    p.add_argument("--n", type=int, required=True, help="number of steps (coarse grid with --gre)")
    p.add_argument("--tfinal", type=float, help="override the end of the time span")
    p.add_argument("--gre", action="store_true", help="write the extrapolated trajectory")
    p.add_argument("--out", help="output CSV (default: stdout)")

    p = add("converge", "convergence study over doubling grids")
    p.add_argument("--method", required=True, help=method_help)
    p.add_argument("--problem", required=True, help=problem_help)
    p.add_argument("--grids", default="64:1024", help="A:B doubling range, or a comma list")
    p.add_argument("--tfinal", type=float, help="override the end of the time span")
    p.add_argument("--gre", action="store_true", help="measure the extrapolated trajectory")
    p.add_argument("--out", help="output CSV (default: stdout)")

    p = add("stability", "boundary locus, region raster and angle report for one method")
    p.add_argument("--method", required=True, help=method_help)
    p.add_argument("--gre", action="store_true", help="raster the extrapolated region by simulation")
    p.add_argument("--seed", type=int, default=42, help="seed for random sampling")
    p.add_argument("--out", default="stability", help="output prefix for <out>_locus.csv and <out>_region.csv")

    p = add("table1", "order and A(alpha) angle of BDFk-GRE, k = 1..6")
    p.add_argument("--out", help="also write the table to this file")

    p = add("table2", "estimated orders of the six LMM-GREs on Lotka-Volterra")
    p.add_argument("--grids", default="64:1024", help="A:B doubling range, or a comma list")
    p.add_argument("--out", help="also write the table to this file")

    p = add("figure1", "error-vs-n data of the six LMM-GREs on van der Pol")
    p.add_argument("--grids", default="64:1024", help="A:B doubling range, or a comma list")
    p.add_argument("--out", default="figure1.csv", help="output CSV; a gnuplot script is written next to it")
    return parser


def _write(text: str, path: str | None):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _grids(text: str) -> list[int]:
    try:
        return reproduce.parse_grids(text)
    except ValueError as exc:
        raise UsageError(f"bad --grids {text!r}: {exc}") from None


def trajectory_csv(times, states) -> str:
    buf = io.StringIO()
    dim = states.shape[1]
    buf.write(",".join(["t"] + [f"y{i + 1}" for i in range(dim)]) + "\n")
    for t, y in zip(times, states):
        buf.write(",".join([fmt(t)] + [fmt(v) for v in y]) + "\n")
    return buf.getvalue()


def cmd_solve(args):
    ivp = builtin_problem(args.problem, t_final=args.tfinal)
    coeffs = method_from_id(args.method)
    if args.n < 1:
        raise UsageError("--n must be positive")
    sol = solve_with_gre(ivp, coeffs, args.n).combined if args.gre else integrate(ivp, coeffs, args.n)
    _write(trajectory_csv(sol.times, sol.states), args.out)


def cmd_converge(args):
    ivp = builtin_problem(args.problem, t_final=args.tfinal)
    coeffs = method_from_id(args.method)
    report = convergence_study(ivp, coeffs, _grids(args.grids), use_gre=args.gre)
    _write(report.to_csv(), args.out)
    print(report.to_table(), file=sys.stderr)


REGION_RE = (-8.0, 2.0)
REGION_IM = (-5.0, 5.0)


def cmd_stability(args):
    coeffs = method_from_id(args.method)
    locus = boundary_locus(coeffs, 720)
    lines = ["re,im,verdict"]
    for mu in locus:
        if not np.isfinite(mu):
            lines.append("nan,nan,pole")
        else:
            lines.append(f"{fmt(mu.real)},{fmt(mu.imag)},{in_stability_region(coeffs, mu).verdict.value}")
    _write("\n".join(lines) + "\n", f"{args.out}_locus.csv")

    n_re, n_im = (41, 41) if args.gre else (201, 201)
    re = np.linspace(*REGION_RE, n_re)
    im = np.linspace(*REGION_IM, n_im)
    grid = re[None, :] + 1j * im[:, None]
    lines = ["re,im,verdict"]
    if args.gre:
        for i, mu in enumerate(grid.reshape(-1)):
            v = gre_region_member(coeffs, mu, seed=args.seed + i).verdict.value
            lines.append(f"{fmt(mu.real)},{fmt(mu.imag)},{v}")
    else:
        mask = region_mask(coeffs, grid)
        for mu, ok in zip(grid.reshape(-1), mask.reshape(-1)):
            v = Verdict.INSIDE.value if ok else in_stability_region(coeffs, mu).verdict.value
            lines.append(f"{fmt(mu.real)},{fmt(mu.imag)},{v}")
    _write("\n".join(lines) + "\n", f"{args.out}_region.csv")

    angle = a_alpha_angle(coeffs)
    report = lemma2_report(coeffs, 200, args.seed)
    print(f"{'method':<10} {'order':>5} {'A(alpha) angle':>15} {'convex':>7} {'inclusions':>11}")
    status = "ok" if report.ok else f"{len(report.violations)} viol."
    print(f"{coeffs.name:<10} {coeffs.p:>5} {angle:>11.3f} deg {str(convexity_probe(coeffs)):>7} {status:>11}")
    print(f"wrote {args.out}_locus.csv and {args.out}_region.csv", file=sys.stderr)


def cmd_table1(args):
    text = reproduce.format_table1(reproduce.table1()) + "\n"
    sys.stdout.write(text)
    if args.out:
        _write(text, args.out)


def cmd_table2(args):
    text = reproduce.format_table2(reproduce.table2(_grids(args.grids))) + "\n"
    sys.stdout.write(text)
    if args.out:
        _write(text, args.out)


def cmd_figure1(args):
    reports = reproduce.figure1(_grids(args.grids))
    _write(reproduce.figure1_csv(reports), args.out)
    script = os.path.splitext(args.out)[0] + ".gp"
    _write(reproduce.gnuplot_script(os.path.basename(args.out), reports), script)
    for r in reports:
        errs = " ".join("   diverged" if not math.isfinite(e) else f"{e:11.3e}" for e in r.errors)
        print(f"{r.method_name:<10} {errs}")
    print(f"wrote {args.out} and {script}", file=sys.stderr)


COMMANDS = {
    "solve": cmd_solve,
    "converge": cmd_converge,
    "stability": cmd_stability,
    "table1": cmd_table1,
    "table2": cmd_table2,
    "figure1": cmd_figure1,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except NumericalError as exc:
        print(f"lmmgre: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (UsageError, LMMError, ValueError) as exc:
        print(f"lmmgre: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return 0


if __name__ == "__main__":
    sys.exit(main())
