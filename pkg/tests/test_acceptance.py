"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` (the lines are printed even
without ``-s``).
"""

import time

import numpy as np
import pytest

from lmmgre import reproduce
from lmmgre.extrapolation import solve_with_gre
from lmmgre.integrator import ImplicitSolveConfig, integrate
from lmmgre.methods import METHOD_IDS, Family, make_method, method_from_id, verify_order_conditions
from lmmgre.problems import IVP, dahlquist
from lmmgre.stability import (
    Verdict,
    a_alpha_angle,
    boundary_proximate,
    check_lemma2_inclusions,
    gre_region_member,
    in_stability_region,
    sample_box,
    simulated_bounded,
    undecidable_by_simulation,
)

SEED = 42


@pytest.fixture
def report(capsys, request):
    start = time.perf_counter()

    def emit(ok, detail):
        name = request.node.name.removeprefix("test_")
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {name}: {detail} ({time.perf_counter() - start:.1f} s)")
        assert ok, detail

    return emit


def test_criterion_1_bdf_angles(report):
    expected = [90.0, 90.0, 86.032, 73.351, 51.839, 17.839]
    angles = [a_alpha_angle(make_method("BDF", k)) for k in range(1, 7)]
    ok = all(a == 90.0 if e == 90.0 else abs(a - e) <= 0.05 for a, e in zip(angles, expected))
    report(ok, "angles " + ", ".join(f"{a:.3f}" for a in angles))


def test_criterion_2_lotka_volterra_orders(report):
    expected = dict(zip(reproduce.STUDY_METHODS, [3.03, 3.05, 3.08, 4.00, 3.99, 3.99]))
    reports = reproduce.table2()
    finals = {m: r.estimated_orders[-1] for m, r in zip(reproduce.STUDY_METHODS, reports)}
    ok = all(abs(finals[m] - e) <= 0.25 for m, e in expected.items())
    report(ok, ", ".join(f"{m} {finals[m]:.4f} (want {expected[m]:.2f})" for m in expected))


def test_criterion_3_van_der_pol_slopes(report):
    grids = [256, 512, 1024]
    slopes, failing = {}, []
    for m in reproduce.STUDY_METHODS:
        errs = reproduce.run_study("van-der-pol", m, grids).errors
        slopes[m] = reproduce.loglog_slope(grids[0], errs[0], grids[-1], errs[-1])
        if not slopes[m] <= -(method_from_id(m).p + 0.7):
            failing.append(m)
    detail = ", ".join(f"{m} {s:.3f}" for m, s in slopes.items())
    if failing:
        detail += f"; above bound: {', '.join(failing)}"
        if "am3" in failing:
            errs = reproduce.run_study("van-der-pol", "am3", grids, solve_cfg=ImplicitSolveConfig(mode="newton")).errors
            detail += f" (informational: am3 with a Newton corrector gives {reproduce.loglog_slope(256, errs[0], 1024, errs[-1]):.3f})"
    report(not failing, detail)


def test_criterion_4_lemma2_inclusions(report):
    bad = {m: len(check_lemma2_inclusions(method_from_id(m), 200, SEED)) for m in METHOD_IDS}
    ok = not any(bad.values())
    report(ok, f"{len(METHOD_IDS)} methods, 200 samples each, violations {sum(bad.values())}")


def _decidable(coeffs, mu):
    gain = 100.0 * (2.0**coeffs.p - 1.0)
    return not (undecidable_by_simulation(coeffs, mu, gain=gain) or undecidable_by_simulation(coeffs, mu / 2, gain=gain))


def test_criterion_5_convex_regions_coincide(report):
    parts, ok = [], True
    for ident in ("ab2", "am2"):
        coeffs = method_from_id(ident)
        rng = np.random.default_rng(SEED)
        checked, mismatches, slow = 0, [], 0
        while checked < 200:
            mu = sample_box(rng, 1)[0]
            lmm = in_stability_region(coeffs, mu)
            if lmm.verdict is Verdict.DEGENERATE or boundary_proximate(coeffs, mu) or boundary_proximate(coeffs, mu / 2):
                continue
            checked += 1
            if gre_region_member(coeffs, mu, seed=checked).verdict != lmm.verdict:
                mismatches.append(mu)
                slow += not _decidable(coeffs, mu)
        ok &= not mismatches
        parts.append(f"{ident} {len(mismatches)}/200 mismatches ({slow} with a root too slow to resolve in 512 steps)")
    report(ok, "; ".join(parts))


def test_criterion_6_bdf2_gre_a_stable(report):
    rng = np.random.default_rng(SEED)
    bdf2 = method_from_id("bdf2")
    mus = []
    while len(mus) < 100:
        mu = complex(*rng.uniform(-1e3, 1e3, 2))
        if mu.real < -1e-3 and abs(mu) <= 1e3:
            mus.append(mu)
    outside = [mu for i, mu in enumerate(mus) if gre_region_member(bdf2, mu, seed=i).verdict is not Verdict.INSIDE]
    report(not outside, f"{100 - len(outside)}/100 inside")


def test_criterion_7_root_condition_vs_simulation(report):
    rng = np.random.default_rng(SEED)
    checked, mismatches, slow = 0, [], 0
    while checked < 100:
        coeffs = method_from_id(METHOD_IDS[rng.integers(len(METHOD_IDS))])
        mu = sample_box(rng, 1)[0]
        q = in_stability_region(coeffs, mu)
        if q.verdict is Verdict.DEGENERATE or boundary_proximate(coeffs, mu):
            continue
        checked += 1
        if q.inside != simulated_bounded(coeffs, mu, n_steps=512, trials=16, seed=checked):
            mismatches.append(f"{coeffs.name}@{mu:.3f} (max |root| {q.max_root_modulus:.4f})")
            slow += undecidable_by_simulation(coeffs, mu, n_steps=512)
    detail = f"{100 - len(mismatches)}/100 agree"
    if mismatches:
        detail += f"; mismatches {', '.join(mismatches)}; {slow} of them have a root too slow to resolve in 512 steps"
    report(not mismatches, detail)


def _polynomial_ivp(degree):
    c = np.arange(1.0, degree + 2.0)
    dc = np.polynomial.polynomial.polyder(c)
    return IVP(
        f"poly{degree}",
        1,
        lambda t, y: np.array([np.polynomial.polynomial.polyval(t, dc)]),
        0.0,
        1.0,
        [c[0]],
        lambda t: np.array([np.polynomial.polynomial.polyval(t, c)]),
    )


def test_criterion_8_order_conditions(report):
    orders_ok = all(verify_order_conditions(method_from_id(m)) == method_from_id(m).p for m in METHOD_IDS)
    worst = 0.0
    for m in METHOD_IDS:
        coeffs = method_from_id(m)
        cfg = ImplicitSolveConfig()
        n_start = coeffs.k
        if cfg.resolve_mode(coeffs) == "pece":
            n_start = max(n_start, make_method(Family.AB, coeffs.p).k)
        for degree in range(coeffs.p + 1):
            ivp = _polynomial_ivp(degree)
            starts = [ivp.exact_solution(j / 10) for j in range(n_start)]
            sol = integrate(ivp, coeffs, 10, cfg, starting_values=starts)
            exact = np.array([ivp.exact_solution(t) for t in sol.times])
            worst = max(worst, float(np.max(np.abs(sol.states - exact))))
    report(orders_ok and worst < 1e-11, f"orders {'match' if orders_ok else 'mismatch'}, polynomial exactness error {worst:.1e}")


def test_criterion_9_implicit_euler_gre(report):
    gre = solve_with_gre(dahlquist(-1.0), method_from_id("bdf1"), 2).combined
    expected = [1.0, 2 * 0.64 - 2 / 3, 2 * 0.4096 - 4 / 9]
    err = float(np.max(np.abs(gre.states[:, 0] - expected)))
    report(err <= 1e-12 and np.allclose(gre.times, [0, 0.5, 1]), f"states {gre.states[:, 0].tolist()}, error {err:.1e}")
