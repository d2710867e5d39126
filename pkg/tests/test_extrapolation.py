import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lmmgre.analysis import convergence_study
from lmmgre.errors import GridMismatchError
from lmmgre.extrapolation import gre_combine, gre_weights, solve_with_gre
from lmmgre.integrator import GridSolution, integrate
from lmmgre.methods import method_from_id
from lmmgre.problems import builtin_problem, dahlquist


def grid(values, t_final=1.0, name="m"):
    values = np.asarray(values, dtype=float).reshape(len(values), -1)
    n = len(values) - 1
    return GridSolution(t_final / n, np.linspace(0.0, t_final, n + 1), values, name)


def test_weights_p1():
    coarse, fine = grid([0.0, 1.0]), grid([0.0, 0.5, 1.1])
    assert gre_combine(coarse, fine, 1).states[-1, 0] == pytest.approx(1.2, abs=1e-15)


def test_weights_p2():
    coarse, fine = grid([0.0, 1.0]), grid([0.0, 0.5, 1.1])
    assert gre_combine(coarse, fine, 2).states[-1, 0] == pytest.approx(17 / 15, abs=1e-15)


@given(p=st.integers(1, 8), v=st.floats(-1e6, 1e6, allow_nan=False))
def test_identical_values_reproduced(p, v):
    out = gre_combine(grid([v, v]), grid([v, v, v]), p)
    assert out.states[-1, 0] == pytest.approx(v, rel=1e-14, abs=1e-300)


@pytest.mark.parametrize("p", range(1, 9))
def test_weight_identity(p):
    w_fine, w_coarse = gre_weights(p)
    assert abs((w_fine - w_coarse) - 1.0) <= np.spacing(1.0)


def test_combined_states_are_the_floating_point_expression():
    lv = builtin_problem("lotka-volterra", t_final=3.0)
    res = solve_with_gre(lv, method_from_id("bdf3"), 30)
    w_f, w_c = 8.0 / 7.0, 1.0 / 7.0
    np.testing.assert_array_equal(res.combined.states, w_f * res.fine.states[::2] - w_c * res.coarse.states)
    np.testing.assert_array_equal(res.combined.times, res.coarse.times)
    np.testing.assert_allclose(res.fine.times[::2], res.coarse.times, atol=1e-14)
    assert res.p == 3


def test_grid_mismatch():
    with pytest.raises(GridMismatchError):
        gre_combine(grid([0, 1, 2]), grid([0, 1, 2]), 1)
    with pytest.raises(GridMismatchError):
        gre_combine(grid([0, 1]), grid([0, 1, 2], t_final=2.0), 1)
    with pytest.raises(GridMismatchError):
        gre_combine(grid([0, 1]), grid(np.zeros((3, 2))), 1)


def test_implicit_euler_gre_worked_example():
    res = solve_with_gre(dahlquist(-1.0, t_final=1.0), method_from_id("bdf1"), 2)
    np.testing.assert_allclose(res.coarse.states[:, 0], [1, 2 / 3, 4 / 9], atol=1e-12)
    np.testing.assert_allclose(res.fine.states[::2, 0], [1, 0.64, 0.4096], atol=1e-12)
    np.testing.assert_allclose(res.combined.states[:, 0], [1, 2 * 0.64 - 2 / 3, 2 * 0.4096 - 4 / 9], atol=1e-12)
    exact = math.exp(-1.0)
    e_comb = abs(res.combined.final[0] - exact)
    e_coarse = abs(res.coarse.final[0] - exact)
    e_fine = abs(res.fine.final[0] - exact)
    assert e_comb == pytest.approx(0.0069, abs=1e-4)
    assert e_coarse == pytest.approx(0.0765, abs=1e-4)
    assert e_fine == pytest.approx(0.0417, abs=1e-4)
    assert e_comb < e_fine < e_coarse


def test_passivity():
    ivp = builtin_problem("lotka-volterra", t_final=3.0)
    coeffs = method_from_id("ab3")
    res = solve_with_gre(ivp, coeffs, 30)
    # each leg is exactly what a standalone integration produces
    np.testing.assert_array_equal(res.coarse.states, integrate(ivp, coeffs, 30).states)
    np.testing.assert_array_equal(res.fine.states, integrate(ivp, coeffs, 60).states)
    bumped_states = res.fine.states.copy()
    bumped_states[10] += 1.0
    bumped = GridSolution(res.fine.h, res.fine.times, bumped_states, "fine")
    out = gre_combine(res.coarse, bumped, 3)
    changed = np.any(out.states != res.combined.states, axis=1)
    assert list(np.flatnonzero(changed)) == [5]


def test_bdf2_gre_order_boost_on_dahlquist():
    report = convergence_study(dahlquist(-1.0), method_from_id("bdf2"), [64, 128, 256, 512, 1024], use_gre=True)
    assert min(report.estimated_orders) >= 2.8


def _dahlquist_grids(p):
    return [8, 16, 32] if p >= 4 else [16, 32, 64, 128]


def test_order_elevation_dahlquist(method):
    report = convergence_study(dahlquist(-1.0), method, _dahlquist_grids(method.p), use_gre=True)
    assert report.estimated_orders[-1] >= method.p + 1 - 0.3


def test_order_elevation_lotka_volterra(method):
    lv = builtin_problem("lotka-volterra")
    report = convergence_study(lv, method, [512, 1024], use_gre=True)
    assert report.estimated_orders[-1] >= method.p + 1 - 0.3
