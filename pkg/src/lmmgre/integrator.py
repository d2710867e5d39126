"""Fixed-step LMM integration: starting values, explicit steps, Newton and PECE.

The engine advances

    sum_{j=0}^k alphas[j] y_{n+j} = h sum_{j=0}^k betas[j] f_{n+j}

on a uniform grid. Implicit steps are solved either by a Newton iteration with
a forward-difference Jacobian, or (Adams-Moulton only) by one
predict-evaluate-correct-evaluate pass with the same-order Adams-Bashforth
method as predictor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal, Optional, Sequence

import numpy as np

from .errors import DivergenceError, NewtonConvergenceError, SingularJacobianError
from .methods import Family, LMMCoefficients, make_method
from .problems import IVP, eval_rhs

EPS = np.finfo(float).eps


@dataclass(frozen=True, eq=False)
class GridSolution:
    h: float
    times: np.ndarray
    states: np.ndarray  # shape (N+1, dimension)
    method_name: str

    @property
    def n_steps(self) -> int:
        return len(self.times) - 1

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


@dataclass(frozen=True)
class ImplicitSolveConfig:
    """Settings for implicit steps.

    ``mode="auto"`` uses PECE for Adams-Moulton methods and Newton otherwise.
    ``jacobian_fd_eps=None`` means ``sqrt(eps) * max(1, |y_i|)`` per component.
    """

    mode: Literal["auto", "newton", "pece"] = "auto"
    tol: float = 1e-12
    max_iters: int = 25
    jacobian_fd_eps: Optional[float] = None

    def __post_init__(self):
        if self.mode not in ("auto", "newton", "pece"):
            raise ValueError(f"unknown implicit solve mode {self.mode!r}")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")

    def resolve_mode(self, coeffs: LMMCoefficients) -> str:
        if not coeffs.implicit:
            return "explicit"
        if self.mode == "auto":
            return "pece" if coeffs.family is Family.AM else "newton"
        if self.mode == "pece" and coeffs.family is not Family.AM:
            raise ValueError(f"pece mode needs an Adams-Moulton corrector, got {coeffs.name}")
        return self.mode


DEFAULT_CONFIG = ImplicitSolveConfig()


# --- one-step starters -------------------------------------------------------

# (c, A, b) Butcher tableaux
RALSTON2 = ((0.0, 2 / 3), ((), (2 / 3,)), (1 / 4, 3 / 4))
RALSTON3 = ((0.0, 1 / 2, 3 / 4), ((), (1 / 2,), (0.0, 3 / 4)), (2 / 9, 1 / 3, 4 / 9))
RK4 = ((0.0, 1 / 2, 1 / 2, 1.0), ((), (1 / 2,), (0.0, 1 / 2), (0.0, 0.0, 1.0)), (1 / 6, 1 / 3, 1 / 3, 1 / 6))


def rk_step(rhs: Callable, tableau, t: float, y: np.ndarray, h: float) -> np.ndarray:
    c, a, b = tableau
    stages = []
    for ci, ai in zip(c, a):
        yi = y
        for aij, kj in zip(ai, stages):
            if aij:
                yi = yi + h * aij * kj
        stages.append(np.asarray(rhs(t + ci * h, yi), dtype=float))
    out = y
    for bi, ki in zip(b, stages):
        out = out + h * bi * ki
    return out


def starter_for_order(p: int) -> tuple[tuple, int]:
    """Tableau and substeps per grid interval used to start an order-p method."""
    if p <= 2:
        return RALSTON2, 1
    if p == 3:
        return RALSTON3, 1
    return RK4, math.ceil(2 ** ((p - 4) / 4) * 4)


def generate_starting_values(ivp: IVP, coeffs: LMMCoefficients, h: float, count: Optional[int] = None) -> np.ndarray:
    """y_0..y_{count-1} on the grid t0 + j*h, with count defaulting to k.

    y_0 is the initial condition; the rest come from a one-step method whose
    local error is O(h^(p+1)) (Ralston-2, Ralston-3, or substepped RK4).
    """
    if not h > 0:
        raise ValueError(f"step size must be positive, got {h}")
    count = coeffs.k if count is None else count
    if (count - 1) * h > (ivp.t_final - ivp.t0) * (1 + 1e-12):
        raise ValueError(f"{count} starting values do not fit in [{ivp.t0}, {ivp.t_final}] with h={h}")
    tableau, substeps = starter_for_order(coeffs.p)
    rhs = lambda t, y: eval_rhs(ivp, t, y)  # noqa: E731
    out = np.empty((count, ivp.dimension))
    out[0] = ivp.y0
    y = ivp.y0.copy()
    dt = h / substeps
    for j in range(1, count):
        t = ivp.t0 + (j - 1) * h
        for s in range(substeps):
            y = rk_step(rhs, tableau, t + s * dt, y, dt)
        out[j] = y
    return out


# --- Newton ------------------------------------------------------------------


def fd_jacobian(residual: Callable, y: np.ndarray, r0: np.ndarray, eps: Optional[float] = None) -> np.ndarray:
    n = len(y)
    jac = np.empty((len(r0), n))
    for i in range(n):
        step = eps if eps is not None else math.sqrt(EPS) * max(1.0, abs(y[i]))
        yp = y.copy()
        yp[i] += step
        # use the representable increment
        step = yp[i] - y[i]
        jac[:, i] = (np.asarray(residual(yp), dtype=float) - r0) / step
    return jac


def newton_solve(residual: Callable, guess, cfg: ImplicitSolveConfig = DEFAULT_CONFIG, step: Optional[int] = None):
    """Solve residual(y) = 0 to max-norm tolerance ``cfg.tol``.

    Uses a forward-difference Jacobian and dense LU (LAPACK gesv) for the
    linear solves. Once the tolerance is met, one more correction with the
    last Jacobian is applied if it lowers the residual: the difference
    Jacobian limits convergence to a linear rate, and without this the
    accepted residuals (up to ``tol`` per step) accumulate visibly over long
    integrations.
    """
    y = np.array(guess, dtype=float).reshape(-1)
    r = np.asarray(residual(y), dtype=float).reshape(-1)
    if len(r) != len(y):
        raise ValueError(f"residual has length {len(r)}, state has length {len(y)}")
    norm = np.max(np.abs(r))
    if norm <= cfg.tol:
        return y
    for _ in range(cfg.max_iters):
        jac = fd_jacobian(residual, y, r, cfg.jacobian_fd_eps)
        y, r = _newton_update(residual, y, r, jac, step)
        norm = np.max(np.abs(r))
        if not np.isfinite(norm):
            raise DivergenceError(f"Newton iteration produced a non-finite residual at step {step}")
        if norm <= cfg.tol:
            return _polish(residual, y, r, norm, jac)
    raise NewtonConvergenceError(
        f"Newton did not converge in {cfg.max_iters} iterations at step {step}: residual {norm:.3e}",
        step=step,
        residual=norm,
    )


def _newton_update(residual, y, r, jac, step):
    try:
        delta = np.linalg.solve(jac, -r)
    except np.linalg.LinAlgError as exc:
        raise SingularJacobianError(f"singular Jacobian at step {step}: {exc}") from None
    y = y + delta
    return y, np.asarray(residual(y), dtype=float).reshape(-1)


def _polish(residual, y, r, norm, jac):
    if norm == 0.0:
        return y
    y2, r2 = _newton_update(residual, y, r, jac, None)
    return y2 if np.max(np.abs(r2)) <= norm else y


# --- LMM driver ----------------------------------------------------------------


def integrate(
    ivp: IVP,
    coeffs: LMMCoefficients,
    n_steps: int,
    solve_cfg: ImplicitSolveConfig = DEFAULT_CONFIG,
    starting_values: Optional[Sequence] = None,
) -> GridSolution:
    """Run the LMM over ``n_steps`` uniform steps of [t0, t_final].

    ``starting_values`` replaces the built-in starter (it must hold as many
    states as the method needs: k, or the predictor's k in PECE mode).
    """
    k = coeffs.k
    n_steps = int(n_steps)
    if n_steps < k:
        raise ValueError(f"{coeffs.name} needs at least {k} steps, got {n_steps}")
    mode = solve_cfg.resolve_mode(coeffs)
    predictor = make_method(Family.AB, coeffs.p) if mode == "pece" else None
    n_start = max(k, predictor.k) if predictor is not None else k
    if n_steps < n_start:
        raise ValueError(f"{coeffs.name} in PECE mode needs at least {n_start} steps, got {n_steps}")

    h = (ivp.t_final - ivp.t0) / n_steps
    times = np.linspace(ivp.t0, ivp.t_final, n_steps + 1)
    states = np.empty((n_steps + 1, ivp.dimension))
    if starting_values is None:
        states[:n_start] = generate_starting_values(ivp, coeffs, h, n_start)
    else:
        sv = np.asarray(starting_values, dtype=float).reshape(n_start, ivp.dimension)
        states[:n_start] = sv
    derivs = np.empty_like(states)
    for j in range(n_start):
        derivs[j] = eval_rhs(ivp, times[j], states[j])

    with np.errstate(over="ignore", invalid="ignore"):
        _advance(ivp, coeffs, mode, predictor, solve_cfg, h, times, states, derivs, n_start)
    return GridSolution(h=h, times=times, states=states, method_name=coeffs.name)


def _advance(ivp, coeffs, mode, predictor, solve_cfg, h, times, states, derivs, n_start):
    k = coeffs.k
    alphas, betas = coeffs.alphas, coeffs.betas
    a_hist, b_hist, beta_k = alphas[:k], betas[:k], betas[k]
    if predictor is not None:
        kp = predictor.k
        pa_hist, pb_hist = predictor.alphas[:kp], predictor.betas[:kp]
    for m in range(n_start, len(times)):
        n = m - k
        # known part: y_m + sum_{j<k} a_j y_{n+j} = h sum_{j<k} b_j f_{n+j} + h beta_k f_m
        known = h * (b_hist @ derivs[n:m]) - a_hist @ states[n:m]
        t = times[m]
        if mode == "explicit":
            y = known
        elif mode == "pece":
            npred = m - kp
            y_pred = h * (pb_hist @ derivs[npred:m]) - pa_hist @ states[npred:m]
            y = known + h * beta_k * eval_rhs(ivp, t, y_pred)
        else:
            c = known

            def residual(y, c=c, t=t):
                return y - h * beta_k * eval_rhs(ivp, t, y) - c

            y = newton_solve(residual, states[m - 1], solve_cfg, step=m)
        if not np.all(np.isfinite(y)):
            raise DivergenceError(f"{coeffs.name}: non-finite state at step {m} (t={t:g})")
        states[m] = y
        derivs[m] = eval_rhs(ivp, t, y)


def lmm_residuals(ivp: IVP, coeffs: LMMCoefficients, sol: GridSolution) -> np.ndarray:
    """Max-norm residual of the LMM recursion at every step n = 0..N-k."""
    k = coeffs.k
    f = np.array([eval_rhs(ivp, t, y) for t, y in zip(sol.times, sol.states)])
    out = []
    for n in range(sol.n_steps - k + 1):
        lhs = coeffs.alphas @ sol.states[n:n + k + 1]
        rhs = sol.h * (coeffs.betas @ f[n:n + k + 1])
        out.append(np.max(np.abs(lhs - rhs)))
    return np.array(out)


def rk4_solve(ivp: IVP, n_steps: int) -> GridSolution:
    """Classical RK4 on a uniform grid."""
    h = (ivp.t_final - ivp.t0) / n_steps
    times = np.linspace(ivp.t0, ivp.t_final, n_steps + 1)
    states = np.empty((n_steps + 1, ivp.dimension))
    y = ivp.y0.copy()
    states[0] = y
    f = ivp.rhs
    t0 = ivp.t0
    for n in range(n_steps):
        t = t0 + n * h
        k1 = f(t, y)
        k2 = f(t + 0.5 * h, y + 0.5 * h * k1)
        k3 = f(t + 0.5 * h, y + 0.5 * h * k2)
        k4 = f(t + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        states[n + 1] = y
    if not np.all(np.isfinite(states)):
        raise DivergenceError(f"RK4 reference diverged on {ivp.name}")
    return GridSolution(h=h, times=times, states=states, method_name="RK4")
