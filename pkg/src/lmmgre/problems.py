"""Initial-value problems and the built-in benchmark set."""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DimensionError, UnknownProblemError

Rhs = Callable[[float, np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class IVP:
    """y'(t) = rhs(t, y) on [t0, t_final] with y(t0) = y0.

    Instances are immutable and hash by identity, so they can be used as
    cache keys.
    """

    name: str
    dimension: int
    rhs: Rhs
    t0: float
    t_final: float
    y0: np.ndarray
    exact_solution: Optional[Callable[[float], np.ndarray]] = None

    def __post_init__(self):
        y0 = np.array(self.y0, dtype=float).reshape(-1)
        y0.setflags(write=False)
        object.__setattr__(self, "y0", y0)
        if self.dimension < 1:
            raise DimensionError("dimension must be positive")
        if len(y0) != self.dimension:
            raise DimensionError(f"y0 has length {len(y0)}, expected {self.dimension}")
        if not self.t_final > self.t0:
            raise ValueError(f"t_final ({self.t_final}) must exceed t0 ({self.t0})")

    def with_span(self, t0: float | None = None, t_final: float | None = None) -> "IVP":
        new_t0 = self.t0 if t0 is None else t0
        # the exact solution is anchored at the original t0
        exact = self.exact_solution if new_t0 == self.t0 else None
        return IVP(
            self.name,
            self.dimension,
            self.rhs,
            new_t0,
            self.t_final if t_final is None else t_final,
            self.y0,
            exact,
        )


def eval_rhs(ivp: IVP, t: float, y) -> np.ndarray:
    y = np.asarray(y, dtype=float).reshape(-1)
    if len(y) != ivp.dimension:
        raise DimensionError(f"state has length {len(y)}, problem {ivp.name!r} has dimension {ivp.dimension}")
    return np.asarray(ivp.rhs(t, y), dtype=float).reshape(-1)


def _lotka_volterra(t, y):
    return np.array([0.1 * y[0] - 0.3 * y[0] * y[1], 0.5 * (y[0] - 1.0) * y[1]])


def _van_der_pol(t, y):
    return np.array([y[1], 2.0 * (1.0 - y[0] ** 2) * y[1] - y[0]])


def lotka_volterra(t0: float = 0.0, t_final: float = 62.0) -> IVP:
    return IVP("lotka-volterra", 2, _lotka_volterra, t0, t_final, [1.0, 1.0])


def van_der_pol(t0: float = 0.0, t_final: float = 20.0) -> IVP:
    return IVP("van-der-pol", 2, _van_der_pol, t0, t_final, [2.0, 0.0])


def dahlquist(lam: complex, t0: float = 0.0, t_final: float = 1.0, y0: complex = 1.0) -> IVP:
    """The linear test equation y' = lam*y.

    A complex ``lam = a + ib`` becomes the real system u' = a*u - b*v,
    v' = b*u + a*v, with state (Re y, Im y).
    """
    lam = complex(lam)
    y0 = complex(y0)
    a, b = lam.real, lam.imag
    if b == 0.0 and y0.imag == 0.0:
        y0r = y0.real

        def rhs(t, y):
            return a * y

        def exact(t):
            return np.array([y0r * np.exp(a * (t - t0))])

        name = f"dahlquist:{a:g}"
        return IVP(name, 1, rhs, t0, t_final, [y0r], exact)

    A = np.array([[a, -b], [b, a]])

    def rhs(t, y):
        return A @ y

    def exact(t):
        z = y0 * np.exp(lam * (t - t0))
        return np.array([z.real, z.imag])

    name = f"dahlquist:{a:g},{b:g}"
    return IVP(name, 2, rhs, t0, t_final, [y0.real, y0.imag], exact)


def parse_lambda(text: str) -> complex:
    parts = text.split(",")
    if not 1 <= len(parts) <= 2:
        raise UnknownProblemError(f"cannot parse dahlquist parameter {text!r}; expected <real>[,<imag>]")
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise UnknownProblemError(f"cannot parse dahlquist parameter {text!r}; expected <real>[,<imag>]") from None
    return complex(values[0], values[1] if len(values) == 2 else 0.0)


PROBLEM_NAMES = ("lotka-volterra", "van-der-pol", "dahlquist:<real>[,<imag>]")


@functools.lru_cache(maxsize=64)
def builtin_problem(name: str, t0: float | None = None, t_final: float | None = None) -> IVP:
    """Look up a built-in problem by its CLI name.

    Underscores are accepted in place of hyphens. ``t0``/``t_final`` override
    the default span (Dahlquist defaults to [0, 1]).
    """
    key = name.strip().lower().replace("_", "-")
    if key == "lotka-volterra":
        ivp = lotka_volterra()
    elif key == "van-der-pol":
        ivp = van_der_pol()
    elif key.startswith("dahlquist"):
        _, sep, arg = key.partition(":")
        if not sep or not arg:
            raise UnknownProblemError("dahlquist needs a parameter, e.g. 'dahlquist:-1' or 'dahlquist:-1,2'")
        return dahlquist(parse_lambda(arg), 0.0 if t0 is None else t0, 1.0 if t_final is None else t_final)
    else:
        raise UnknownProblemError(f"unknown problem {name!r}; choose one of {', '.join(PROBLEM_NAMES)}")
    if t0 is not None or t_final is not None:
        ivp = ivp.with_span(t0, t_final)
    return ivp
