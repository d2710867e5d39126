"""Coefficient sets for Adams-Bashforth, Adams-Moulton and BDF methods.

A k-step method is stored as ``sum_j alphas[j] y_{n+j} = h sum_j betas[j] f_{n+j}``
with ``alphas[k] == 1``. Coefficients are derived here from the order
conditions in exact rational arithmetic rather than copied from tables.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import UnsupportedMethodError


class Family(str, enum.Enum):
    AB = "AB"
    AM = "AM"
    BDF = "BDF"


SUPPORTED_ORDERS = {
    Family.AB: range(1, 5),
    Family.AM: range(2, 5),
    Family.BDF: range(1, 7),
}

ORDER_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class LMMCoefficients:
    family: Family
    k: int
    alphas: np.ndarray
    betas: np.ndarray
    p: int
    name: str
    error_constant: Optional[float] = None

    def __post_init__(self):
        for attr in ("alphas", "betas"):
            arr = np.array(getattr(self, attr), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, attr, arr)
        if len(self.alphas) != self.k + 1 or len(self.betas) != self.k + 1:
            raise ValueError(f"{self.name}: expected {self.k + 1} alphas and betas")
        if self.alphas[-1] == 0.0:
            raise ValueError(f"{self.name}: alphas[k] must be nonzero")

    @property
    def implicit(self) -> bool:
        return self.betas[-1] != 0.0

    def __repr__(self):
        return f"LMMCoefficients({self.name}, k={self.k}, p={self.p})"


def normalize(alphas: Sequence[float], betas: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    """Scale a coefficient pair so that alphas[k] == 1."""
    alphas = np.asarray(alphas, dtype=float)
    betas = np.asarray(betas, dtype=float)
    lead = alphas[-1]
    if lead == 0.0:
        raise ValueError("alphas[k] must be nonzero")
    if lead == 1.0:
        return alphas.copy(), betas.copy()
    return alphas / lead, betas / lead


def order_residuals(alphas, betas, q_max: int) -> list:
    """C_q = sum_j j^q alphas[j] - q sum_j j^(q-1) betas[j] for q = 0..q_max.

    Works on floats or Fractions; 0**0 is taken as 1.
    """
    out = []
    for q in range(q_max + 1):
        c = sum(j**q * a for j, a in enumerate(alphas))
        if q > 0:
            c -= q * sum(j ** (q - 1) * b for j, b in enumerate(betas))
        out.append(c)
    return out


def verify_order_conditions(coeffs) -> int:
    """Largest p with C_0 = ... = C_p = 0 (0 if even C_0 fails).

    Accepts an ``LMMCoefficients`` or an ``(alphas, betas)`` pair.

    Each residual is compared against ``ORDER_TOL`` times the magnitude of
    the terms entering it, so the test is insensitive to the rounding of the
    coefficients to doubles (for BDF6, ``6**6 * alpha_6`` alone is ~5e4).
    """
    if isinstance(coeffs, LMMCoefficients):
        alphas, betas = coeffs.alphas, coeffs.betas
    else:
        alphas, betas = coeffs
    alphas = np.asarray(alphas, dtype=float)
    betas = np.asarray(betas, dtype=float)
    if len(alphas) != len(betas):
        raise ValueError("alphas and betas must have equal length")
    j = np.arange(len(alphas), dtype=float)
    p = -1
    # an LMM with k steps has order at most 2k; the cap guards against zero methods
    for q in range(2 * len(alphas) + 2):
        ja = j**q * alphas
        terms = list(ja)
        if q > 0:
            terms += list(-q * j ** (q - 1) * betas)
        c = math.fsum(terms)
        scale = max(1.0, math.fsum(abs(x) for x in terms))
        if abs(c) > ORDER_TOL * scale:
            break
        p = q
    return max(p, 0)


def _solve_rational(matrix: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    n = len(rhs)
    aug = [row[:] + [b] for row, b in zip(matrix, rhs)]
    for col in range(n):
        pivot = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[pivot] = aug[pivot], aug[col]
        piv = aug[col][col]
        aug[col] = [x / piv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [x - factor * y for x, y in zip(aug[r], aug[col])]
    return [aug[r][n] for r in range(n)]


def _adams(k: int, implicit: bool) -> tuple[list[Fraction], list[Fraction]]:
    alphas = [Fraction(0)] * (k + 1)
    alphas[k - 1], alphas[k] = Fraction(-1), Fraction(1)
    free = list(range(k + 1)) if implicit else list(range(k))
    # C_q = 0 for q = 1..len(free) is linear in the free betas
    matrix, rhs = [], []
    for q in range(1, len(free) + 1):
        matrix.append([Fraction(q * j ** (q - 1)) for j in free])
        rhs.append(sum(Fraction(j**q) * a for j, a in enumerate(alphas)))
    sol = _solve_rational(matrix, rhs)
    betas = [Fraction(0)] * (k + 1)
    for j, b in zip(free, sol):
        betas[j] = b
    return alphas, betas


def _bdf(k: int) -> tuple[list[Fraction], list[Fraction]]:
    # unknowns alpha_0..alpha_{k-1}, beta_k; equations C_0..C_k
    matrix, rhs = [], []
    for q in range(k + 1):
        row = [Fraction(j**q) for j in range(k)]
        row.append(Fraction(-q * k ** (q - 1)) if q > 0 else Fraction(0))
        matrix.append(row)
        rhs.append(-Fraction(k**q))
    sol = _solve_rational(matrix, rhs)
    alphas = sol[:k] + [Fraction(1)]
    betas = [Fraction(0)] * k + [sol[k]]
    return alphas, betas


def exact_coefficients(family: Family | str, order: int) -> tuple[list[Fraction], list[Fraction]]:
    """Rational (alphas, betas) for the method of the given family and order."""
    family = _family(family)
    if order not in SUPPORTED_ORDERS[family]:
        r = SUPPORTED_ORDERS[family]
        raise UnsupportedMethodError(
            f"{family.value}{order} is not supported; {family.value} orders {r.start}..{r.stop - 1} are available"
        )
    if family is Family.AB:
        return _adams(order, implicit=False)
    if family is Family.AM:
        return _adams(order - 1, implicit=True)
    return _bdf(order)


def _family(family) -> Family:
    try:
        return Family(family.upper() if isinstance(family, str) else family)
    except ValueError:
        raise UnsupportedMethodError(f"unknown method family {family!r}; use AB, AM or BDF") from None


@functools.lru_cache(maxsize=None)
def _make_cached(family: Family, order: int) -> LMMCoefficients:
    alphas, betas = exact_coefficients(family, order)
    k = len(alphas) - 1
    error_constant = None
    if family is Family.BDF:
        c_next = order_residuals(alphas, betas, order + 1)[-1]
        error_constant = float(c_next / (math.factorial(order + 1) * sum(betas)))
    return LMMCoefficients(
        family=family,
        k=k,
        alphas=[float(a) for a in alphas],
        betas=[float(b) for b in betas],
        p=order,
        name=f"{family.value}{order}",
        error_constant=error_constant,
    )


def make_method(family: Family | str, order: int) -> LMMCoefficients:
    """Build a method by family and order (AM2 is the trapezoidal rule, BDFk has k steps)."""
    return _make_cached(_family(family), int(order))


METHOD_IDS = tuple(
    f"{fam.value.lower()}{p}" for fam in (Family.AB, Family.AM, Family.BDF) for p in SUPPORTED_ORDERS[fam]
)


def method_from_id(identifier: str) -> LMMCoefficients:
    """Parse a CLI identifier such as ``ab2``, ``am3`` or ``bdf6``."""
    ident = identifier.strip().lower()
    for fam in ("bdf", "ab", "am"):
        if ident.startswith(fam) and ident[len(fam):].isdigit():
            return make_method(fam, int(ident[len(fam):]))
    raise UnsupportedMethodError(f"unknown method {identifier!r}; choose one of {', '.join(METHOD_IDS)}")


def all_methods() -> list[LMMCoefficients]:
    return [method_from_id(m) for m in METHOD_IDS]
