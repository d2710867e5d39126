"""Linear stability of LMMs and of their globally extrapolated versions.

Applied to y' = lam*y with mu = h*lam, a k-step method generates the
recursion sum_j (alphas[j] - mu*betas[j]) y_{n+j} = 0, whose characteristic
polynomial rho(zeta) - mu*sigma(zeta) decides boundedness (root condition).
The extrapolated method combines the recursions with parameters mu and mu/2,
and its region is probed by direct simulation.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegenerateParameterError
from .extrapolation import gre_weights
from .methods import LMMCoefficients

UNIT_TOL = 1e-10
SIMPLE_TOL = 1e-6
BOUNDARY_BAND = 1e-4
GRE_STEPS = 512
GRE_TRIALS = 32
BOUND_THRESHOLD = 1e6
SLOW_GROWTH_GAIN = 100.0


class Verdict(str, enum.Enum):
    INSIDE = "inside"
    OUTSIDE = "outside"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class RegionQuery:
    mu: complex
    verdict: Verdict
    max_root_modulus: float
    boundary_root_simple: bool

    @property
    def inside(self) -> bool:
        return self.verdict is Verdict.INSIDE


@dataclass(frozen=True, eq=False)
class CharacteristicPencil:
    """rho(zeta) - mu*sigma(zeta); coefficient arrays are lowest degree first."""

    rho: np.ndarray
    sigma: np.ndarray

    @classmethod
    def of(cls, coeffs: LMMCoefficients) -> "CharacteristicPencil":
        return cls(np.asarray(coeffs.alphas, dtype=complex), np.asarray(coeffs.betas, dtype=complex))

    def at(self, mu: complex) -> np.ndarray:
        return self.rho - mu * self.sigma

    def is_degenerate(self, mu: complex) -> bool:
        a, b = self.rho[-1], self.sigma[-1]
        return abs(a - mu * b) < 1e-12 * (abs(a) + abs(mu) * abs(b) + 1)


def _degenerate(coeffs: LMMCoefficients, mu) -> np.ndarray:
    a, b = coeffs.alphas[-1], coeffs.betas[-1]
    mu = np.asarray(mu)
    return np.abs(a - mu * b) < 1e-12 * (abs(a) + np.abs(mu) * abs(b) + 1)


def _companion_roots(poly: np.ndarray) -> np.ndarray:
    """Roots of polynomials given lowest-degree-first along the last axis.

    ``poly`` has shape (..., k+1) with nonzero leading coefficients; returns
    shape (..., k) via eigenvalues of the companion matrices.
    """
    poly = np.asarray(poly, dtype=complex)
    k = poly.shape[-1] - 1
    batch = poly.shape[:-1]
    if k == 0:
        return np.empty(batch + (0,), dtype=complex)
    monic = poly[..., :-1] / poly[..., -1:]
    comp = np.zeros(batch + (k, k), dtype=complex)
    if k > 1:
        comp[..., np.arange(1, k), np.arange(k - 1)] = 1.0
    comp[..., :, -1] = -monic
    return np.linalg.eigvals(comp)


def pencil_roots(coeffs: LMMCoefficients, mu: complex) -> np.ndarray:
    """All k roots of rho(zeta) - mu*sigma(zeta), with multiplicity."""
    pencil = CharacteristicPencil.of(coeffs)
    if pencil.is_degenerate(mu):
        raise DegenerateParameterError(f"{coeffs.name}: alpha_k - mu*beta_k vanishes at mu={mu}")
    return _companion_roots(pencil.at(mu))


def _classify(roots: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorised root-condition test over a batch of root sets (..., k).

    Returns (inside, max modulus, boundary roots simple).
    """
    mod = np.abs(roots)
    max_mod = mod.max(axis=-1) if roots.shape[-1] else np.zeros(roots.shape[:-1])
    on_circle = np.abs(mod - 1.0) <= UNIT_TOL
    k = roots.shape[-1]
    if k > 1:
        dist = np.abs(roots[..., :, None] - roots[..., None, :])
        dist[..., np.arange(k), np.arange(k)] = np.inf
        repeated = dist.min(axis=-1) <= SIMPLE_TOL
    else:
        repeated = np.zeros_like(on_circle)
    simple = ~np.any(on_circle & repeated, axis=-1)
    inside = (max_mod <= 1.0 + UNIT_TOL) & simple
    return inside, max_mod, simple


def in_stability_region(coeffs: LMMCoefficients, mu: complex) -> RegionQuery:
    """Root-condition membership of mu in the region of absolute stability."""
    mu = complex(mu)
    if CharacteristicPencil.of(coeffs).is_degenerate(mu):
        return RegionQuery(mu, Verdict.DEGENERATE, math.nan, False)
    roots = pencil_roots(coeffs, mu)
    inside, max_mod, simple = _classify(roots[None, :])
    verdict = Verdict.INSIDE if inside[0] else Verdict.OUTSIDE
    return RegionQuery(mu, verdict, float(max_mod[0]), bool(simple[0]))


def region_mask(coeffs: LMMCoefficients, mus) -> np.ndarray:
    """Boolean array: root condition holds at each mu (degenerate points are False)."""
    mus = np.asarray(mus, dtype=complex)
    flat = mus.reshape(-1)
    out = np.zeros(flat.shape, dtype=bool)
    ok = ~_degenerate(coeffs, flat)
    if np.any(ok):
        polys = np.asarray(coeffs.alphas)[None, :] - flat[ok, None] * np.asarray(coeffs.betas)[None, :]
        inside, _, _ = _classify(_companion_roots(polys))
        out[ok] = inside
    return out.reshape(mus.shape)


def max_root_moduli(coeffs: LMMCoefficients, mus) -> np.ndarray:
    """Largest pencil-root modulus at each mu (inf where degenerate)."""
    mus = np.asarray(mus, dtype=complex)
    flat = mus.reshape(-1)
    out = np.full(flat.shape, np.inf)
    ok = ~_degenerate(coeffs, flat)
    if np.any(ok):
        polys = np.asarray(coeffs.alphas)[None, :] - flat[ok, None] * np.asarray(coeffs.betas)[None, :]
        out[ok] = np.abs(_companion_roots(polys)).max(axis=-1)
    return out.reshape(mus.shape)


def boundary_proximate(coeffs: LMMCoefficients, mu: complex, band: float = BOUNDARY_BAND) -> bool:
    """True when some pencil root lies within ``band`` of the unit circle."""
    if CharacteristicPencil.of(coeffs).is_degenerate(mu):
        return True
    mod = np.abs(pencil_roots(coeffs, mu))
    return bool(np.any(np.abs(mod - 1.0) < band))


def undecidable_by_simulation(
    coeffs: LMMCoefficients,
    mu: complex,
    n_steps: int = GRE_STEPS,
    threshold: float = BOUND_THRESHOLD,
    gain: float = SLOW_GROWTH_GAIN,
) -> bool:
    """Whether an ``n_steps`` bounded-trajectory test cannot be trusted at mu.

    True for degenerate mu, for roots within ``BOUNDARY_BAND`` of the unit
    circle, and for roots outside it that grow too slowly to pass
    ``gain * threshold`` in ``n_steps`` steps. ``gain`` covers small
    starting amplitudes of the growing mode and any down-weighting of the
    sequence before the threshold is applied.
    """
    if CharacteristicPencil.of(coeffs).is_degenerate(mu):
        return True
    mod = np.abs(pencil_roots(coeffs, mu))
    slow = (gain * threshold) ** (1.0 / n_steps)
    return bool(np.any((mod > 1.0 - BOUNDARY_BAND) & (mod < slow)))


# --- simulation ----------------------------------------------------------------


def simulate_recursion(coeffs: LMMCoefficients, mu: complex, starts: np.ndarray, n_steps: int) -> np.ndarray:
    """Run the test-equation recursion for a batch of starting sets.

    ``starts`` has shape (trials, k); returns shape (trials, n_steps + 1)
    holding y_0..y_{n_steps}.
    """
    k = coeffs.k
    c = np.asarray(coeffs.alphas, dtype=complex) - complex(mu) * np.asarray(coeffs.betas, dtype=complex)
    weights = -c[:k] / c[k]
    trials = starts.shape[0]
    y = np.zeros((trials, n_steps + 1), dtype=complex)
    y[:, :k] = starts
    with np.errstate(over="ignore", invalid="ignore"):
        for m in range(k, n_steps + 1):
            y[:, m] = y[:, m - k:m] @ weights
    return y


def random_polydisc(rng: np.random.Generator, trials: int, k: int) -> np.ndarray:
    """Uniform samples from the unit polydisc {|z_j| <= 1} in C^k."""
    r = np.sqrt(rng.random((trials, k)))
    theta = rng.random((trials, k)) * 2 * np.pi
    return r * np.exp(1j * theta)


def simulated_bounded(
    coeffs: LMMCoefficients,
    mu: complex,
    n_steps: int = GRE_STEPS,
    trials: int = 16,
    seed: int = 0,
    threshold: float = BOUND_THRESHOLD,
) -> bool:
    """Empirical boundedness of the plain LMM recursion at mu."""
    rng = np.random.default_rng(seed)
    y = simulate_recursion(coeffs, mu, random_polydisc(rng, trials, coeffs.k), n_steps)
    with np.errstate(invalid="ignore"):
        peak = np.nanmax(np.abs(y)) if np.all(np.isfinite(y)) else np.inf
    return bool(peak <= threshold)


def gre_region_member(
    coeffs: LMMCoefficients,
    mu: complex,
    p: Optional[int] = None,
    seed: int = 0,
    n_steps: int = GRE_STEPS,
    trials: int = GRE_TRIALS,
    threshold: float = BOUND_THRESHOLD,
) -> RegionQuery:
    """Empirical membership of mu in the region of the extrapolated method.

    The coarse recursion (parameter mu) runs ``n_steps`` steps and the fine
    one (parameter mu/2) ``2*n_steps``, from independent random starting sets
    in the unit polydisc; r_n is formed at the shared points and mu is
    ``inside`` if max |r_n| stays below ``threshold`` in every trial.
    """
    mu = complex(mu)
    p = coeffs.p if p is None else p
    pencil = CharacteristicPencil.of(coeffs)
    if pencil.is_degenerate(mu) or pencil.is_degenerate(mu / 2):
        return RegionQuery(mu, Verdict.DEGENERATE, math.nan, False)
    rng = np.random.default_rng(seed)
    k = coeffs.k
    coarse = simulate_recursion(coeffs, mu, random_polydisc(rng, trials, k), n_steps)
    fine = simulate_recursion(coeffs, mu / 2, random_polydisc(rng, trials, k), 2 * n_steps)
    w_fine, w_coarse = gre_weights(p)
    with np.errstate(over="ignore", invalid="ignore"):
        r = w_fine * fine[:, ::2] - w_coarse * coarse
        finite = np.all(np.isfinite(r))
        peak = float(np.max(np.abs(r))) if finite else math.inf
    verdict = Verdict.INSIDE if peak <= threshold else Verdict.OUTSIDE
    roots = np.concatenate([pencil_roots(coeffs, mu), pencil_roots(coeffs, mu / 2)])
    _, max_mod, simple = _classify(roots[None, :])
    return RegionQuery(mu, verdict, float(max_mod[0]), bool(simple[0]))


# --- boundary locus and derived quantities ---------------------------------------


def boundary_locus(coeffs: LMMCoefficients, n_samples: int) -> np.ndarray:
    """mu(theta) = rho(e^{i theta}) / sigma(e^{i theta}), theta uniform in [0, 2 pi).

    Poles (|sigma| < 1e-12) are returned as complex NaN.
    """
    if n_samples < 3:
        raise ValueError("n_samples must be at least 3")
    theta = 2 * np.pi * np.arange(n_samples) / n_samples
    zeta = np.exp(1j * theta)
    rho = np.polynomial.polynomial.polyval(zeta, coeffs.alphas)
    sigma = np.polynomial.polynomial.polyval(zeta, coeffs.betas)
    pole = np.abs(sigma) < 1e-12
    out = np.full(n_samples, complex(np.nan, np.nan))
    out[~pole] = rho[~pole] / sigma[~pole]
    return out


def stability_boundary(coeffs: LMMCoefficients, n_samples: int) -> np.ndarray:
    """Locus points that lie on the boundary of the stability region.

    A locus point has a root on the unit circle by construction; it is on the
    region's boundary when no other root lies outside the circle.
    """
    locus = boundary_locus(coeffs, n_samples)
    locus = locus[np.isfinite(locus)]
    locus = locus[~_degenerate(coeffs, locus)]
    mods = max_root_moduli(coeffs, locus)
    return locus[mods <= 1.0 + 1e-8]


def _ray_ok(coeffs: LMMCoefficients, phi_deg: float, radii: np.ndarray, scale: float) -> bool:
    mus = -radii * np.exp(1j * np.deg2rad(phi_deg)) / scale
    return bool(region_mask(coeffs, mus).all())


def a_alpha_angle(
    coeffs: LMMCoefficients,
    scale: float = 1.0,
    n_radii: int = 1000,
    coarse_step: float = 0.5,
    resolution: float = 1e-3,
) -> float:
    """A(alpha) stability angle in degrees.

    Rays mu = -r e^{i phi} with r on a log grid over [1e-3, 1e6] are tested
    with the root condition. Rays are scanned from phi = 0 in steps of
    ``coarse_step`` degrees; the first failing ray is then located by
    bisection to ``resolution`` degrees, and the angle returned is the last
    passing phi plus the 0.001 degree margin. The region of a real-coefficient
    method is symmetric about the real axis, so only phi >= 0 is sampled.
    ``scale=2`` measures the dilated region 2*S (mu tested as mu/2).
    Returns exactly 90.0 when every sampled left half-plane ray passes, and
    0.0 when the negative real axis already fails.
    """
    radii = np.logspace(-3, 6, n_radii)
    margin = 1e-3
    if not _ray_ok(coeffs, 0.0, radii, scale):
        warnings.warn(f"{coeffs.name}: the negative real axis leaves the stability region; angle is 0", stacklevel=2)
        return 0.0
    lo = 0.0
    hi = None
    for phi in np.arange(coarse_step, 90.0 - margin, coarse_step):
        if not _ray_ok(coeffs, phi, radii, scale):
            hi = phi
            break
        lo = phi
    if hi is None:
        if _ray_ok(coeffs, 90.0 - margin, radii, scale):
            return 90.0
        hi = 90.0 - margin
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if _ray_ok(coeffs, mid, radii, scale):
            lo = mid
        else:
            hi = mid
    return min(lo + margin, 90.0)


def a_alpha_angle_locus(coeffs: LMMCoefficients, n_samples: int = 200_000) -> float:
    """A(alpha) angle from the stability boundary: the smallest angle any
    left-half-plane boundary point makes with the negative real axis."""
    pts = stability_boundary(coeffs, n_samples)
    pts = pts[(pts.real < 0) & (np.abs(pts) > 1e-9)]
    if len(pts) == 0:
        return 90.0
    ang = np.degrees(np.pi - np.abs(np.angle(pts)))
    return float(min(90.0, ang.min()))


@dataclass
class Lemma2Violation:
    mu: complex
    lmm: Verdict
    lmm_doubled: Verdict
    gre: Verdict
    clause: str


def sample_box(rng: np.random.Generator, n: int, re=(-8.0, 2.0), im=(-5.0, 5.0)) -> np.ndarray:
    return rng.uniform(re[0], re[1], n) + 1j * rng.uniform(im[0], im[1], n)


@dataclass
class Lemma2Report:
    method_name: str
    n_samples: int
    n_checked: int
    n_skipped: int
    violations: list[Lemma2Violation]

    @property
    def ok(self) -> bool:
        return not self.violations


def lemma2_report(coeffs: LMMCoefficients, n_samples: int, seed: int) -> Lemma2Report:
    """Test S ∩ 2S ⊆ S_GRE and S_GRE ⊆ S at random mu in [-8,2] x [-5i,5i].

    Samples that are degenerate, or where the simulated S_GRE verdict is
    undecidable (some root for mu or mu/2 in the slow-growth band around the
    unit circle), are skipped.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    rng = np.random.default_rng(seed)
    mus = sample_box(rng, n_samples)
    # the coarse sequence enters r_n with weight 1/(2^p - 1)
    gain = SLOW_GROWTH_GAIN * (2.0**coeffs.p - 1.0)
    violations = []
    checked = 0
    for i, mu in enumerate(mus):
        if undecidable_by_simulation(coeffs, mu, gain=gain) or undecidable_by_simulation(coeffs, mu / 2, gain=gain):
            continue
        gre = gre_region_member(coeffs, mu, seed=seed + i)
        if gre.verdict is Verdict.DEGENERATE:
            continue
        checked += 1
        lmm = in_stability_region(coeffs, mu).verdict
        lmm2 = in_stability_region(coeffs, mu / 2).verdict
        if lmm is Verdict.INSIDE and lmm2 is Verdict.INSIDE and gre.verdict is not Verdict.INSIDE:
            violations.append(Lemma2Violation(mu, lmm, lmm2, gre.verdict, "i"))
        if gre.verdict is Verdict.INSIDE and lmm is not Verdict.INSIDE:
            violations.append(Lemma2Violation(mu, lmm, lmm2, gre.verdict, "ii"))
    return Lemma2Report(coeffs.name, n_samples, checked, n_samples - checked, violations)


def check_lemma2_inclusions(coeffs: LMMCoefficients, n_samples: int, seed: int) -> list[Lemma2Violation]:
    """Violations of the two inclusions (empty when both hold empirically)."""
    return lemma2_report(coeffs, n_samples, seed).violations


def convexity_probe(coeffs: LMMCoefficients, n_boundary: int = 128) -> bool:
    """Whether midpoints of sampled boundary points all stay in the region."""
    if n_boundary < 16:
        raise ValueError("n_boundary must be at least 16")
    pts = stability_boundary(coeffs, 8 * n_boundary)
    if len(pts) > n_boundary:
        pts = pts[np.linspace(0, len(pts) - 1, n_boundary).round().astype(int)]
    i, j = np.triu_indices(len(pts), k=1)
    mids = 0.5 * (pts[i] + pts[j])
    return bool(region_mask(coeffs, mids).all())
