"""Independent verification engine.

Builds the 4-metric in explicit coordinates for each base curvature
K in {-4, 0, 4} and computes Ricci and the cyclic (Killing) defect by
pure finite differences of the metric components; nothing here shares a
code path with the closed-form eigenvalue formulas it is used to check.

dtheta normalization: the charts realize dtheta = 2 s (base area form).
That choice is pinned non-circularly by calibrate(): with F = G = 1,
s = 1 over the K = 4 base the metric must be the round unit 3-sphere
times a line, whose Ricci eigenvalues {0, 2, 2, 2} are classical.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import BPoly

from ._backend import BACKEND, metric_components, ricci_core
from .errors import CalibrationError, ProfileDomainError
from .ode import ProfileGrid

CHART_IDS = {"flat": 0, "hyperbolic": 1, "spherical": 2}
CHART_FOR_K = {0.0: "flat", -4.0: "hyperbolic", 4.0: "spherical"}
K_FOR_CHART = {"flat": 0.0, "hyperbolic": -4.0, "spherical": 4.0}
#: stereographic patch radius kept small for conditioning
SPHERICAL_RADIUS = 3.0


@dataclass(frozen=True)
class ChartPoint:
    t: float
    u: float
    v: float
    w: float
    chart_tag: str

    def __post_init__(self):
        if self.chart_tag not in CHART_IDS:
            raise ProfileDomainError(f"unknown chart {self.chart_tag!r}")
        if self.chart_tag == "hyperbolic" and not self.v > 0.0:
            raise ProfileDomainError("hyperbolic chart needs v > 0")
        if (self.chart_tag == "spherical"
                and self.u**2 + self.v**2 >= SPHERICAL_RADIUS**2):
            raise ProfileDomainError("outside the stereographic patch")


@dataclass(frozen=True)
class MetricSample:
    g: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.g, dtype=float)
        if m.shape != (4, 4) or not np.allclose(m, m.T, atol=1e-12):
            raise ValueError("metric sample must be a symmetric 4x4 matrix")
        if np.any(np.linalg.eigvalsh(m) <= 0.0):
            raise ValueError("metric sample is not positive definite")
        object.__setattr__(self, "g", m)


class AnalyticProfile:
    """Profile from callables; derivative callables are optional and only
    needed by closed-form comparisons, not by the FD oracle."""

    def __init__(self, F, G, dF=None, ddF=None, dG=None, ddG=None):
        self.F, self.G = F, G
        self.dF, self.ddF, self.dG, self.ddG = dF, ddF, dG, ddG

    def values(self, t):
        return float(self.F(t)), float(self.G(t))

    def stencil(self, t, h):
        ts = t + h * np.arange(-2, 3)
        return (np.array([self.F(x) for x in ts]),
                np.array([self.G(x) for x in ts]))


class HermiteProfile:
    """Quintic Hermite interpolation of sampled (F, G) with exact nodal
    first and second derivatives.

    The cyclic-defect check differentiates the FD Ricci once more, so the
    interpolant's second derivative must track the true profile to
    O(dt^4); two-point quintics with exact (y, y', y'') achieve that,
    cubics measurably do not at the default resolution."""

    def __init__(self, t, F, dF, ddF, G, dG, ddG):
        self._F = BPoly.from_derivatives(t, np.stack([F, dF, ddF], axis=1))
        self._G = BPoly.from_derivatives(t, np.stack([G, dG, ddG], axis=1))
        self.t_min = float(t[0])
        self.t_max = float(t[-1])

    def values(self, t):
        self._check(t)
        return float(self._F(t)), float(self._G(t))

    def stencil(self, t, h):
        ts = t + h * np.arange(-2, 3)
        self._check(ts[0])
        self._check(ts[-1])
        return np.asarray(self._F(ts), dtype=float), np.asarray(self._G(ts), dtype=float)

    def _check(self, t):
        if t < self.t_min or t > self.t_max:
            raise ProfileDomainError(f"t={t} outside profile domain")

    def interior_window(self, step: float, pad: int = 5):
        """t-range safe for FD sampling, pad steps away from both ends."""
        return self.t_min + pad * step, self.t_max - pad * step


class GridProfile(HermiteProfile):
    def __init__(self, grid: ProfileGrid):
        self.grid = grid
        super().__init__(grid.t, grid.F, grid.dF, grid.ddF,
                         grid.G, grid.dG, grid.ddG)


def scaled_grid_profile(grid: ProfileGrid, target_length: float = math.pi):
    """Homothety-normalized profile for oracle sampling.

    g -> c^2 g maps (t, F, G) to (c t, c F, c G) with the connection form
    and s unchanged, so the rescaled profile represents the same metric up
    to homothety. The cyclic defect scales as c^-3 and is therefore only
    meaningful at a fixed normalization; sampling at a fixed profile
    length keeps the FD error budget uniform across families whose
    natural scale degenerates. Returns (profile, c).
    """
    c = target_length / (grid.b - grid.a)
    prof = HermiteProfile(c * grid.t, c * grid.F, grid.dF, grid.ddF / c,
                          c * grid.G, grid.dG, grid.ddG / c)
    return prof, c


def _s_of(spec_or_s) -> float:
    return float(getattr(spec_or_s, "s", spec_or_s))


def chart_metric(spec_or_s, profile, p: ChartPoint) -> MetricSample:
    """Coordinate components of dt^2 + F^2 theta^2 + G^2 g_base at p."""
    s = _s_of(spec_or_s)
    F, G = profile.values(p.t)
    g = metric_components(CHART_IDS[p.chart_tag], s, F * F, G * G, p.u, p.v)
    return MetricSample(g=np.asarray(g))


def ricci_fd(spec_or_s, profile, p: ChartPoint, step: float = 1e-4,
             richardson: bool = True):
    """Ricci tensor at p by central differences of the chart metric.

    Returns (ric, eigenvalues) with the eigenvalues of g^-1 ric sorted
    ascending. One Richardson level combines the full and half step.
    """
    s = _s_of(spec_or_s)
    cid = CHART_IDS[p.chart_tag]

    def one_pass(h):
        F5, G5 = profile.stencil(p.t, h)
        ric, g = ricci_core(cid, s, p.u, p.v, h, np.ascontiguousarray(F5),
                            np.ascontiguousarray(G5))
        return np.asarray(ric), np.asarray(g)

    if richardson:
        r1, g = one_pass(step)
        r2, _ = one_pass(step / 2.0)
        ric = (4.0 * r2 - r1) / 3.0
    else:
        ric, g = one_pass(step)
    cond = np.linalg.cond(g)
    if cond > 1e8:
        warnings.warn(f"metric condition number {cond:.2e} at t={p.t}",
                      RuntimeWarning, stacklevel=2)
    eigs = np.sort(np.linalg.eigvals(np.linalg.solve(g, ric)).real)
    return ric, eigs


def scalar_curvature_fd(spec_or_s, profile, p: ChartPoint, step: float = 1e-4):
    ric, g = _ric_and_g(spec_or_s, profile, p, step)
    return float(np.trace(np.linalg.solve(g, ric)))


def _ric_and_g(spec_or_s, profile, p, step):
    s = _s_of(spec_or_s)
    cid = CHART_IDS[p.chart_tag]
    F5, G5 = profile.stencil(p.t, step)
    r1, g = ricci_core(cid, s, p.u, p.v, step, np.ascontiguousarray(F5),
                       np.ascontiguousarray(G5))
    F5h, G5h = profile.stencil(p.t, step / 2.0)
    r2, _ = ricci_core(cid, s, p.u, p.v, step / 2.0,
                       np.ascontiguousarray(F5h), np.ascontiguousarray(G5h))
    return (4.0 * np.asarray(r2) - np.asarray(r1)) / 3.0, np.asarray(g)


def killing_defect(spec_or_s, profile, p: ChartPoint, X, step: float = 1e-3,
                   outer_step: float = 3e-3) -> float:
    """|nabla_X rho(X, X) - (1/3) (X tau) g(X, X)| for unit X.

    rho and tau at shifted points come from the FD Ricci, differentiated
    with a 5-point fourth-order stencil; the covariant correction uses
    Richardson-corrected FD Christoffel symbols at p. Coefficient 1/3 is
    2/(dim + 2) in dimension 4. The inner step sits well above ricci_fd's
    default so that Ricci round-off, amplified by the outer difference,
    stays far below the defect tolerance.
    """
    from ._backend import christoffel_core

    s = _s_of(spec_or_s)
    cid = CHART_IDS[p.chart_tag]
    X = np.asarray(X, dtype=float)
    g0 = chart_metric(spec_or_s, profile, p).g
    norm2 = float(X @ g0 @ X)
    if abs(norm2 - 1.0) > 1e-8:
        raise ValueError("X must be unit length in the metric at p")

    center = np.array([p.t, p.u, p.v, p.w])
    drho = np.zeros((4, 4, 4))
    dtau = np.zeros(4)
    for a in range(4):
        if a == 3:
            continue  # metric (hence rho, tau) is w-independent
        rhos, taus = [], []
        for mult in (-2.0, -1.0, 1.0, 2.0):
            q = center.copy()
            q[a] += mult * outer_step
            qp = ChartPoint(q[0], q[1], q[2], q[3], p.chart_tag)
            ric, g = _ric_and_g(spec_or_s, profile, qp, step)
            rhos.append(ric)
            taus.append(float(np.trace(np.linalg.solve(g, ric))))
        drho[a] = (rhos[0] - 8.0 * rhos[1] + 8.0 * rhos[2] - rhos[3]) / (12.0 * outer_step)
        dtau[a] = (taus[0] - 8.0 * taus[1] + 8.0 * taus[2] - taus[3]) / (12.0 * outer_step)

    def gamma_at(h):
        F5, G5 = profile.stencil(p.t, h)
        return np.asarray(christoffel_core(cid, s, p.u, p.v, h,
                                           np.ascontiguousarray(F5),
                                           np.ascontiguousarray(G5)))

    gam = (4.0 * gamma_at(step / 2.0) - gamma_at(step)) / 3.0
    rho0, _ = _ric_and_g(spec_or_s, profile, p, step)
    # nabla_a rho_bc = d_a rho_bc - Gamma^d_ab rho_dc - Gamma^d_ac rho_bd
    nabla = (drho
             - np.einsum("dab,dc->abc", gam, rho0)
             - np.einsum("dac,bd->abc", gam, rho0))
    lhs = float(np.einsum("abc,a,b,c->", nabla, X, X, X))
    xtau = float(dtau @ X)
    return abs(lhs - xtau / 3.0)


_CALIBRATION_CASES = (
    # (name, chart, s, expected eigenvalues of the product metric)
    ("round_s3_times_line", "spherical", 1.0, (0.0, 2.0, 2.0, 2.0)),
    ("flat_product", "flat", 0.0, (0.0, 0.0, 0.0, 0.0)),
    ("hyperbolic_product", "hyperbolic", 0.0, (-4.0, -4.0, 0.0, 0.0)),
)

_CALIBRATION_POINTS = {
    "flat": ChartPoint(0.0, 0.3, -0.2, 0.1, "flat"),
    "hyperbolic": ChartPoint(0.0, 0.3, 0.7, 0.1, "hyperbolic"),
    "spherical": ChartPoint(0.0, 0.3, -0.2, 0.1, "spherical"),
}


@dataclass(frozen=True)
class CalibrationReport:
    cases: dict
    max_error: float
    tolerance: float
    passed: bool
    backend: str


def calibrate(step: float = 1e-4, tol: float = 1e-5,
              strict: bool = False) -> CalibrationReport:
    """Known-answer checks pinning the dtheta = 2 s (area form) convention.

    The constant-profile metrics are classical products whose Ricci
    spectra are known independently of the eigenvalue formulas verified
    elsewhere; failure means the chart normalization is wrong.
    """
    one = AnalyticProfile(lambda t: 1.0, lambda t: 1.0)
    cases = {}
    worst = 0.0
    for name, chart, s, expected in _CALIBRATION_CASES:
        p = _CALIBRATION_POINTS[chart]
        _, eigs = ricci_fd(s, one, p, step=step)
        err = float(np.abs(eigs - np.sort(np.array(expected))).max())
        worst = max(worst, err)
        cases[name] = {"chart": chart, "eigenvalues": [float(e) for e in eigs],
                       "expected": list(expected), "max_error": err,
                       "passed": err <= tol}
        if strict and err > tol:
            raise CalibrationError(f"{name} ({chart} chart): error {err:.3e}")
    return CalibrationReport(cases=cases, max_error=worst, tolerance=tol,
                             passed=worst <= tol, backend=BACKEND)


def random_unit_vector(rng: np.random.Generator, g: np.ndarray) -> np.ndarray:
    """Random direction of unit length in the metric g."""
    for _ in range(32):
        X = rng.standard_normal(4)
        n2 = float(X @ g @ X)
        if n2 > 1e-12:
            return X / math.sqrt(n2)
    raise RuntimeError("could not draw a unit vector")


def random_chart_point(rng: np.random.Generator, chart: str,
                       t_range: tuple[float, float]) -> ChartPoint:
    t = rng.uniform(*t_range)
    w = rng.uniform(-1.0, 1.0)
    if chart == "flat":
        u, v = rng.uniform(-1.0, 1.0, size=2)
    elif chart == "hyperbolic":
        u = rng.uniform(-1.0, 1.0)
        v = rng.uniform(0.4, 1.6)
    else:
        u, v = rng.uniform(-0.8, 0.8, size=2)
    return ChartPoint(float(t), float(u), float(v), float(w), chart)


def sample_killing_defects(spec, grid: ProfileGrid, rng: np.random.Generator,
                           n_samples: int = 20, perturb: float = 0.0,
                           trim: float = 0.1) -> list[float]:
    """Cyclic defects at seeded random (point, direction) samples.

    Sampling happens on the homothety-normalized profile (fixed length,
    see scaled_grid_profile) over the middle of the interval; collapsed
    orbits make both the metric and the FD quotients degenerate, so a
    trim fraction of the span is excluded at each end. A nonzero perturb
    dents G multiplicatively by (1 + perturb sin(3t)) as a negative
    control that destroys the cyclic condition.
    """
    if perturb:
        grid = _perturb_grid(grid, perturb)
    prof, _ = scaled_grid_profile(grid)
    lo, hi = prof.interior_window(step=1e-3, pad=12)
    span = hi - lo
    lo, hi = lo + trim * span, hi - trim * span
    chart = CHART_FOR_K[spec.K]
    out = []
    for _ in range(n_samples):
        p = random_chart_point(rng, chart, (lo, hi))
        g = chart_metric(spec, prof, p).g
        X = random_unit_vector(rng, g)
        out.append(killing_defect(spec, prof, p, X))
    return out


def _perturb_grid(grid: ProfileGrid, amp: float) -> ProfileGrid:
    import dataclasses

    t = grid.t
    factor = 1.0 + amp * np.sin(3.0 * t)
    dfac = 3.0 * amp * np.cos(3.0 * t)
    ddfac = -9.0 * amp * np.sin(3.0 * t)
    G = grid.G * factor
    dG = grid.dG * factor + grid.G * dfac
    ddG = grid.ddG * factor + 2.0 * grid.dG * dfac + grid.G * ddfac
    return dataclasses.replace(grid, G=G, dG=dG, ddG=ddG)
