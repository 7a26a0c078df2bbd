"""Profile synthesis: from a FamilySpec to a sampled metric profile.

The momentum H solves H' = sqrt(z(H)) between two simple roots of z, so
t(H) = integral dH / sqrt(z) is strictly increasing and the profile is
obtained by quadrature plus monotone inversion rather than ODE stepping
(sqrt(z) is not Lipschitz at the roots; no stepper is needed).

The square-root endpoint singularity is removed exactly by the
sin-parametrization t-variable = m + R sin(phi): writing
z0 = (t - r0)(r1 - t) psi(t) with psi root-free on [r0, r1], the
arc-length integrand collapses to s / sqrt(psi), smooth up to the ends.
psi is produced by synthetic deflation of P at the boundary roots (the
root at t = 1, when present, is double in P and simple in z0); root
distances are tracked through half-angle identities so nothing cancels
catastrophically near collapsed orbits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import DivergenceError, InversionError, PositivityError, ProfileDomainError
from .families import FamilySpec, z_root_slopes
from .poly import Polynomial, certify_positive, deflate, poly_bound

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(10)


class ZForm:
    """Stable factored evaluation of z0 = (t - r0)(r1 - t) psi(t).

    psi = sign * num / den where den is one of 1 - t^2 (no boundary root at
    +-1), 1 + t (root at +1) or 1 - t (root at -1); num is the deflated
    quotient polynomial. All of z0, z0', z0'' are evaluated through this
    factorization, optionally from externally supplied root distances.
    """

    def __init__(self, spec: FamilySpec):
        self.spec = spec
        self.r0 = spec.t_lo
        self.r1 = spec.t_hi
        P = spec.P
        scale = poly_bound(P, self.r0, self.r1)
        q, rem0 = deflate(P, self.r0)
        q, rem1 = deflate(q, self.r1)
        rems = [rem0, rem1]
        at_plus = abs(self.r1 - 1.0) < 1e-13 or abs(self.r0 - 1.0) < 1e-13
        at_minus = abs(self.r1 + 1.0) < 1e-13 or abs(self.r0 + 1.0) < 1e-13
        # a boundary root at -+1 is double in P (simple in z0): deflate the
        # extra copy and cancel it against the matching factor of 1 - t^2
        if at_plus and at_minus:
            q, rem2 = deflate(q, 1.0)
            q, rem3 = deflate(q, -1.0)
            rems += [rem2, rem3]
            self._den = "one"
            self._sign = 1.0
        elif at_plus:
            q, rem2 = deflate(q, 1.0)
            rems.append(rem2)
            self._den = "p1"
            self._sign = 1.0
        elif at_minus:
            q, rem2 = deflate(q, -1.0)
            rems.append(rem2)
            self._den = "m1"
            self._sign = -1.0
        else:
            self._den = "w"
            self._sign = -1.0
        if any(abs(r) > 1e-8 * scale for r in rems):
            raise ProfileDomainError(
                f"P does not vanish at the stated boundary roots (remainders {rems})")
        self._num = q
        self._dnum = np.array([q.coefficients[i] * i
                               for i in range(1, len(q.coefficients))])
        self._ddnum = np.array([self._dnum[i] * i
                                for i in range(1, len(self._dnum))])
        self._numc = np.asarray(q.coefficients)

    def _pv(self, coeffs, t):
        acc = np.zeros_like(np.asarray(t, dtype=float))
        for c in coeffs[::-1]:
            acc = acc * t + c
        return acc

    def psi(self, t):
        v = self._pv(self._numc, t)
        if self._den == "one":
            return v
        if self._den == "w":
            return self._sign * v / (1.0 - t * t)
        if self._den == "p1":
            return v / (1.0 + t)
        return -v / (1.0 - t)

    def dpsi(self, t):
        v = self._pv(self._numc, t)
        dv = self._pv(self._dnum, t) if len(self._dnum) else np.zeros_like(v)
        if self._den == "one":
            return dv
        if self._den == "w":
            w = 1.0 - t * t
            return self._sign * (dv * w + 2.0 * t * v) / (w * w)
        if self._den == "p1":
            u = 1.0 + t
            return (dv * u - v) / (u * u)
        u = 1.0 - t
        return -(dv * u + v) / (u * u)

    def ddpsi(self, t):
        v = self._pv(self._numc, t)
        dv = self._pv(self._dnum, t) if len(self._dnum) else np.zeros_like(v)
        ddv = self._pv(self._ddnum, t) if len(self._ddnum) else np.zeros_like(v)
        if self._den == "one":
            return ddv
        if self._den == "w":
            w = 1.0 - t * t
            return self._sign * (ddv / w + (4.0 * t * dv + 2.0 * v) / w**2
                                 + 8.0 * t * t * v / w**3)
        if self._den == "p1":
            u = 1.0 + t
            return ddv / u - 2.0 * dv / u**2 + 2.0 * v / u**3
        u = 1.0 - t
        return -(ddv / u + 2.0 * dv / u**2 + 2.0 * v / u**3)

    # u0 = t - r0, u1 = r1 - t
    def z0_from(self, t, u0, u1):
        return u0 * u1 * self.psi(t)

    def dz0_from(self, t, u0, u1):
        return (u1 - u0) * self.psi(t) + u0 * u1 * self.dpsi(t)

    def ddz0_from(self, t, u0, u1):
        return (-2.0 * self.psi(t) + 2.0 * (u1 - u0) * self.dpsi(t)
                + u0 * u1 * self.ddpsi(t))

    def z0(self, t):
        return self.z0_from(t, t - self.r0, self.r1 - t)

    def dz0(self, t):
        return self.dz0_from(t, t - self.r0, self.r1 - t)

    def ddz0(self, t):
        return self.ddz0_from(t, t - self.r0, self.r1 - t)

    def check_simple_roots(self) -> None:
        scale = max(abs(self.psi(0.5 * (self.r0 + self.r1))), 1e-30)
        for r in (self.r0, self.r1):
            if abs(self.dz0(r)) < 1e-9 * max(scale, 1.0):
                raise DivergenceError(
                    f"z' vanishes at boundary root t={r}; the arc-length "
                    "integral diverges")

    def check_positive_inside(self) -> None:
        # z0 > 0 on (r0, r1) <=> (t-r0)(r1-t) psi > 0 <=> psi > 0 there
        num = self._num if self._sign_positive_inside() else -1.0 * self._num
        cert = certify_positive(num, self.r0, self.r1)
        if not cert.positive:
            raise PositivityError(
                f"z is not positive between its boundary roots (t={cert.witness})")

    def _sign_positive_inside(self) -> bool:
        mid = 0.5 * (self.r0 + self.r1)
        den = {"one": 1.0, "w": 1.0 - mid * mid, "p1": 1.0 + mid,
               "m1": -(1.0 - mid)}[self._den]
        if self._den == "w":
            den *= self._sign
        return den > 0.0


@dataclass(frozen=True)
class ProfileGrid:
    """Sampled profile on [a, b]; arrays all have n+1 entries.

    H is the momentum variable (h-units, H = s * t-variable), F the fiber
    radius (= H'), G the base radius with G^2 = |s^2 - H^2|. u0/u1 are the
    stable distances of the t-variable to the boundary roots.
    """

    t: np.ndarray
    H: np.ndarray
    F: np.ndarray
    G: np.ndarray
    dF: np.ndarray
    ddF: np.ndarray
    dG: np.ndarray
    ddG: np.ndarray
    spec: FamilySpec
    a: float
    b: float
    u0: np.ndarray
    u1: np.ndarray

    @property
    def n(self) -> int:
        return len(self.t) - 1

    @property
    def point_end(self) -> str | None:
        """Which end, if any, collapses to a point (G = 0 there)."""
        if self.G[0] == 0.0:
            return "a"
        if self.G[-1] == 0.0:
            return "b"
        return None


def _phi_integrand(zf: ZForm, s: float):
    def f(phi):
        t = 0.5 * (zf.r0 + zf.r1) + 0.5 * (zf.r1 - zf.r0) * np.sin(phi)
        return s / np.sqrt(zf.psi(t))
    return f


def _cumulative_gl(f, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Cumulative integral of f over [-pi/2, pi/2] on m panels (10-pt GL)."""
    phis = np.linspace(-np.pi / 2.0, np.pi / 2.0, m + 1)
    mid = 0.5 * (phis[:-1] + phis[1:])
    half = 0.5 * (phis[1] - phis[0])
    nodes = mid[:, None] + half * _GL_NODES[None, :]
    vals = f(nodes.ravel()).reshape(nodes.shape)
    seg = (vals * _GL_WEIGHTS[None, :]).sum(axis=1) * half
    return phis, np.concatenate([[0.0], np.cumsum(seg)])


def half_length(spec: FamilySpec) -> float:
    """Half of the total profile length integral dH / sqrt(z(H)).

    Adaptive in the sense of panel doubling to a 1e-13 relative increment;
    the integrand is smooth after the sin substitution, so convergence is
    immediate. Raises DivergenceError when a boundary root is not simple.
    """
    zf = ZForm(spec)
    zf.check_positive_inside()
    zf.check_simple_roots()
    f = _phi_integrand(zf, spec.s)
    prev = None
    m = 256
    while m <= 16384:
        _, Phi = _cumulative_gl(f, m)
        L = Phi[-1]
        if prev is not None and abs(L - prev) <= 1e-13 * max(1.0, abs(L)):
            return float(0.5 * L)
        prev = L
        m *= 2
    return float(0.5 * prev)


def synthesize_profile(spec: FamilySpec, n: int = 2048) -> ProfileGrid:
    """Sample the profile on n+1 uniform t-nodes across [-L/2, L/2].

    t(H) is accumulated by composite Gauss-Legendre quadrature of the
    de-singularized integrand and inverted with a monotone cubic (PCHIP)
    fit of phi against arc length; endpoint values use the analytic limits
    (F' = z'/2 at the roots) rather than one-sided differences.
    """
    if n < 16:
        raise ValueError(f"need n >= 16 samples, got {n}")
    zf = ZForm(spec)
    zf.check_positive_inside()
    zf.check_simple_roots()
    s = spec.s
    r0, r1 = zf.r0, zf.r1
    m = 0.5 * (r0 + r1)
    R = 0.5 * (r1 - r0)

    integrand = _phi_integrand(zf, s)
    phis, Phi = _cumulative_gl(integrand, max(4096, 4 * n))
    if not np.all(np.diff(Phi) > 0.0):
        raise InversionError("arc-length map is not strictly increasing")
    L = Phi[-1]
    inv = PchipInterpolator(Phi, phis)
    t = np.linspace(-L / 2.0, L / 2.0, n + 1)
    target = np.clip(t + L / 2.0, 0.0, L)
    phi_t = np.asarray(inv(target))
    # Newton-polish the inversion: the monotone cubic leaves per-panel
    # wiggle whose high derivatives would leak into the FD oracle
    for _ in range(2):
        j = np.clip(np.searchsorted(phis, phi_t) - 1, 0, len(phis) - 2)
        mid = 0.5 * (phis[j] + phi_t)
        half = 0.5 * (phi_t - phis[j])
        nodes = mid[:, None] + half[:, None] * _GL_NODES[None, :]
        partial = (integrand(nodes.ravel()).reshape(nodes.shape)
                   * _GL_WEIGHTS[None, :]).sum(axis=1) * half
        resid = Phi[j] + partial - target
        phi_t = np.clip(phi_t - resid / integrand(phi_t),
                        -np.pi / 2.0, np.pi / 2.0)
    phi_t[0], phi_t[-1] = -np.pi / 2.0, np.pi / 2.0

    # stable distances to the roots: t_var - r0 and r1 - t_var
    ang = np.pi / 4.0 - phi_t / 2.0
    u0 = 2.0 * R * np.cos(ang) ** 2
    u1 = 2.0 * R * np.sin(ang) ** 2
    u0[0], u1[0] = 0.0, r1 - r0
    u0[-1], u1[-1] = r1 - r0, 0.0
    tv = r0 + u0  # t-variable samples

    z = zf.z0_from(tv, u0, u1)
    z[0] = z[-1] = 0.0
    zp = zf.dz0_from(tv, u0, u1)
    zpp = zf.ddz0_from(tv, u0, u1)

    H = s * tv
    H[0], H[-1] = s * r0, s * r1
    F = np.sqrt(np.maximum(z, 0.0))
    dF = 0.5 * zp / s
    ddF = 0.5 * (zpp / (s * s)) * F

    # G^2 = |s^2 - H^2| = s^2 |1 - tv^2|, with the factor containing a
    # boundary root taken from the stable distances
    if abs(r1 - 1.0) < 1e-13:
        g2 = s * s * u1 * (1.0 + tv)
    elif abs(r0 - 1.0) < 1e-13:
        g2 = s * s * u0 * (1.0 + tv)
    elif abs(r0 + 1.0) < 1e-13:
        g2 = s * s * u0 * (1.0 - tv)
    elif abs(r1 + 1.0) < 1e-13:
        g2 = s * s * u1 * (1.0 - tv)
    else:
        g2 = s * s * np.abs(1.0 - tv * tv)
    G = np.sqrt(g2)

    A = spec.A
    # G G' = A H F, hence G'' = (A (F^2 + H F') - G'^2) / G
    with np.errstate(divide="ignore", invalid="ignore"):
        dG = A * H * F / G
        ddG = (A * (F * F + H * dF) - dG * dG) / G
    for idx in (0, n):
        if G[idx] > 0.0:
            dG[idx] = 0.0  # F = 0 there
            ddG[idx] = A * H[idx] * dF[idx] / G[idx]
        else:
            # collapsed point: G'^2 = A H F' in the limit, sign fixed by
            # G > 0 inside
            mag = math.sqrt(abs(H[idx] * dF[idx]))
            dG[idx] = mag if idx == 0 else -mag
            ddG[idx] = _extrapolate_to_end(t, ddG, idx)

    if not (np.all(F[1:-1] > 0.0) and np.all(G[1:-1] > 0.0)):
        raise PositivityError("profile radii are not positive inside (a, b)")
    if not np.all(np.diff(H) > 0.0):
        raise InversionError("H is not strictly increasing on the grid")

    arrays = dict(t=t, H=H, F=F, G=G, dF=dF, ddF=ddF, dG=dG, ddG=ddG,
                  u0=u0, u1=u1)
    for arr in arrays.values():
        arr.setflags(write=False)
    return ProfileGrid(spec=spec, a=float(t[0]), b=float(t[-1]), **arrays)


def _extrapolate_to_end(t, y, idx: int) -> float:
    """4-point Lagrange extrapolation of y to the endpoint t[idx] from the
    nearest interior nodes."""
    sel = slice(1, 5) if idx == 0 else slice(-5, -1)
    ts, ys = t[sel], y[sel]
    target = t[idx]
    val = 0.0
    for i in range(4):
        w = 1.0
        for j in range(4):
            if j != i:
                w *= (target - ts[j]) / (ts[i] - ts[j])
        val += w * ys[i]
    return val


@dataclass(frozen=True)
class BoundaryReport:
    case_tag: str
    residuals: dict
    passed: bool
    tolerance: float
    point_end: str | None = None


def boundary_report(grid: ProfileGrid, tolerance: float = 1e-6) -> BoundaryReport:
    """Check the smooth-closure endpoint conditions of the profile.

    two_sphere_ends (genus families): F vanishes at both ends with slopes
    +1/-1 and G stays positive with zero slope; for genus families G at the
    ends is additionally compared with s sqrt(1 - x^2).

    cp2_ends: one end collapses a circle (as above), the other collapses to
    a point where F and G vanish together with |slope| 1; the point end is
    b on the eps = +1 branch and a on the eps = -1 branch, and the slope of
    G there equals -eps in both orientations.
    """
    spec = grid.spec
    res = {
        "F_a": abs(float(grid.F[0])),
        "F_b": abs(float(grid.F[-1])),
        "dF_a_minus_1": abs(float(grid.dF[0]) - 1.0),
        "dF_b_plus_1": abs(float(grid.dF[-1]) + 1.0),
    }
    point_end = grid.point_end
    if spec.case_tag == "cp2_family" or point_end is not None:
        case = "cp2_ends"
        pe = 0 if point_end == "a" else -1
        ce = -1 if point_end == "a" else 0
        res["dG_cp1_end"] = abs(float(grid.dG[ce]))
        res["G_point_end"] = abs(float(grid.G[pe]))
        res["dG_point_end_plus_eps"] = abs(float(grid.dG[pe]) + spec.eps)
        nonzero = float(grid.G[ce])
    else:
        case = "two_sphere_ends"
        res["dG_a"] = abs(float(grid.dG[0]))
        res["dG_b"] = abs(float(grid.dG[-1]))
        if spec.case_tag == "genus_family":
            target = spec.s * math.sqrt(1.0 - spec.x * spec.x)
            res["G_a_minus_target"] = abs(float(grid.G[0]) - target)
            res["G_b_minus_target"] = abs(float(grid.G[-1]) - target)
        nonzero = min(float(grid.G[0]), float(grid.G[-1]))
    passed = all(v <= tolerance for v in res.values()) and nonzero > tolerance
    return BoundaryReport(case_tag=case, residuals=res, passed=passed,
                          tolerance=tolerance, point_end=point_end)


def endpoint_slopes(spec: FamilySpec) -> tuple[float, float]:
    """Exact F' at (a, b) from z' at the boundary roots: F' = z0'(r)/(2s)."""
    lo, hi = z_root_slopes(spec)
    return lo / (2.0 * spec.s), hi / (2.0 * spec.s)
