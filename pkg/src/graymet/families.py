"""Polynomial metric families on ruled surfaces and CP2.

The cohomogeneity-one ansatz dt^2 + F^2 theta^2 + G^2 p*g_can reduces to a
first-order ODE H' = sqrt(z(H)) for the momentum profile H, where

    z(h) = z0(h/s),    z0(t) = P(t) / (1 - t^2),

and P is the degree-6 polynomial

    P(t) = -4 e t^2 - (D/5) t^6 + (D - C/3) t^4 + (2C - 3D) t^2
           + E t - 4 e + C - D                                   (build_P)

in normalized coefficients (C, D, E absorb powers of s). A smooth closed
metric needs z to vanish simply at both ends of the profile interval with
slopes -+2s there; solving that tangency system at t = x yields coeffs_CD,
and the reflection-symmetric genus >= 1 solution admits the factored form
build_P_symmetric. The CP2 families close one end to a point instead,
which pins (C, D, E) completely as functions of the single parameter x.

Sign conventions: the ODE/curvature identities use e = sgn(K*A) ("ode_eps").
The CP2 construction labels its two branches by the OPPOSITE sign; this
module accepts the CP2-style label in cp2_family and stores both values,
since the two conventions coexist in the source material for these metrics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import ParameterRangeError, PositivityError, ProfileDomainError, SingularDenominatorError
from .poly import Polynomial, certify_positive, deflate, derivative, eval_poly, real_roots

#: S(x) = x^3 + 5 x^2 + 75 x + 59; its unique real root eta is the lower
#: edge of the admissible CP2 parameter range.
S_POLY = Polynomial((59.0, 75.0, 5.0, 1.0))

#: Expanded form of (a+1)(a-1)^3(2a^2+a+2); the torus-case obstruction.
TORUS_FACTOR = Polynomial((-2.0, 3.0, 0.0, 0.0, 0.0, -3.0, 2.0))


@lru_cache(maxsize=1)
def eta() -> float:
    """Unique real root of S_POLY, about -0.8245."""
    roots = real_roots(S_POLY, -1.0, 0.0, tol=1e-14)
    if len(roots) != 1:
        raise RuntimeError(f"expected one root of S in [-1, 0], got {roots}")
    return roots[0]


def q_cubic(x: float) -> Polynomial:
    """Q_x(t) = t^3 + (2+x) t^2 + (5+6x) t + 8 + 13x + 4x^2.

    Positive on (x, 1) exactly when x > eta; its discriminant is
    -16 (x+1)^2 S(x), so the double root appears exactly at x = eta.
    """
    return Polynomial((8.0 + 13.0 * x + 4.0 * x * x, 5.0 + 6.0 * x, 2.0 + x, 1.0))


@dataclass(frozen=True)
class FamilySpec:
    """Full parameter record of one constructed metric.

    x and y are the two boundary roots of z0 in normalized t-units
    (genus families: y = -x; CP2 families: y = 1). eps carries each
    family's own sign label; ode_eps = sgn(K*A) is the value entering
    build_P and the curvature identities (they differ for CP2).
    """

    genus: int
    k: int
    chi: int
    s: float
    K: float
    A: int
    eps: int
    ode_eps: int
    x: float
    y: float
    C: float
    D: float
    E: float
    P: Polynomial
    case_tag: str = "custom"

    @property
    def t_lo(self) -> float:
        return min(self.x, self.y)

    @property
    def t_hi(self) -> float:
        return max(self.x, self.y)


def coeffs_CD(x: float, E: float, s: float, eps: int) -> tuple[float, float]:
    """Solve the tangency system z0(x) = 0, z0'(x) = -2s for (C, D).

        D = 5(-3E - 6s - 24 e x + 3 E x^2 - 12 s x^2 - 8 e x^3 + 2 s x^4)
            / (2 (x-1) x (x+1) (15 + 10 x^2 - x^4))
        C = 3(5E + 10s + 80 e x + 30 s x^2 - 10 E x^2 + 5 E x^4 - 10 s x^4
            - 16 e x^5 + 2 s x^6) / (2 (x-1) x (x+1) (-15 - 10 x^2 + x^4))
    """
    den_core = 15.0 + 10.0 * x * x - x**4
    if x in (-1.0, 0.0, 1.0) or den_core == 0.0:
        raise SingularDenominatorError(f"coeffs_CD undefined at x={x}")
    d_num = 5.0 * (-3.0 * E - 6.0 * s - 24.0 * eps * x + 3.0 * E * x * x
                   - 12.0 * s * x * x - 8.0 * eps * x**3 + 2.0 * s * x**4)
    c_num = 3.0 * (5.0 * E + 10.0 * s + 80.0 * eps * x + 30.0 * s * x * x
                   - 10.0 * E * x * x + 5.0 * E * x**4 - 10.0 * s * x**4
                   - 16.0 * eps * x**5 + 2.0 * s * x**6)
    base = 2.0 * (x - 1.0) * x * (x + 1.0)
    D = d_num / (base * den_core)
    C = c_num / (base * -den_core)
    return C, D


def build_P(C: float, D: float, E: float, eps: int) -> Polynomial:
    """Degree-6 profile polynomial in normalized coefficients."""
    return Polynomial((
        C - D - 4.0 * eps,
        E,
        2.0 * C - 3.0 * D - 4.0 * eps,
        0.0,
        D - C / 3.0,
        0.0,
        -D / 5.0,
    ))


def build_P_symmetric(x: float, s: float, eps: int) -> Polynomial:
    """Factored reflection-symmetric form of the genus-family polynomial:

        P(t) = (t^2 - x^2) [ s(-15 + 10x^2 - 3x^4 + (10 + 12x^2 - 6x^4) t^2
               + (-3 - 6x^2 + x^4) t^4)
               + 4 e x (x^2(x^2 - 5) + (5 + 2x^2 + x^4) t^2 - (3 + x^2) t^4) ]
               / (x (15 - 5x^2 - 11x^4 + x^6))

    Expanded; agrees coefficient-wise with build_P over coeffs_CD at E = 0.
    """
    if not 0.0 < x < 1.0:
        raise ParameterRangeError(f"build_P_symmetric needs x in (0, 1), got {x}")
    den = x * (15.0 - 5.0 * x * x - 11.0 * x**4 + x**6)
    if den == 0.0:
        raise SingularDenominatorError(f"build_P_symmetric denominator vanishes at x={x}")
    x2 = x * x
    inner = Polynomial((
        s * (-15.0 + 10.0 * x2 - 3.0 * x2 * x2) + 4.0 * eps * x * x2 * (x2 - 5.0),
        0.0,
        s * (10.0 + 12.0 * x2 - 6.0 * x2 * x2) + 4.0 * eps * x * (5.0 + 2.0 * x2 + x2 * x2),
        0.0,
        s * (-3.0 - 6.0 * x2 + x2 * x2) - 4.0 * eps * x * (3.0 + x2),
    ))
    return (1.0 / den) * (Polynomial((-x2, 0.0, 1.0)) * inner)


def z_eval(P: Polynomial, s: float, h: float) -> float:
    """z(h) = P(h/s) / (1 - (h/s)^2); removable poles evaluated by limit."""
    t = h / s
    w = 1.0 - t * t
    if w == 0.0:
        if abs(eval_poly(P, t)) > 1e-9 * max(1.0, max(abs(c) for c in P.coefficients)):
            raise ProfileDomainError(f"z has a genuine pole at h={h} (P({t}) != 0)")
        # L'Hopital: z0(+-1) = -+ P'(+-1)/2
        return -math.copysign(1.0, t) * eval_poly(derivative(P), t) / 2.0
    return eval_poly(P, t) / w


def _z0_prime(P: Polynomial, t: float) -> float:
    w = 1.0 - t * t
    return (eval_poly(derivative(P), t) * w + 2.0 * t * eval_poly(P, t)) / (w * w)


def ode35_residual(spec: FamilySpec, h: float) -> float:
    """Defect of the profile ODE at h:

        z'(h) - z(h) (s^2 + h^2)/(h (s^2 - h^2))
            - [4 e + Du (s^2 - h^2)^2 - Cu (s^2 - h^2)] / h

    with Cu = C/s^2, Du = D/s^4 and e = ode_eps. z comes from spec.P while
    the right side uses spec.C/spec.D, so the residual detects a mismatch
    between the stored polynomial and the stored coefficients.
    """
    s = spec.s
    if h == 0.0 or abs(h) == s:
        raise ProfileDomainError(f"ode35_residual undefined at h={h} (s={s})")
    t = h / s
    z = z_eval(spec.P, s, h)
    zp = _z0_prime(spec.P, t) / s
    g2 = s * s - h * h
    lhs = zp - z * (s * s + h * h) / (h * g2)
    Cu = spec.C / s**2
    Du = spec.D / s**4
    rhs = (4.0 * spec.ode_eps + Du * g2 * g2 - Cu * g2) / h
    return lhs - rhs


def compatibility_residual(x: float, y: float, s: float, eps: int) -> float:
    """Two-sided tangency obstruction; zero is necessary for a solution:

        (x + y) [ -4 e (-5x + x^3 + 5y + 2x^2 y - 2x y^2 - y^3)
                  + s (5 + 2x^3 y + 2x y^3 + 3y^2 + 3x^2 + x^2 y^2 - 16xy) ]
    """
    e_part = -4.0 * eps * (-5.0 * x + x**3 + 5.0 * y + 2.0 * x * x * y
                           - 2.0 * x * y * y - y**3)
    s_part = s * (5.0 + 2.0 * x**3 * y + 2.0 * x * y**3 + 3.0 * y * y
                  + 3.0 * x * x + x * x * y * y - 16.0 * x * y)
    return (x + y) * (e_part + s_part)


def genus_family(genus: int, k: int, x: float) -> FamilySpec:
    """One-parameter family member on the ruled surface of given genus.

    genus >= 2: base curvature K = -4, s = 2k/|chi|, e = 1.
    genus == 1: flat base K = 0, s = k, e = 0.
    The profile polynomial is positive on (-x, x) for every x in (0, 1);
    a certification failure would contradict the classification and is
    raised as PositivityError.
    """
    if genus < 1:
        raise ParameterRangeError(
            "genus_family covers genus >= 1; genus 0 metrics on CP2 are "
            "built by cp2_family (other genus-0 bundles are out of scope)")
    if k < 1:
        raise ParameterRangeError(f"need bundle degree k >= 1, got {k}")
    if not 0.0 < x < 1.0:
        raise ParameterRangeError(f"need x in (0, 1), got {x}")
    chi = 2 - 2 * genus
    if genus == 1:
        s, K, A, eps = float(k), 0.0, -1, 0
    else:
        s, K, A, eps = 2.0 * k / abs(chi), -4.0, -1, 1
    P = build_P_symmetric(x, s, eps)
    cert = certify_positive(P, -x, x)
    if not cert.positive:
        raise PositivityError(
            f"profile polynomial not positive on (-{x}, {x}) at t={cert.witness}; "
            "this contradicts the genus >= 1 classification")
    C, D = coeffs_CD(x, 0.0, s, eps)
    return FamilySpec(genus=genus, k=k, chi=chi, s=s, K=K, A=A, eps=eps,
                      ode_eps=eps, x=x, y=-x, C=C, D=D, E=0.0, P=P,
                      case_tag="genus_family")


def cp2_family(x: float, eps: int) -> FamilySpec:
    """CP2 family member; admissible x in (eta, 1) for eps = 1 and
    (1, inf) for eps = -1 (eps is the CP2-branch label).

        D = -5 e / (4 + x - 4x^2 - x^3)
        C = 3 e (7 + 4x - x^2) / ((x - 1)(x + 1)(4 + x))
        E = -(8/15)(5C - 6D + 15 e)

    The resulting z vanishes at x and 1 with z'(x) = 2e, z'(1) = -2e and is
    positive strictly between its roots.
    """
    if eps not in (-1, 1):
        raise ParameterRangeError(f"cp2 branch label eps must be +-1, got {eps}")
    if eps == 1:
        if not eta() < x < 1.0:
            raise ParameterRangeError(
                f"eps=+1 branch needs x in (eta, 1) = ({eta():.6f}, 1), got {x}")
    else:
        if not x > 1.0:
            raise ParameterRangeError(f"eps=-1 branch needs x > 1, got {x}")
    den_d = 4.0 + x - 4.0 * x * x - x**3
    den_c = (x - 1.0) * (x + 1.0) * (4.0 + x)
    if den_d == 0.0 or den_c == 0.0:
        raise SingularDenominatorError(f"cp2 coefficient denominators vanish at x={x}")
    D = -5.0 * eps / den_d
    C = 3.0 * eps * (7.0 + 4.0 * x - x * x) / den_c
    E = -(8.0 / 15.0) * (5.0 * C - 6.0 * D + 15.0 * eps)
    ode_eps = -eps
    A = -eps
    P = build_P(C, D, E, ode_eps)

    lo, hi = (x, 1.0) if eps == 1 else (1.0, x)
    qx = q_cubic(x)
    cert = certify_positive(qx, lo, hi)
    if not cert.positive:
        raise PositivityError(
            f"Q_x fails positivity on ({lo}, {hi}) at t={cert.witness}; "
            f"x={x} sits at or below the eta boundary")
    # z = (t-x)(t-1)^2 c(t)/(1-t^2); certify the cofactor c, whose
    # structural roots are deflated away (the double root at 1 splits
    # under coefficient rounding and would confound a direct check of P)
    c1, r1 = deflate(P, x)
    c2, r2 = deflate(c1, 1.0)
    c3, r3 = deflate(c2, 1.0)
    scale = max(abs(c) for c in P.coefficients)
    if max(abs(r1), abs(r2), abs(r3)) > 1e-9 * scale:
        raise PositivityError(f"profile polynomial does not factor at its roots (x={x})")
    zcert = certify_positive(c3, lo, hi)
    if not zcert.positive:
        raise PositivityError(f"z not positive on ({lo}, {hi}) at t={zcert.witness}")
    return FamilySpec(genus=0, k=1, chi=2, s=1.0, K=4.0, A=A, eps=eps,
                      ode_eps=ode_eps, x=x, y=1.0, C=C, D=D, E=E, P=P,
                      case_tag="cp2_family")


def theorem3_x_of_alpha_displayed(alpha):
    """Closed form for the would-be root x with y = alpha x, as displayed in
    the source classification: -4(a-1)(a^2+3a+1) / (a(a^2+a+2))."""
    a = np.asarray(alpha, dtype=float)
    return -4.0 * (a - 1.0) * (a * a + 3.0 * a + 1.0) / (a * (a * a + a + 2.0))


def theorem3_x_of_alpha_derived(alpha):
    """Same quantity re-derived from the boundary system itself:
    -4(a-1)(a^2+3a+1) / (a(2a^2+a+2)). The displayed denominator drops the
    factor 2; both versions are negative for every a > 1."""
    a = np.asarray(alpha, dtype=float)
    return -4.0 * (a - 1.0) * (a * a + 3.0 * a + 1.0) / (a * (2.0 * a * a + a + 2.0))


@dataclass(frozen=True)
class NonexistenceReport:
    case_tag: str
    grid: dict
    worst_residual: float
    found_solution: bool
    detail: dict = field(repr=False)


def trivial_ruled_nonexistence(case: str, n_alpha: int = 100_000,
                               alpha_max: float = 100.0) -> NonexistenceReport:
    """Scan for two-sided solutions on trivial ruled surfaces CP1 x Sigma.

    genus_gt1: any solution with y = alpha x would need
    x = x(alpha) < 0 for every alpha > 1, contradicting 0 < x < y. Both the
    displayed closed form and the first-principles one are evaluated.

    torus: the matching condition reduces to
    (a+1)(a-1)^3(2a^2+a+2) = 0 with a > 1, which has no roots (the
    quadratic factor has negative discriminant).
    """
    alphas = np.linspace(1.0, alpha_max, n_alpha + 1)[1:]
    grid = {"alpha_min": float(alphas[0]), "alpha_max": float(alphas[-1]),
            "n_points": int(n_alpha)}
    if case == "genus_gt1_product":
        x_disp = theorem3_x_of_alpha_displayed(alphas)
        x_der = theorem3_x_of_alpha_derived(alphas)
        worst = float(max(x_disp.max(), x_der.max()))
        found = bool(worst >= 0.0)
        detail = {
            "alphas": alphas,
            "x_displayed": x_disp,
            "x_derived": x_der,
            "max_x_displayed": float(x_disp.max()),
            "argmax_alpha_displayed": float(alphas[int(np.argmax(x_disp))]),
            "max_x_derived": float(x_der.max()),
            "n_admissible": int(np.count_nonzero((x_disp > 0) | (x_der > 0))),
            "note": "derived form uses denominator a(2a^2+a+2)",
        }
        return NonexistenceReport("genus_gt1_product", grid, worst, found, detail)
    if case == "torus_product":
        roots = real_roots(TORUS_FACTOR, 1.0 + 1e-9, alpha_max, tol=1e-12)
        quad_roots = real_roots(Polynomial((2.0, 1.0, 2.0)), -alpha_max, alpha_max)
        # first-principles redundancy: (a+1)^2 (2a^2+a+2) > 0 on the grid
        derived = (alphas + 1.0) ** 2 * (2.0 * alphas**2 + alphas + 2.0)
        # margin to solvability: the obstruction factor would have to vanish
        worst = float(-derived.min())
        found = bool(roots) or bool(quad_roots) or bool((derived <= 0).any())
        detail = {
            "factor_roots_above_1": roots,
            "quadratic_factor_roots": quad_roots,
            "quadratic_discriminant": 1.0 - 16.0,
            "derived_factor_min": float(derived.min()),
        }
        return NonexistenceReport("torus_product", grid, worst, found, detail)
    raise ValueError(f"unknown case {case!r}")


def z_root_slopes(spec: FamilySpec) -> tuple[float, float]:
    """(z0'(t_lo), z0'(t_hi)) with removable factors cancelled exactly.

    At a root r of z0 = P/(1-t^2), z0'(r) = P'(r)/(1 - r^2); if r = +-1 the
    root of P is double and z0'(r) = -+ R(r)/2 for P = (t - r)^2 R.
    """
    out = []
    for r in (spec.t_lo, spec.t_hi):
        if abs(abs(r) - 1.0) < 1e-13:
            q1, _ = deflate(spec.P, r)
            q2, _ = deflate(q1, r)
            out.append(-math.copysign(1.0, r) * eval_poly(q2, r) / 2.0)
        else:
            out.append(eval_poly(derivative(spec.P), r) / (1.0 - r * r))
    return out[0], out[1]
