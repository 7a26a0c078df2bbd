"""Real univariate polynomials with certified root isolation.

Coefficients are stored in ascending degree. All polynomials appearing in
the metric families have degree <= 6, so root isolation works by recursive
monotone segmentation: the critical points of p (roots of p') split
[lo, hi] into intervals on which p is monotone, each holding at most one
sign-change root. Even-multiplicity roots show up as critical points where
p itself vanishes. Sign queries near a root fall back to exact rational
evaluation (floats are exact rationals), so bracketing decisions are never
corrupted by cancellation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import GraymetError

_EPS = 2.0 ** -52


@dataclass(frozen=True)
class Polynomial:
    """Real polynomial; ``coefficients[i]`` multiplies ``t**i``."""

    coefficients: tuple[float, ...]

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coefficients)
        while coeffs and coeffs[-1] == 0.0:
            coeffs = coeffs[:-1]
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coefficients) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coefficients

    def __call__(self, t: float) -> float:
        return eval_poly(self, t)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        a, b = self.coefficients, other.coefficients
        if len(a) < len(b):
            a, b = b, a
        return Polynomial(tuple(c + (b[i] if i < len(b) else 0.0) for i, c in enumerate(a)))

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-1.0) * other

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            if self.is_zero or other.is_zero:
                return Polynomial(())
            a, b = self.coefficients, other.coefficients
            out = [0.0] * (len(a) + len(b) - 1)
            for i, ca in enumerate(a):
                for j, cb in enumerate(b):
                    out[i + j] += ca * cb
            return Polynomial(tuple(out))
        return Polynomial(tuple(float(other) * c for c in self.coefficients))

    __rmul__ = __mul__

    @staticmethod
    def from_roots(roots, scale: float = 1.0) -> "Polynomial":
        p = Polynomial((float(scale),))
        for r in roots:
            p = p * Polynomial((-float(r), 1.0))
        return p


def eval_poly(p: Polynomial, t: float) -> float:
    """Horner evaluation of p at t."""
    acc = 0.0
    for c in reversed(p.coefficients):
        acc = acc * t + c
    return acc


def derivative(p: Polynomial) -> Polynomial:
    """Coefficient-wise formal derivative."""
    c = p.coefficients
    return Polynomial(tuple(i * c[i] for i in range(1, len(c))))


def _eval_with_bound(p: Polynomial, t: float) -> tuple[float, float]:
    """Horner value and a running bound on its absolute rounding error."""
    acc = 0.0
    mag = 0.0
    at = abs(t)
    for c in reversed(p.coefficients):
        acc = acc * t + c
        mag = mag * at + abs(c)
    n = max(len(p.coefficients) - 1, 1)
    return acc, 2.0 * n * _EPS * mag


def sign_at(p: Polynomial, t: float) -> int:
    """Exact sign of p(t): float Horner, rational fallback when ambiguous."""
    val, bound = _eval_with_bound(p, t)
    if abs(val) > bound:
        return 1 if val > 0.0 else -1
    acc = Fraction(0)
    ft = Fraction(t)
    for c in reversed(p.coefficients):
        acc = acc * ft + Fraction(c)
    if acc > 0:
        return 1
    if acc < 0:
        return -1
    return 0


def _refine_bracket(p: Polynomial, lo: float, hi: float, s_lo: int, tol: float) -> float:
    """Shrink a sign-change bracket to width <= tol; Newton inside, bisection
    as the safeguard. Returns the bracket midpoint."""
    dp = derivative(p)
    x = 0.5 * (lo + hi)
    for _ in range(200):
        if hi - lo <= tol:
            break
        moved = False
        d = eval_poly(dp, x)
        if d != 0.0:
            step = eval_poly(p, x) / d
            cand = x - step
            if lo < cand < hi:
                sc = sign_at(p, cand)
                if sc == 0:
                    lo = hi = cand
                    break
                if sc == s_lo:
                    lo = cand
                else:
                    hi = cand
                moved = True
        mid = 0.5 * (lo + hi)
        sm = sign_at(p, mid)
        if sm == 0:
            lo = hi = mid
            break
        if sm == s_lo:
            lo = mid
        else:
            hi = mid
        x = 0.5 * (lo + hi)
        if not moved and hi - lo <= tol:
            break
    return 0.5 * (lo + hi)


def real_roots(p: Polynomial, lo: float, hi: float, tol: float = 1e-12) -> list[float]:
    """All real roots of p in [lo, hi], sorted ascending.

    Even-multiplicity roots are caught at critical points of p where the
    exact sign of p is zero (derivative sign analysis supplies the
    candidates). Raises GraymetError for the zero polynomial.
    """
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    if not tol > 0.0:
        raise ValueError("tol must be positive")
    if p.is_zero:
        raise GraymetError("polynomial is identically zero on the interval")
    if p.degree == 0:
        return []
    if p.degree == 1:
        c0, c1 = p.coefficients
        r = -c0 / c1
        return [r] if lo <= r <= hi else []

    crit = [c for c in real_roots(derivative(p), lo, hi, tol) if lo < c < hi]
    breaks = sorted({lo, hi, *crit})

    roots: list[float] = []

    def push(r: float) -> None:
        if not roots or abs(r - roots[-1]) > max(tol, 1e-14 * max(1.0, abs(r))):
            roots.append(r)

    signs = [sign_at(p, b) for b in breaks]
    for b, s in zip(breaks, signs):
        if s == 0:
            push(b)
    for i in range(len(breaks) - 1):
        a, b = breaks[i], breaks[i + 1]
        sa, sb = signs[i], signs[i + 1]
        if sa == 0 or sb == 0 or sa == sb:
            continue
        push(_refine_bracket(p, a, b, sa, tol))
    return sorted(roots)


@dataclass(frozen=True)
class PositivityCertificate:
    positive: bool
    witness: float | None


def certify_positive(p: Polynomial, lo: float, hi: float) -> PositivityCertificate:
    """Decide whether p > 0 on the open interval (lo, hi).

    On failure returns a witness point with p(witness) <= 0. The verdict
    comes from the exact signs of p at the interval ends and at every
    interior critical point, which together bound the minimum of p.
    """
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    mid = 0.5 * (lo + hi)
    if p.is_zero:
        return PositivityCertificate(False, mid)
    if p.degree == 0:
        ok = p.coefficients[0] > 0.0
        return PositivityCertificate(ok, None if ok else mid)

    for c in real_roots(derivative(p), lo, hi):
        if lo < c < hi and sign_at(p, c) <= 0:
            return PositivityCertificate(False, c)

    for end, toward in ((lo, hi), (hi, lo)):
        if sign_at(p, end) < 0:
            # p continuous: negative at the end means negative slightly
            # inside, unless the "negative" value is a boundary root
            # displaced by coefficient rounding; probes stay above that
            # scale, so such roots do not falsify the certificate
            step = 0.5 * (toward - end)
            floor = 1e-13 * max(1.0, abs(end))
            witness = None
            while abs(step) > floor:
                probe = end + step
                if probe != end and sign_at(p, probe) < 0:
                    witness = probe
                    break
                step *= 0.5
            if witness is not None:
                return PositivityCertificate(False, witness)

    if sign_at(p, mid) <= 0:
        return PositivityCertificate(False, mid)
    return PositivityCertificate(True, None)


def deflate(p: Polynomial, root: float) -> tuple[Polynomial, float]:
    """Synthetic division of p by (t - root): quotient and remainder."""
    c = p.coefficients
    if len(c) <= 1:
        return Polynomial(()), (c[0] if c else 0.0)
    q = [0.0] * (len(c) - 1)
    acc = c[-1]
    for i in range(len(c) - 2, -1, -1):
        q[i] = acc
        acc = c[i] + root * acc
    return Polynomial(tuple(q)), acc


def scale_argument(p: Polynomial, a: float) -> Polynomial:
    """Polynomial q with q(t) = p(a*t)."""
    return Polynomial(tuple(c * a**i for i, c in enumerate(p.coefficients)))


def poly_bound(p: Polynomial, lo: float, hi: float) -> float:
    """Crude magnitude scale of p on [lo, hi] (for error thresholds)."""
    m = max(abs(lo), abs(hi), 1.0)
    return max(sum(abs(c) * m**i for i, c in enumerate(p.coefficients)), 1.0)
