import numpy as np
import pytest

from graymet.errors import GraymetError
from graymet.families import S_POLY, TORUS_FACTOR
from graymet.poly import (Polynomial, certify_positive, derivative, eval_poly,
                          real_roots, sign_at)

# frozen from 30-digit root isolation of S during development
ETA_REF = -0.8245146224751468


class TestEval:
    def test_horner_quadratic(self):
        assert eval_poly(Polynomial((-1.0, 0.0, 1.0)), 2.0) == 3.0

    def test_zero_polynomial(self):
        z = Polynomial(())
        assert z.is_zero
        assert eval_poly(z, 17.3) == 0.0

    def test_s_nearly_vanishes_at_published_eta(self):
        # the 4-decimal value of eta published for this family
        assert abs(eval_poly(S_POLY, -0.8245)) < 2e-3

    def test_trailing_zero_stripping(self):
        p = Polynomial((1.0, 2.0, 0.0, 0.0))
        assert p.degree == 1
        assert p.coefficients == (1.0, 2.0)


class TestDerivative:
    def test_constant(self):
        assert derivative(Polynomial((5.0,))).is_zero

    def test_cubic_power(self):
        assert derivative(Polynomial((0.0, 0.0, 0.0, 1.0))).coefficients == (0.0, 0.0, 3.0)

    def test_s_poly(self):
        assert derivative(S_POLY).coefficients == (75.0, 10.0, 3.0)

    def test_finite_difference_consistency(self, rng):
        h = 1e-5
        for _ in range(50):
            deg = int(rng.integers(1, 7))
            p = Polynomial(tuple(rng.uniform(-2, 2, deg + 1)))
            dp = derivative(p)
            t = float(rng.uniform(-2, 2))
            fd = (eval_poly(p, t + h) - eval_poly(p, t - h)) / (2 * h)
            scale = max(1.0, abs(eval_poly(dp, t)))
            assert abs(fd - eval_poly(dp, t)) < 1e-7 * scale


class TestRealRoots:
    def test_eta_isolated(self):
        roots = real_roots(S_POLY, -2.0, 0.0, tol=1e-9)
        assert len(roots) == 1
        assert abs(roots[0] - (-0.8245)) < 5e-5
        assert abs(roots[0] - ETA_REF) < 1e-9

    def test_simple_quadratic(self):
        roots = real_roots(Polynomial((-0.25, 0.0, 1.0)), 0.0, 1.0)
        assert len(roots) == 1
        assert abs(roots[0] - 0.5) < 1e-12

    def test_no_real_roots(self):
        assert real_roots(Polynomial((1.0, 0.0, 1.0)), -10.0, 10.0) == []

    def test_zero_polynomial_rejected(self):
        with pytest.raises(GraymetError):
            real_roots(Polynomial(()), -1.0, 1.0)

    def test_bad_interval_rejected(self):
        with pytest.raises(ValueError):
            real_roots(S_POLY, 1.0, -1.0)

    def test_torus_factor_has_no_root_above_one(self):
        assert real_roots(TORUS_FACTOR, 1.0 + 1e-9, 100.0) == []

    def test_even_multiplicity_root_found(self):
        # (t - 0.3)^2 (t^2 + 1)
        p = Polynomial.from_roots([0.3, 0.3]) * Polynomial((1.0, 0.0, 1.0))
        roots = real_roots(p, -1.0, 1.0)
        assert len(roots) == 1
        assert abs(roots[0] - 0.3) < 1e-6

    def test_planted_roots_recovered(self, rng):
        tol = 1e-12
        for _ in range(300):
            k = int(rng.integers(1, 5))
            planted = np.sort(rng.uniform(-0.95, 0.95, k))
            # keep roots separated so brackets cannot merge
            if k > 1 and np.min(np.diff(planted)) < 1e-3:
                continue
            scale = float(rng.uniform(0.5, 3.0)) * (1 if rng.random() < 0.5 else -1)
            p = Polynomial.from_roots(planted, scale)
            if rng.random() < 0.5:
                p = p * Polynomial((float(rng.uniform(0.5, 2.0)), 0.0, 1.0))
            found = real_roots(p, -1.0, 1.0, tol=tol)
            assert len(found) == k
            for r, f in zip(planted, found):
                assert abs(r - f) < 1e-9

    def test_endpoint_root_included(self):
        p = Polynomial.from_roots([0.0, 0.7])
        roots = real_roots(p, 0.0, 0.5)
        assert len(roots) == 1 and abs(roots[0]) < 1e-12


class TestSignAt:
    def test_exact_sign_near_cancellation(self):
        # expanded (a+1)(a-1)^3(2a^2+a+2) at 1 + 1e-9: true value ~1e-26,
        # far below double rounding noise; rational fallback must get it
        assert sign_at(TORUS_FACTOR, 1.0 + 1e-9) == 1
        assert sign_at(TORUS_FACTOR, 1.0 - 1e-9) == -1
        assert sign_at(TORUS_FACTOR, 1.0) == 0


class TestCertifyPositive:
    def test_square_touches_zero(self):
        cert = certify_positive(Polynomial((0.0, 0.0, 1.0)), -1.0, 1.0)
        assert not cert.positive
        assert abs(cert.witness) < 1e-9

    def test_positive_quadratic(self):
        assert certify_positive(Polynomial((1.0, 0.0, 1.0)), -5.0, 5.0).positive

    def test_open_interval_ignores_endpoint_zeros(self):
        # (t^2 - 1) is negative inside; (1 - t^2) is positive inside
        up = Polynomial((1.0, 0.0, -1.0))
        assert certify_positive(up, -1.0, 1.0).positive
        down = Polynomial((-1.0, 0.0, 1.0))
        cert = certify_positive(down, -1.0, 1.0)
        assert not cert.positive
        assert eval_poly(down, cert.witness) <= 0.0

    def test_agrees_with_dense_minimum(self, rng):
        grid = np.linspace(0.0, 1.0, 2001)[1:-1]
        for _ in range(1000):
            deg = int(rng.integers(1, 7))
            p = Polynomial(tuple(rng.uniform(-1, 1, deg + 1)))
            if p.is_zero:
                continue
            vals = np.array([eval_poly(p, t) for t in grid])
            cert = certify_positive(p, 0.0, 1.0)
            if cert.positive:
                # no false positives beyond rounding scale
                assert vals.min() > -1e-12 * max(1.0, np.abs(vals).max())
            else:
                assert 0.0 <= cert.witness <= 1.0
                assert eval_poly(p, cert.witness) <= 0.0

    def test_dense_positive_implies_certified(self, rng):
        grid = np.linspace(0.0, 1.0, 2001)
        hits = 0
        for _ in range(400):
            deg = int(rng.integers(1, 7))
            p = Polynomial(tuple(rng.uniform(-1, 1, deg + 1)))
            if p.is_zero:
                continue
            vals = np.array([eval_poly(p, t) for t in grid])
            if vals.min() > 1e-6:
                hits += 1
                assert certify_positive(p, 0.0, 1.0).positive
        assert hits > 50


class TestArithmetic:
    def test_product_roots(self):
        p = Polynomial.from_roots([1.0, -2.0], 3.0)
        assert abs(eval_poly(p, 1.0)) < 1e-14
        assert abs(eval_poly(p, -2.0)) < 1e-14
        assert abs(eval_poly(p, 0.0) - 3.0 * (-1.0) * 2.0) < 1e-14

    def test_add_sub(self):
        a = Polynomial((1.0, 2.0))
        b = Polynomial((0.0, -2.0, 4.0))
        assert (a + b).coefficients == (1.0, 0.0, 4.0)
        assert (a - a).is_zero
