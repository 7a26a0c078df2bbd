import dataclasses
import math

import numpy as np
import pytest

from graymet.errors import ParameterRangeError, ProfileDomainError, SingularDenominatorError
from graymet.families import (NonexistenceReport, S_POLY, TORUS_FACTOR, build_P,
                              build_P_symmetric, coeffs_CD, compatibility_residual,
                              cp2_family, eta, genus_family, ode35_residual,
                              q_cubic, theorem3_x_of_alpha_derived,
                              theorem3_x_of_alpha_displayed,
                              trivial_ruled_nonexistence, z_eval, z_root_slopes)
from graymet.poly import Polynomial, certify_positive, derivative, eval_poly, real_roots

# exact rationals of the tangency solve at (x, E, s, e) = (1/2, 0, 1, 1)
C_HALF = 3610.0 / 279.0
D_HALF = 7000.0 / 837.0


class TestCoeffsCD:
    def test_reference_point(self):
        C, D = coeffs_CD(0.5, 0.0, 1.0, 1)
        assert abs(C - C_HALF) < 1e-12
        assert abs(D - D_HALF) < 1e-12
        # and the 3-decimal values quoted for this family
        assert round(C, 3) == 12.939
        assert round(D, 3) == 8.363

    def test_tangency_system_satisfied(self, rng):
        for _ in range(100):
            x = float(rng.uniform(0.05, 0.95))
            E = float(rng.uniform(-2, 2))
            s = float(rng.uniform(0.5, 3))
            eps = int(rng.integers(0, 2))
            C, D = coeffs_CD(x, E, s, eps)
            P = build_P(C, D, E, eps)
            assert abs(eval_poly(P, x)) < 1e-10
            slope = eval_poly(derivative(P), x)
            assert abs(slope + 2.0 * s * (1.0 - x * x)) < 1e-9

    def test_reflection_invariance(self, rng):
        # the verified symmetry is (x, s) -> (-x, -s); x -> -x alone solves
        # the mirrored slope condition and yields different coefficients
        for _ in range(100):
            x = float(rng.uniform(0.05, 0.95))
            s = float(rng.uniform(0.5, 3))
            eps = int(rng.integers(0, 2))
            assert coeffs_CD(-x, 0.0, -s, eps) == pytest.approx(
                coeffs_CD(x, 0.0, s, eps), abs=1e-12)
        C_plus, D_plus = coeffs_CD(0.5, 0.0, 1.0, 1)
        C_minus, D_minus = coeffs_CD(-0.5, 0.0, 1.0, 1)
        assert abs(D_plus - D_minus) > 1.0

    def test_singular_inputs_rejected(self):
        for bad in (0.0, 1.0, -1.0):
            with pytest.raises(SingularDenominatorError):
                coeffs_CD(bad, 0.0, 1.0, 1)


class TestBuildP:
    def test_eps_only(self):
        assert build_P(0.0, 0.0, 0.0, 1).coefficients == (-4.0, 0.0, -4.0)

    def test_c_only(self):
        assert build_P(3.0, 0.0, 0.0, 0).coefficients == (3.0, 0.0, 6.0, 0.0, -1.0)

    def test_constructed_root(self):
        C, D = coeffs_CD(0.5, 0.0, 1.0, 1)
        assert abs(eval_poly(build_P(C, D, 0.0, 1), 0.5)) < 1e-12


class TestBuildPSymmetric:
    @pytest.mark.parametrize("x", [0.2, 0.5, 0.8])
    @pytest.mark.parametrize("s", [1.0, 2.0])
    @pytest.mark.parametrize("eps", [0, 1])
    def test_matches_tangency_route(self, x, s, eps):
        sym = build_P_symmetric(x, s, eps)
        C, D = coeffs_CD(x, 0.0, s, eps)
        direct = build_P(C, D, 0.0, eps)
        a = np.zeros(7)
        b = np.zeros(7)
        a[:len(sym.coefficients)] = sym.coefficients
        b[:len(direct.coefficients)] = direct.coefficients
        assert np.abs(a - b).max() < 1e-10

    def test_roots_at_plus_minus_x(self):
        P = build_P_symmetric(0.37, 1.5, 1)
        assert abs(eval_poly(P, 0.37)) < 1e-12
        assert abs(eval_poly(P, -0.37)) < 1e-12

    def test_value_at_zero_closed_form(self):
        # displayed closed form of P(0); it carries the eps = 1 sign
        for x, s, eps in ((0.5, 1.0, 1), (0.3, 2.0, 1), (0.7, 1.0, 0)):
            P = build_P_symmetric(x, s, eps)
            den = 15.0 - 5.0 * x**2 - 11.0 * x**4 + x**6
            displayed = (-4.0 * x**4 * (x * x - 5.0)
                         + s * x * (15.0 - 10.0 * x**2 + 3.0 * x**4)) / den
            gap = 4.0 * x**4 * (5.0 - x * x) * (eps - 1) / den
            assert eval_poly(P, 0.0) == pytest.approx(displayed + gap, abs=1e-12)


class TestZEval:
    def test_value_at_zero_is_constant_coefficient(self):
        P = build_P(1.0, 2.0, 3.0, 1)
        assert z_eval(P, 2.0, 0.0) == eval_poly(P, 0.0)

    def test_scaling_identity(self, rng):
        P = build_P(1.0, -1.0, 0.5, 0)
        s = 2.0
        for _ in range(20):
            t = float(rng.uniform(-0.9, 0.9))
            expected = eval_poly(P, t) / (1.0 - t * t)
            assert z_eval(P, s, s * t) == pytest.approx(expected, rel=1e-14)

    def test_removable_pole(self):
        # (1 - t^2)^2 / (1 - t^2) -> 0 at t = 1
        P = Polynomial((1.0, 0.0, -2.0, 0.0, 1.0))
        assert z_eval(P, 1.0, 1.0) == pytest.approx(0.0, abs=1e-14)

    def test_genuine_pole_raises(self):
        with pytest.raises(ProfileDomainError):
            z_eval(build_P(1.0, 1.0, 1.0, 1), 1.0, 1.0)


class TestOde35Residual:
    def test_genus_family_solves_ode(self):
        spec = genus_family(2, 1, 0.5)
        for h in (0.1, 0.25, 0.4):
            assert abs(ode35_residual(spec, h)) < 1e-9

    def test_trivial_zero_solution(self):
        spec = genus_family(2, 1, 0.5)
        zero = dataclasses.replace(spec, C=0.0, D=0.0, E=0.0, ode_eps=0,
                                   P=Polynomial(()))
        assert ode35_residual(zero, 0.25) == 0.0

    def test_coefficient_mismatch_detected(self):
        spec = genus_family(2, 1, 0.5)
        bumped = dataclasses.replace(spec, C=spec.C + 0.1)
        assert abs(ode35_residual(bumped, 0.25)) > 1e-3

    def test_nonzero_E_behavior_reported(self):
        # E multiplies a homogeneous solution of the ODE, so the residual
        # stays tiny; recorded here without a tightness assertion
        C, D, E, eps = 1.3, -0.7, 2.0, 1
        spec = dataclasses.replace(genus_family(2, 1, 0.5), C=C, D=D, E=E,
                                   P=build_P(C, D, E, eps))
        r = ode35_residual(spec, 0.25)
        assert math.isfinite(r)

    def test_domain_errors(self):
        spec = genus_family(2, 1, 0.5)
        with pytest.raises(ProfileDomainError):
            ode35_residual(spec, 0.0)
        with pytest.raises(ProfileDomainError):
            ode35_residual(spec, spec.s)


class TestCompatibility:
    def test_antidiagonal_is_exact_zero(self, rng):
        for _ in range(50):
            x = float(rng.uniform(-5, 5))
            s = float(rng.uniform(-3, 3))
            assert compatibility_residual(x, -x, s, 1) == 0.0

    def test_reference_value(self):
        assert compatibility_residual(0.5, 0.2, 1.0, 0) == pytest.approx(
            0.7 * 4.338, abs=1e-12)

    def test_swap_symmetry_without_eps(self, rng):
        for _ in range(50):
            x, y = rng.uniform(-2, 2, 2)
            s = float(rng.uniform(0.5, 2))
            assert compatibility_residual(x, y, s, 0) == pytest.approx(
                compatibility_residual(y, x, s, 0), rel=1e-12, abs=1e-12)


class TestGenusFamily:
    def test_genus_two_reference(self):
        spec = genus_family(2, 1, 0.5)
        assert (spec.chi, spec.s, spec.K, spec.eps, spec.A) == (-2, 1.0, -4.0, 1, -1)
        assert spec.ode_eps == spec.eps
        assert spec.y == -spec.x
        assert certify_positive(spec.P, -0.5, 0.5).positive

    def test_genus_one_uses_k(self):
        spec = genus_family(1, 3, 0.5)
        assert (spec.s, spec.K, spec.eps) == (3.0, 0.0, 0)

    def test_boundary_root_conditions(self):
        for genus, k, x in ((1, 1, 0.3), (2, 1, 0.5), (2, 3, 0.8)):
            spec = genus_family(genus, k, x)
            assert abs(eval_poly(spec.P, x)) < 1e-10
            assert abs(eval_poly(spec.P, -x)) < 1e-10
            lo, hi = z_root_slopes(spec)
            assert abs(hi + 2.0 * spec.s) < 1e-9
            assert abs(lo - 2.0 * spec.s) < 1e-9
            assert compatibility_residual(spec.x, spec.y, spec.s, spec.eps) == 0.0

    def test_rejects_bad_inputs(self):
        with pytest.raises(ParameterRangeError):
            genus_family(0, 1, 0.5)
        with pytest.raises(ParameterRangeError):
            genus_family(2, 0, 0.5)
        with pytest.raises(ParameterRangeError):
            genus_family(2, 1, 1.0)


class TestCP2Family:
    def test_eta_value(self):
        assert abs(eta() - (-0.8245)) < 5e-5
        roots = real_roots(S_POLY, -1.0, 0.0, tol=1e-12)
        assert eta() == roots[0]

    def test_reference_member(self):
        spec = cp2_family(0.5, 1)
        assert (spec.k, spec.s, spec.K, spec.A, spec.ode_eps) == (1, 1.0, 4.0, -1, -1)
        den = (0.5 - 1.0) * 1.5 * 4.5
        assert spec.C == pytest.approx(3.0 * (7 + 2 - 0.25) / den, rel=1e-14)
        assert spec.D == pytest.approx(-5.0 / (4 + 0.5 - 1.0 - 0.125), rel=1e-14)
        assert spec.E == pytest.approx(-(8.0 / 15.0) * (5 * spec.C - 6 * spec.D + 15), rel=1e-14)

    @pytest.mark.parametrize("x,eps", [(0.0, 1), (0.5, 1), (0.9, 1),
                                       (1.5, -1), (3.0, -1)])
    def test_root_and_slope_structure(self, x, eps):
        spec = cp2_family(x, eps)
        assert abs(eval_poly(spec.P, x)) < 1e-10
        lo, hi = z_root_slopes(spec)
        slope_x, slope_1 = (lo, hi) if eps == 1 else (hi, lo)
        assert slope_x == pytest.approx(2.0 * eps, abs=1e-9)
        assert slope_1 == pytest.approx(-2.0 * eps, abs=1e-9)

    def test_out_of_range_rejected(self):
        with pytest.raises(ParameterRangeError):
            cp2_family(-0.9, 1)
        with pytest.raises(ParameterRangeError):
            cp2_family(1.0, 1)
        with pytest.raises(ParameterRangeError):
            cp2_family(0.9, -1)
        with pytest.raises(ParameterRangeError):
            cp2_family(0.5, 2)

    def test_q_positivity_flips_at_eta(self):
        e = eta()
        above = e + 1e-3
        below = e - 1e-3
        assert certify_positive(q_cubic(above), above, 1.0).positive
        cert = certify_positive(q_cubic(below), below, 1.0)
        assert not cert.positive
        assert eval_poly(q_cubic(below), cert.witness) <= 0.0

    def test_rejected_below_eta_mentions_range(self):
        with pytest.raises(ParameterRangeError, match="eta"):
            cp2_family(-0.9, 1)


class TestTheorem3:
    def test_genus_gt1_scan(self):
        rep = trivial_ruled_nonexistence("genus_gt1_product")
        assert isinstance(rep, NonexistenceReport)
        assert not rep.found_solution
        assert rep.worst_residual < 0.0
        assert rep.detail["n_admissible"] == 0

    def test_displayed_closed_form_value(self):
        assert theorem3_x_of_alpha_displayed(2.0) == pytest.approx(-2.75, abs=1e-14)

    def test_derived_closed_form_solves_system(self, rng):
        # z = -4 + D h^4 + C h^2 + E/h with z(x)=z(y)=0, z'(x)=2, z'(y)=-2:
        # eliminate (C, D, E) and check x(alpha) satisfies the remaining
        # compatibility equation (the displayed denominator drops a factor 2)
        for _ in range(20):
            a = float(rng.uniform(1.05, 20.0))
            x = float(theorem3_x_of_alpha_derived(a))
            y = a * x
            M = np.array([
                [x**2, x**4, 1.0 / x],
                [y**2, y**4, 1.0 / y],
                [2 * x, 4 * x**3, -1.0 / x**2],
            ])
            C, D, E = np.linalg.solve(M, np.array([4.0, 4.0, 2.0]))
            zprime_y = 2 * C * y + 4 * D * y**3 - E / y**2
            assert zprime_y == pytest.approx(-2.0, abs=1e-8)
            assert x < 0.0

    def test_torus_scan(self):
        rep = trivial_ruled_nonexistence("torus_product")
        assert not rep.found_solution
        assert rep.detail["factor_roots_above_1"] == []
        assert rep.detail["quadratic_factor_roots"] == []
        assert rep.detail["quadratic_discriminant"] == -15.0

    def test_torus_factor_matches_displayed_factorization(self, rng):
        for _ in range(30):
            a = float(rng.uniform(-3, 3))
            displayed = (a + 1.0) * (a - 1.0) ** 3 * (2 * a * a + a + 2.0)
            assert eval_poly(TORUS_FACTOR, a) == pytest.approx(displayed, rel=1e-12, abs=1e-12)
