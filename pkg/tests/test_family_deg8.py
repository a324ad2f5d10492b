"""Tests for the degree-8 family (triple quadratic composition)."""
import logging

import numpy as np
import pytest

from family_deg8 import (
    CONSTRAINT_LABELS8,
    ParamSet8,
    closed_form_coefficients8,
    constraints8,
    cross_check8,
    detect8,
    forward8,
    recover8,
    solve8,
)
from numeric_core import (
    InvalidInputError,
    MonicPoly,
    NumericalFailureError,
    durand_kerner,
    eval_poly,
    match_root_multisets,
    min_root_separation,
    residual_scale,
)

Z2_PLUS_Z_FOURTH = ParamSet8(0, 1, 0, 0, 0, 0)


class TestForward8:
    """Test cases for the forward map."""

    def test_square_of_quadratic_power(self):
        poly = forward8(Z2_PLUS_Z_FOURTH)
        assert poly.coeffs == (0, 0, 0, 0, 1, 4, 6, 4)

    def test_pure_biquartic(self):
        # Qalpha = z^2, Qbeta = y^2, Qgamma = x^2 - 3x + 2
        poly = forward8(ParamSet8(0, 0, 0, 0, 2, -3))
        assert poly.coeffs == (2, 0, 0, 0, -3, 0, 0, 0)

    def test_rejects_non_finite_parameters(self):
        with pytest.raises(InvalidInputError):
            ParamSet8(float("nan"), 0, 0, 0, 0, 0)

    def test_matches_corrected_closed_forms(self, draw_params8):
        for p in draw_params8(1000, radius=1.0):
            check = cross_check8(p)
            assert max(check.deviations) <= 1e-12

    def test_printed_constant_term_differs_by_known_amount(self, draw_params8):
        for p in draw_params8(200, radius=1.0):
            check = cross_check8(p)
            expected = 2 * p.beta1 * p.alpha0 ** 3 * (p.alpha0 - 1)
            assert abs(check.printed_c0_excess - expected) <= 1e-12 * max(1.0, abs(expected))

    def test_printed_constant_term_agrees_when_alpha0_is_zero_or_one(self):
        for alpha0 in (0, 1):
            p = ParamSet8(alpha0, 0.3 - 0.2j, 0.7j, -1.1, 0.25, 0.5 + 0.5j)
            printed = closed_form_coefficients8(p, printed_c0=True)[0]
            assert abs(printed - forward8(p).coeffs[0]) < 1e-12

    def test_printed_constant_term_deviation_is_logged(self, caplog):
        p = ParamSet8(0.5, 0.1, 0.2, 1.0, 0.3, 0.4)
        with caplog.at_level(logging.INFO, logger="family_deg8"):
            check = cross_check8(p)
        # 2 * 1.0 * 0.125 * (-0.5)
        assert check.printed_c0_excess == pytest.approx(-0.125)
        assert "constant-term" in caplog.text


class TestSolve8:
    """Test cases for the quadratic cascade."""

    def test_biquartic_roots(self, biquartic_roots):
        roots, _ = solve8(ParamSet8(0, 0, 0, 0, 2, -3))
        assert match_root_multisets(roots, biquartic_roots, 1e-12).matched

    def test_square_of_quadratic_power_roots(self):
        roots, _ = solve8(Z2_PLUS_Z_FOURTH)
        assert sorted(r.real for r in roots) == pytest.approx([-1] * 4 + [0] * 4, abs=1e-12)

    def test_trace_layers_are_consistent(self):
        p = ParamSet8(0.3 + 0.1j, -0.4, 0.2j, 0.9, -0.5 + 0.5j, 0.1)
        _, trace = solve8(p)
        for nu in range(2):
            x = trace.x[nu]
            assert abs(x * x + p.gamma1 * x + p.gamma0) < 1e-12
            for mu in range(2):
                y = trace.y[mu][nu]
                assert abs(y * y + p.beta1 * y + p.beta0 - x) < 1e-12
                for lam in range(2):
                    z = trace.z[lam][mu][nu]
                    assert abs(z * z + p.alpha1 * z + p.alpha0 - y) < 1e-12

    def test_residuals_on_random_corpus(self, draw_params8, tolerances):
        for p in draw_params8(1000, radius=2.0):
            roots, _ = solve8(p, tolerances)
            poly = forward8(p)
            assert len(roots) == 8
            for z in roots:
                assert abs(eval_poly(poly, z)) <= tolerances.rel_residual * residual_scale(poly, z)

    def test_agrees_with_oracle_on_separated_instances(self, draw_params8, tolerances):
        compared = 0
        for p in draw_params8(300, radius=2.0):
            roots, _ = solve8(p, tolerances)
            if min_root_separation(roots) < 1e-3:
                continue
            oracle = durand_kerner(forward8(p), tolerances)
            assert match_root_multisets(roots, oracle, tolerances.pairing_tol).matched
            compared += 1
        assert compared > 250


class TestConstraints8:
    """Test cases for the constraint residuals."""

    def test_labels(self):
        assert CONSTRAINT_LABELS8 == ("c5", "c3", "c2", "c1")

    def test_square_of_quadratic_power(self):
        assert constraints8(MonicPoly(8, (0, 0, 0, 0, 1, 4, 6, 4))) == (0, 0, 0, 0)

    def test_biquartic(self, biquartic):
        assert constraints8(biquartic) == (0, 0, 0, 0)

    def test_stray_c5(self):
        residuals = constraints8(MonicPoly(8, (0, 0, 0, 0, 0, 1, 0, 0)))
        assert residuals[0] == 1.0

    def test_wrong_degree(self):
        with pytest.raises(InvalidInputError):
            constraints8(MonicPoly(9, (0,) * 9))

    def test_vanish_on_image(self, draw_params8):
        for p in draw_params8(1000, radius=2.0):
            assert max(constraints8(forward8(p))) <= 1e-10

    def test_perturbing_c5_leaves_the_family(self, draw_params8, rng, tolerances):
        failures = 0
        params = draw_params8(1000, radius=2.0)
        for p in params:
            coeffs = list(forward8(p).coeffs)
            coeffs[5] += 1e-2 * np.exp(2j * np.pi * rng.random())
            poly = MonicPoly(8, tuple(coeffs))
            if not detect8(poly, tolerances).in_family:
                failures += 1
        assert failures >= 990


class TestRecover8:
    """Test cases for gauge-fixed recovery and detection."""

    def test_square_of_quadratic_power(self):
        p = recover8(MonicPoly(8, (0, 0, 0, 0, 1, 4, 6, 4)))
        assert p == Z2_PLUS_Z_FOURTH

    def test_biquartic(self, biquartic):
        p = recover8(biquartic)
        assert (p.gamma1, p.gamma0) == (-3, 2)

    def test_gauges_are_free(self, draw_params8, rng):
        for p in draw_params8(100, radius=2.0):
            c = forward8(p)
            for _ in range(10):
                a0, b0 = 2 * (rng.random(2) - 0.5) + 2j * (rng.random(2) - 0.5)
                rebuilt = forward8(recover8(c, a0, b0))
                scale = max(1.0, max(abs(x) for x in c.coeffs))
                assert max(abs(x - y) for x, y in zip(rebuilt.coeffs, c.coeffs)) <= 1e-9 * scale

    def test_roots_agree_across_gauges(self, draw_params8, rng, tolerances):
        compared = 0
        for p in draw_params8(300, radius=2.0):
            c = forward8(p)
            base, _ = solve8(recover8(c), tolerances)
            if min_root_separation(base) < 1e-3:
                continue
            a0, b0 = 2 * (rng.random(2) - 0.5) + 2j * (rng.random(2) - 0.5)
            shifted, _ = solve8(recover8(c, a0, b0), tolerances)
            assert match_root_multisets(base, shifted, tolerances.pairing_tol).matched
            compared += 1
        assert compared >= 150

    def test_detect_member(self, biquartic, tolerances):
        diag = detect8(biquartic, tolerances)
        assert diag.in_family
        assert diag.recovered.gamma1 == -3
        assert diag.recovered.gamma0 == 2
        assert (diag.gauge_alpha0, diag.gauge_beta0) == (0, 0)

    def test_detect_recovers_square_of_quadratic_power(self, tolerances):
        diag = detect8(MonicPoly(8, (0, 0, 0, 0, 1, 4, 6, 4)), tolerances)
        assert diag.in_family
        assert diag.recovered == Z2_PLUS_Z_FOURTH

    def test_detect_non_member(self, tolerances):
        diag = detect8(MonicPoly(8, (0, 0, 0, 0, 0, 1, 0, 0)), tolerances)
        assert not diag.in_family
        assert diag.recovered is None
        assert diag.constraint_residuals[0] == 1.0

    def test_huge_leading_coefficient_is_a_numerical_failure(self, tolerances):
        c = MonicPoly(8, (0, 0, 0, 0, 0, 0, 0, 1e60))
        with pytest.raises(NumericalFailureError, match="constraints8"):
            constraints8(c)
        with pytest.raises(NumericalFailureError):
            detect8(c, tolerances)

    def test_recovery_overflow_is_a_numerical_failure(self):
        with pytest.raises(NumericalFailureError, match="recover8"):
            recover8(MonicPoly(8, (0, 0, 0, 0, 0, 0, 0, 1e80)))

    def test_detect_with_gauge(self, draw_params8, tolerances):
        p = draw_params8(1)[0]
        diag = detect8(forward8(p), tolerances, gauge_alpha0=0.5j, gauge_beta0=-0.25)
        assert diag.in_family
        assert diag.recovered.alpha0 == 0.5j
        assert diag.recovered.beta0 == -0.25
