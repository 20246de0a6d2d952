import math

import mpmath as mp
import numpy as np
import pytest

from levynet.characterization import (
    JumpLawSpec,
    area_weight,
    center_jump_density,
    drift_estimate,
    find_martingale_alpha,
    fold_identity_check,
    fold_identity_terms,
    hyp2f1_series,
    i_alpha_closed,
    i_alpha_four_term,
    i_alpha_integrand,
    i_alpha_quadrature,
    incomplete_beta,
    is_big_jump,
    reversal_jump_cdf,
    reversal_jump_density,
    small_jump_moments,
)
from levynet.errors import NumericError, ParameterError, RangeError


def _raw_integrand(x, a):
    # the terms cancel to O(x^{1-a}) against x^{-a}; carry enough digits for that
    with mp.workdps(50 + 2 * int(max(0, -mp.log10(x)))):
        x = mp.mpf(x)
        v = (x ** (2 * a - 1) + (1 - x) ** (2 * a - 1) - 1) * x ** (-a - 1) * (1 - x) ** (-a - 1)
        v += (2 * a - 1) * x ** (-a)
    return +v


def _smoothed_quad(f, upper, m=10):
    # x = u^m removes the algebraic singularity of f at 0
    return mp.quad(lambda u: m * u ** (m - 1) * f(u**m), [0, mp.mpf(upper) ** (mp.mpf(1) / m)])


def i_alpha_mpmath(alpha):
    """The drift integral straight from its definition."""
    with mp.workdps(30):
        a = mp.mpf(alpha)
        body = _smoothed_quad(lambda x: _raw_integrand(x, a), 0.5)
        tail = (2 * a - 1) * mp.mpf(0.5) ** (1 - a) / (a - 1)
        return float(body + tail)


class TestDriftIntegral:
    @pytest.mark.parametrize("alpha", [1.1, 1.25, 1.5, 1.75, 1.9])
    def test_closed_form_against_mpmath(self, alpha):
        ref = i_alpha_mpmath(alpha)
        assert i_alpha_closed(alpha) == pytest.approx(ref, rel=1e-10, abs=1e-10)
        assert i_alpha_quadrature(alpha) == pytest.approx(ref, rel=1e-10, abs=1e-10)

    def test_four_term_cancellation(self):
        for a in np.linspace(1.1, 1.9, 9):
            assert i_alpha_four_term(a) == pytest.approx(i_alpha_closed(a), rel=1e-12, abs=1e-12)

    def test_root(self):
        assert find_martingale_alpha(tol=1e-12) == pytest.approx(1.5, abs=1e-11)
        assert find_martingale_alpha(tol=1e-8, func=i_alpha_quadrature) == pytest.approx(1.5, abs=1e-7)
        assert abs(i_alpha_mpmath(1.5)) < 1e-12

    def test_sign_pattern(self):
        # I is positive below 3/2 and negative above
        assert i_alpha_closed(1.25) > 0 > i_alpha_closed(1.75)
        assert i_alpha_closed(1.25) == pytest.approx(8.1332456, rel=1e-7)

    def test_integrand_finite_near_zero(self):
        v = i_alpha_integrand(np.array([1e-12, 1e-6, 0.04, 0.06, 0.5]), 1.5)
        assert np.all(np.isfinite(v))
        ref = _raw_integrand(mp.mpf("0.3"), mp.mpf("1.5"))
        assert i_alpha_integrand(0.3, 1.5)[0] == pytest.approx(float(ref), rel=1e-13)

    def test_no_sign_change(self):
        with pytest.raises(NumericError):
            find_martingale_alpha(bracket=(1.6, 1.9))
        with pytest.raises(ParameterError):
            find_martingale_alpha(tol=0.0)


class TestSpecialFunctions:
    @pytest.mark.parametrize("args", [(0.5, 1.5, 2.5, 0.3), (-1.5, 0.5, -0.5, 0.5), (1.0, 1.0, 2.0, -0.7)])
    def test_hyp2f1(self, args):
        assert hyp2f1_series(*args) == pytest.approx(float(mp.hyp2f1(*args)), rel=1e-13)

    def test_incomplete_beta_positive_parameters(self):
        assert incomplete_beta(0.3, 2.5, 1.5) == pytest.approx(float(mp.betainc(2.5, 1.5, 0, 0.3)), rel=1e-13)

    def test_incomplete_beta_regularized_continuation(self):
        # for -2 < a < -1 the continuation is x^a/a + (1-b) x^{a+1}/(a+1) plus a convergent integral
        x, a, b = 0.5, -1.5, -0.5
        def f(t):
            with mp.workdps(50 + 3 * int(max(0, -mp.log10(t)))):
                v = t ** (a - 1) * ((1 - t) ** (b - 1) - 1 - (1 - b) * t)
            return +v

        with mp.workdps(30):
            integral = _smoothed_quad(f, x)
            ref = float(integral + mp.mpf(x) ** a / a + (1 - b) * mp.mpf(x) ** (a + 1) / (a + 1))
        assert incomplete_beta(x, a, b) == pytest.approx(ref, rel=1e-12)


class TestJumpLaws:
    def test_fold_identity_in_high_precision(self):
        for a, c in [(0.1, 1.0), (0.49, 1.0), (0.003, 7.0)]:
            t1, t2, rhs = fold_identity_terms(1.5, a, c)
            assert t1 + t2 == pytest.approx(rhs, rel=1e-13)
            assert fold_identity_check(1.5, a, c) < 1e-14

    def test_fold_range(self):
        with pytest.raises(RangeError):
            fold_identity_terms(1.5, 0.6, 1.0)

    def test_densities(self):
        assert reversal_jump_density(1.5, 0.25, 1.0) == pytest.approx(0.25**-2.5 * 0.75**-0.5)
        assert center_jump_density(1.5, 0.25, 1.0) == pytest.approx(0.25**-2.5 * 0.75**-2.5)
        assert area_weight(1.5, 0.5, 1.0) == pytest.approx(0.5)
        spec = JumpLawSpec(1.5, "weighted", 2.0)
        assert spec.support == (0.0, 1.0)
        assert spec.density(0.3) == pytest.approx(area_weight(1.5, 0.3, 2.0) * center_jump_density(1.5, 0.3, 2.0))
        with pytest.raises(ParameterError):
            JumpLawSpec(1.5, "other")

    def test_reversal_cdf_against_mpmath(self):
        alpha, c, lo, hi = 1.5, 0.8, 0.03, 0.7
        dens = lambda x: x ** (-alpha - 1) * (1 - x / c) ** (alpha - 2)
        total = mp.quad(dens, [lo, hi])
        for a in (0.05, 0.2, 0.6):
            assert reversal_jump_cdf(alpha, a, c, lo, hi)[0] == pytest.approx(float(mp.quad(dens, [lo, a]) / total), rel=1e-10)
        np.testing.assert_array_equal(reversal_jump_cdf(alpha, [0.0, 1.0], c, lo, hi), [0.0, 1.0])
        with pytest.raises(RangeError):
            reversal_jump_cdf(alpha, 0.1, c, 0.5, 0.4)

    def test_big_jump(self):
        assert is_big_jump(1.0, 0.4) and not is_big_jump(1.0, 0.5)
        with pytest.raises(RangeError):
            is_big_jump(1.0, 1.5)


class TestDriftEstimate:
    def test_small_jump_moments(self):
        alpha, eps = 1.5, 0.01
        pi = lambda x: x ** (-alpha - 1) * (1 - x) ** (-alpha - 1)
        mu, var, area = small_jump_moments(alpha, eps)
        with mp.workdps(30):
            assert mu == pytest.approx(float(mp.quad(lambda x: x ** (-alpha) - x * pi(x), [0, eps])), rel=1e-9)
            assert var == pytest.approx(float(mp.quad(lambda x: x**2 * pi(x), [0, eps])), rel=1e-9)
            assert area == pytest.approx(float(mp.quad(lambda x: x ** (2 * alpha - 1) * pi(x), [0, eps])), rel=1e-9)

    def test_estimate_covers_reference(self):
        est = drift_estimate(1.25, n=20_000, rng=3)
        assert est.reference == pytest.approx(i_alpha_closed(1.25))
        assert est.contains(est.reference)
        assert est.ci[0] < est.mean < est.ci[1]

    def test_bad_level(self):
        with pytest.raises(ParameterError):
            drift_estimate(1.5, n=100, rng=1, level=1.5)
