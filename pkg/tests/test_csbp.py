import math

import numpy as np
import pytest
from scipy import stats

from conftest import zscore
from levynet.csbp import (
    CsbpPath,
    additivity_samples,
    csbp_path,
    extinction_cdf,
    extinction_tail,
    lamperti,
    lamperti_transform,
    scaling_samples,
    simulate_csbp,
    subordinator_ratio_estimate,
    u_lambda,
)
from levynet.errors import ParameterError
from levynet.stable_levy import StablePath, sample_excursion_approx


class TestClosedForms:
    @pytest.mark.parametrize("alpha", [1.2, 1.5, 1.9])
    def test_u_solves_ode(self, alpha):
        t, h = 0.7, 1e-6
        du = (u_lambda(alpha, 2.0, t + h) - u_lambda(alpha, 2.0, t - h)) / (2 * h)
        assert du == pytest.approx(-u_lambda(alpha, 2.0, t) ** alpha, rel=1e-7)
        assert u_lambda(alpha, 2.0, 0.0) == pytest.approx(2.0)

    def test_u_semigroup(self):
        a = 1.5
        assert u_lambda(a, u_lambda(a, 3.0, 0.4), 0.6) == pytest.approx(u_lambda(a, 3.0, 1.0), rel=1e-13)

    def test_extinction_is_limit_of_laplace(self):
        a, y0, t = 1.5, 1.3, 0.8
        lim = 1 - math.exp(-y0 * u_lambda(a, 1e12, t))
        assert extinction_tail(a, y0, t) == pytest.approx(lim, rel=1e-5)

    def test_reference_value(self):
        assert extinction_tail(1.5, 1.0, 2.0) == pytest.approx(1 - math.exp(-1), rel=1e-15)
        assert extinction_cdf(1.5, 1.0, 0.0) == 0.0

    def test_bad_arguments(self):
        with pytest.raises(ParameterError):
            u_lambda(1.5, -1.0, 1.0)
        with pytest.raises(ParameterError):
            extinction_tail(1.5, 1.0, 0.0)


class TestLamperti:
    def test_two_directions(self):
        p = lamperti(StablePath(1.5, [0.0, 1.0], [2.0, 0.0], np.zeros((0, 2)), 0.1))
        np.testing.assert_array_equal(p.times, [0.0, 0.5])
        assert p.absorption_time == 0.5
        q = lamperti_transform(CsbpPath(1.5, [0.0, 1.0], [2.0, 0.0], 1.0))
        np.testing.assert_array_equal(q.times, [0.0, 2.0])
        np.testing.assert_array_equal(q.values, [2.0, 0.0])

    def test_constant_path(self):
        p = lamperti(StablePath(1.5, [0.0, 1.0, 2.0], [4.0, 4.0, 4.0], np.zeros((0, 2)), 0.1))
        np.testing.assert_allclose(p.times, [0.0, 0.25, 0.5])
        assert math.isinf(p.absorption_time)

    def test_round_trip(self, rng):
        e = sample_excursion_approx(1.5, 0.5, 50.0, 1e-3, rng, truncation=0.01)
        back = lamperti_transform(lamperti(e))
        np.testing.assert_allclose(back.times, e.times, rtol=1e-9, atol=1e-12)
        np.testing.assert_array_equal(back.values[:-1], e.values[:-1])

    def test_grid_sampling(self, rng):
        e = sample_excursion_approx(1.5, 0.5, 50.0, 1e-3, rng, truncation=0.01)
        p = lamperti(e, grid=np.linspace(0, 20, 11))
        assert p.times.size == 11 and np.all(p.values >= 0)

    def test_rejects_nonpositive_start(self):
        with pytest.raises(ParameterError):
            lamperti(StablePath(1.5, [0.0, 1.0], [0.0, 0.0], np.zeros((0, 2)), 0.1))


class TestPathObject:
    def test_absorbing(self):
        with pytest.raises(ParameterError):
            CsbpPath(1.5, [0.0, 1.0, 2.0], [1.0, 0.0, 1.0])
        with pytest.raises(ParameterError):
            CsbpPath(1.5, [0.0, 1.0], [1.0, -1.0])

    def test_value_at_and_json(self, rng):
        p = csbp_path(1.5, 1.0, 1.0, rng)
        assert p.value_at(0.0) == 1.0
        q = CsbpPath.from_dict(p.to_dict())
        np.testing.assert_array_equal(q.values, p.values)
        assert q.absorption_time == p.absorption_time


class TestSimulation:
    @pytest.mark.parametrize("lam", [0.5, 2.0])
    def test_laplace(self, lam):
        ens = simulate_csbp(1.5, 1.0, [0.5], 20_000, 11)
        assert abs(zscore(np.exp(-lam * ens.values[:, 0]), math.exp(-u_lambda(1.5, lam, 0.5)))) < 4

    def test_extinction_probability(self):
        ens = simulate_csbp(1.5, 1.0, [0.5], 20_000, 12)
        p = extinction_cdf(1.5, 1.0, 0.5)
        assert abs(np.mean(ens.values[:, 0] == 0) - p) < 4 * math.sqrt(p * (1 - p) / 20_000)
        assert np.all(np.isfinite(ens.zeta) == (ens.values[:, 0] == 0))

    def test_seed_determinism(self):
        a = simulate_csbp(1.5, 1.0, [0.5], 2000, 5, chunk=500)
        b = simulate_csbp(1.5, 1.0, [0.5], 2000, 5, chunk=500)
        np.testing.assert_array_equal(a.values, b.values)

    def test_additivity(self):
        x, y = additivity_samples(1.5, 0.4, 0.6, 0.5, 10_000, 13)
        assert stats.ks_2samp(x, y).pvalue > 1e-3

    def test_scaling(self):
        x, y = scaling_samples(1.5, 1.0, 2.0, 0.3, 10_000, 14)
        assert stats.ks_2samp(x, y).pvalue > 1e-3

    def test_ratio(self):
        est = subordinator_ratio_estimate(1.5, 1.0, 3.0, 0.5, 10_000, 15)
        assert est.ci[0] <= 0.25 <= est.ci[1]
        assert 0 <= est.discard_rate < 1
        with pytest.raises(ParameterError):
            subordinator_ratio_estimate(1.5, 0.0, 3.0, 0.5, 10, 15)
