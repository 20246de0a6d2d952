import math

import mpmath as mp
import numpy as np
import pytest

from conftest import zscore
from levynet.errors import ParameterError
from levynet.stable_levy import (
    StablePath,
    check_alpha,
    excursion_batch,
    exit_probability_oracle,
    extract_jumps,
    levy_constants,
    reverse_path,
    sample_excursion_approx,
    sample_levy_path,
    sample_stable_increment,
)


class TestConstants:
    @pytest.mark.parametrize("alpha", [1.2, 1.5, 1.8])
    def test_against_mpmath(self, alpha):
        # integrate in u = log x, where the tails decay exponentially
        delta = 0.03
        g = mp.gamma(-alpha)
        nu = lambda k: (lambda u: mp.exp((k - alpha) * u) / g)
        ld = mp.log(delta)
        rate, comp, var = levy_constants(alpha, delta)
        assert rate == pytest.approx(float(mp.quad(nu(0), [ld, 0, mp.inf])), rel=1e-12)
        assert comp == pytest.approx(float(mp.quad(nu(1), [ld, 0, mp.inf])), rel=1e-12)
        assert var == pytest.approx(float(mp.quad(nu(2), [-mp.inf, ld])), rel=1e-12)

    def test_vectorized(self):
        rate, comp, var = levy_constants(1.5, np.array([0.1, 0.2]))
        assert rate.shape == (2,) and rate[0] > rate[1]

    @pytest.mark.parametrize("bad", [1.0, 2.0, 0.5, float("nan")])
    def test_alpha_range(self, bad):
        with pytest.raises(ParameterError):
            check_alpha(bad)


class TestIncrements:
    @pytest.mark.parametrize("alpha", [1.3, 1.5, 1.8])
    @pytest.mark.parametrize("lam", [0.5, 1.0])
    def test_laplace_transform(self, alpha, lam, rng):
        x = sample_stable_increment(alpha, 1.0, rng, 200_000)
        assert abs(zscore(np.exp(-lam * x), math.exp(lam**alpha))) < 4

    def test_self_similarity_exact(self):
        a = sample_stable_increment(1.5, 1.0, 7, 10)
        b = sample_stable_increment(1.5, 8.0, 7, 10)
        np.testing.assert_allclose(b, 8.0 ** (1 / 1.5) * a, rtol=1e-14)

    def test_scalar_and_bad_dt(self):
        assert isinstance(sample_stable_increment(1.5, 1.0, 1), float)
        with pytest.raises(ParameterError):
            sample_stable_increment(1.5, 0.0, 1)


class TestPaths:
    def test_path_laplace_at_horizon(self, rng):
        ends = np.array([sample_levy_path(1.5, 1.0, 0.05, rng, truncation=0.05).values[-1] for _ in range(4000)])
        assert abs(zscore(np.exp(-ends), math.e)) < 4

    def test_grid_and_jumps(self, rng):
        p = sample_levy_path(1.5, 1.0, 0.01, rng, truncation=0.01)
        assert p.times[0] == 0 and np.all(np.diff(p.times) > 0)
        assert p.times[-1] == pytest.approx(1.0)
        if p.jumps.size:
            assert np.all(p.jumps[:, 1] >= 0.01)
        assert all(s >= 0.1 for _, s in extract_jumps(p, 0.1))

    def test_reverse_is_involution(self, rng):
        p = sample_excursion_approx(1.5, 0.2, 5.0, 1e-3, rng, truncation=0.01)
        r = reverse_path(p)
        assert reverse_path(r).same_as(p)
        np.testing.assert_array_equal(r.values, p.values[::-1])
        if p.jumps.size:
            np.testing.assert_array_equal(np.sort(-r.jumps[:, 1]), np.sort(p.jumps[:, 1]))

    def test_json_round_trip(self, rng):
        p = sample_levy_path(1.5, 0.5, 0.01, rng, truncation=0.05)
        assert StablePath.from_json(p.to_json()).same_as(p)

    def test_invalid_path(self):
        with pytest.raises(ParameterError):
            StablePath(1.5, np.array([0.0, 0.0]), np.array([0.0, 1.0]), np.zeros((0, 2)), 0.1)
        with pytest.raises(ParameterError):
            StablePath(1.5, np.array([0.1, 0.2]), np.array([0.0, 1.0]), np.zeros((0, 2)), 0.1)


class TestExit:
    def test_oracle_against_scale_function(self):
        alpha, eps, cap = 1.5, 0.01, 1.0
        w = lambda x: mp.mpf(x) ** (alpha - 1) / mp.gamma(alpha)
        assert exit_probability_oracle(alpha, eps, cap) == pytest.approx(float(1 - w(cap - eps) / w(cap)), rel=1e-12)
        assert exit_probability_oracle(alpha, 1.0, 100.0) == pytest.approx(0.0050126, rel=1e-4)

    def test_batch_exit_frequency(self, rng):
        alpha, eps, cap, n = 1.5, 0.1, 1.0, 20_000
        b = excursion_batch(alpha, eps, cap, n, rng, truncation=0.01, adaptive=0.01, rel_truncation=0.1)
        p = exit_probability_oracle(alpha, eps, cap)
        freq = np.mean(b.exit == "cap")
        assert abs(freq - p) < 4 * math.sqrt(p * (1 - p) / n)

    def test_oracle_range(self):
        with pytest.raises(ParameterError):
            exit_probability_oracle(1.5, 2.0, 1.0)
