import math

import mpmath as mp
import numpy as np
import pytest
from scipy import stats

from levynet.errors import RangeError, StructureError
from levynet.stable_forest import (
    ForestProfile,
    _sample_tail,
    attachment_positions,
    brute_force_heights,
    default_roots,
    generation_sizes,
    height_process,
    level_profile,
    map_conditioned_forests,
    offspring_law,
    pooled_attachment_positions,
    sample_conditioned_forest,
    sample_forest,
)


def _n(profile):
    return profile.n


class TestOffspringLaw:
    @pytest.mark.parametrize("alpha", [1.3, 1.5, 1.8])
    def test_against_mpmath(self, alpha):
        law = offspring_law(alpha)
        p = 1 / mp.zeta(alpha)
        assert law.p == pytest.approx(float(p), rel=1e-14)
        assert law.p0 == pytest.approx(float(1 - p * mp.zeta(1 + alpha)), rel=1e-12)
        assert law.mean == pytest.approx(1.0, rel=1e-14)
        assert law.tail(50) == pytest.approx(float(p * mp.zeta(1 + alpha, 50)), rel=1e-12)
        assert law.psi_constant == pytest.approx(float(p * mp.gamma(-alpha)), rel=1e-12)

    def test_cdf_table(self):
        law = offspring_law(1.5)
        assert law.cdf[0] == law.p0
        k = law.cdf.size
        assert 1 - law.cdf[-1] == pytest.approx(law.tail(k), rel=1e-8)

    def test_small_values_frequency(self, rng):
        law = offspring_law(1.5)
        x = law.sample(200_000, rng)
        obs = np.bincount(np.minimum(x, 5), minlength=6)
        exp = np.append(law.pmf(np.arange(5)), law.tail(5)) * x.size
        assert stats.chisquare(obs, exp).pvalue > 1e-3

    def test_exact_tail_sampler(self, rng):
        alpha, kmin = 1.5, 1024
        draws = np.array([_sample_tail(alpha, kmin, rng) for _ in range(20_000)])
        assert draws.min() >= kmin
        target = float(mp.zeta(1 + alpha, 2 * kmin) / mp.zeta(1 + alpha, kmin))
        freq = np.mean(draws >= 2 * kmin)
        assert abs(freq - target) < 4 * math.sqrt(target * (1 - target) / draws.size)


class TestHeights:
    def test_hand_example(self):
        p = ForestProfile.from_offspring(1.5, [2, 0, 1, 0])
        np.testing.assert_array_equal(p.heights, [0, 1, 1, 2])
        np.testing.assert_array_equal(p.level_counts, [1, 2, 1])
        assert p.roots == 1

    def test_matches_brute_force(self, rng):
        law = offspring_law(1.5)
        for _ in range(20):
            f = sample_forest(1.5, 5, rng)
            np.testing.assert_array_equal(height_process(f.walk), brute_force_heights(f.walk))
        assert law.p0 > 0

    @pytest.mark.parametrize("walk", [[0, 1, 2], [0, -2], [1, 0, -1], [0, -1, 0]])
    def test_invalid_walks(self, walk):
        with pytest.raises(StructureError):
            height_process(np.array(walk))

    def test_level_profile(self):
        np.testing.assert_array_equal(level_profile([0, 1, 1, 2, 0]), [2, 2, 1])


class TestProfile:
    def test_subforests(self):
        q = ForestProfile.from_offspring(1.5, [1, 0, 0, 2, 0, 0])
        np.testing.assert_array_equal(q.tree_ends, [2, 3, 6])
        np.testing.assert_array_equal(q.subforest(1).offspring_counts, [0, 2, 0, 0])
        with pytest.raises(RangeError):
            q.subforest(2, 2)

    def test_invariants_and_halves(self, rng):
        f = sample_conditioned_forest(1.5, 20_000, rng)
        f.check()
        k = f.roots
        a, b = f.subforest(0, k // 2), f.subforest(k // 2)
        a.check()
        b.check()
        m = f.level_counts.size
        total = np.zeros(m, dtype=np.int64)
        total[: a.level_counts.size] += a.level_counts
        total[: b.level_counts.size] += b.level_counts
        np.testing.assert_array_equal(total, f.level_counts)

    def test_check_detects_corruption(self, rng):
        f = sample_forest(1.5, 10, rng)
        bad = ForestProfile(f.alpha, f.offspring_counts, f.walk, f.heights + 1, f.level_counts)
        with pytest.raises(StructureError):
            bad.check()

    def test_json_round_trip(self, rng):
        f = sample_forest(1.5, 10, rng)
        import json

        g = ForestProfile.from_dict(json.loads(f.to_json()))
        np.testing.assert_array_equal(g.heights, f.heights)

    def test_attachment_positions(self):
        q = ForestProfile.from_offspring(1.5, [1, 0, 0, 2, 0, 0])
        np.testing.assert_allclose(attachment_positions(q, 1, 0), [2 / 3, 1 / 3, 0])
        np.testing.assert_array_equal(pooled_attachment_positions(q, 2), [0.0])
        with pytest.raises(RangeError):
            attachment_positions(q, 5, 0)


class TestSampling:
    def test_conditioned_size(self, rng):
        f = sample_conditioned_forest(1.5, 10_000, rng)
        assert 10_000 <= f.n <= 11_000
        assert f.roots == default_roots(1.5, 10_000) == round(10_000 ** (1 / 1.5))

    def test_map_is_reproducible(self):
        a = map_conditioned_forests(_n, 1.5, 2000, 4, 9)
        b = map_conditioned_forests(_n, 1.5, 2000, 4, 9, jobs=2)
        assert a == b

    def test_generation_sizes_generating_function(self, rng):
        # E s^{Z_1} = f(s)^{Z_0} with f(s) = p0 + p Li_{1+alpha}(s)
        alpha, roots, s = 1.5, 3, 0.9
        law = offspring_law(alpha)
        f = law.p0 + law.p * float(mp.polylog(1 + alpha, s))
        v = s ** np.array([generation_sizes(alpha, roots, 1, rng)[1] for _ in range(20_000)], dtype=float)
        assert abs(v.mean() - f**roots) < 4 * v.std(ddof=1) / math.sqrt(v.size)
