import json
import math

import numpy as np
import pytest
from scipy import stats

from levynet.csbp import extinction_cdf
from levynet.errors import ParameterError, RangeError, StructureError
from levynet.levy_net import (
    LevyNetSkeleton,
    SliceSurface,
    coalescence_count,
    coalescence_counts,
    coalescence_mean_block,
    frechet_cdf,
    geodesic_ensemble,
    geodesic_pair,
    merge_depth_scale,
    rank_plot_slope,
    restarted_csbp_sup,
    sample_slice_batch,
    sample_slice_ppp,
    skeleton_from_profile,
    slice_floor,
    slice_merge_depth,
)
from levynet.stable_forest import ForestProfile, sample_conditioned_forest


class TestSkeleton:
    def test_hand_forest(self):
        prof = ForestProfile.from_offspring(1.5, [3, 0, 0, 0])
        sk = skeleton_from_profile(prof, n=1)
        np.testing.assert_array_equal(sk.z_values, [1.0, 3.0, 0.0])
        np.testing.assert_array_equal(sk.jumps, [[1.0, 2.0, 0.0]])
        assert sk.total_depth == 2.0
        assert sk.z_before(1.0) == 1.0 and sk.z_at(1.0) == 3.0
        assert sk.sum_squared_jumps == 4.0

    def test_sampled_skeleton(self, rng):
        prof = sample_conditioned_forest(1.5, 20_000, rng)
        sk = skeleton_from_profile(prof, rng)
        assert sk.z_values[0] == pytest.approx(prof.roots / prof.n ** (1 / 1.5))
        assert np.all(sk.jumps[:, 2] <= sk.z_before(sk.jumps[:, 0]))
        back = LevyNetSkeleton.from_dict(json.loads(sk.to_json()))
        np.testing.assert_array_equal(back.jumps, sk.jumps)

    def test_validation(self):
        with pytest.raises(StructureError):
            LevyNetSkeleton(1.5, [0.0, 1.0], [1.0, 1.0], np.zeros((0, 3)), 1.0)
        with pytest.raises(StructureError):
            LevyNetSkeleton(1.5, [0.0, 1.0, 2.0], [1.0, 2.0, 0.0], [[1.0, 1.0, 1.5]], 2.0)

    def test_rank_slope(self, rng):
        x = (1 - rng.random(50_000)) ** (-1 / 1.5)
        assert rank_plot_slope(x, top=2000) == pytest.approx(-1.5, abs=0.1)
        with pytest.raises(ParameterError):
            rank_plot_slope([1.0, 2.0])


class TestGeodesics:
    def test_ratio_is_martingale(self):
        ens = geodesic_ensemble(1.5, 1.0, 1.0, [0.0, 0.25, 0.5], 10_000, 3)
        r, ok = ens.ratio()
        assert np.all(r[:, 0] == 0.5)
        vals = r[ok[:, 2], 2]
        assert abs(vals.mean() - 0.5) < 4 * vals.std() / math.sqrt(vals.size)

    def test_merge_time(self):
        ens = geodesic_ensemble(1.5, 0.2, 0.2, np.linspace(0, 2, 21), 2000, 4)
        mt = ens.merge_time
        p_none = (1 - extinction_cdf(1.5, 0.2, 2.0)) ** 2
        assert abs(np.mean(np.isinf(mt)) - p_none) < 4 * math.sqrt(p_none * (1 - p_none) / 2000)
        pair = geodesic_pair(1.5, 0.1, 5.0, np.linspace(0, 5, 11), 5)
        assert pair.merge_side in ("a", "b", None)

    def test_bad_start(self):
        with pytest.raises(ParameterError):
            geodesic_ensemble(1.5, 0.0, 1.0, [1.0], 10)


class TestCoalescence:
    def test_mean_block_is_survival_scale(self):
        m = coalescence_mean_block(1.5, 0.01)
        assert 1 - extinction_cdf(1.5, m, 0.01) == pytest.approx(1 - math.exp(-1), rel=1e-12)

    def test_poisson_counts(self):
        c = coalescence_counts(1.5, 1e-3, 1e-2, 20_000, 6)
        target = 1e-3 / coalescence_mean_block(1.5, 1e-2)
        assert c.mean() == pytest.approx(target, rel=0.05)
        assert c.var() / c.mean() == pytest.approx(1.0, abs=0.1)

    def test_simulated_survival_agrees(self):
        c = coalescence_counts(1.5, 1e-3, 1e-2, 5000, 7, survival="simulate")
        target = 1e-3 / coalescence_mean_block(1.5, 1e-2)
        assert c.mean() == pytest.approx(target, rel=0.15)

    def test_errors(self):
        with pytest.raises(ParameterError):
            coalescence_counts(1.5, 1e-3, 1e-2, 10, 1, survival="guess")
        with pytest.warns(RuntimeWarning):
            coalescence_count(1.5, 1e-3, 1e-2, 1, delta=0.01)

    def test_restarted_sup(self):
        s = restarted_csbp_sup(1.5, 0.01, 0.1, 500, 8)
        assert np.all(s >= 0.01)


class TestSlices:
    def test_frechet_matches_extinction_law(self):
        beta, width = 0.5, 0.3
        lam = merge_depth_scale(beta)
        x = np.linspace(0.05, 3, 30)
        np.testing.assert_allclose(frechet_cdf(x, beta, width), extinction_cdf(beta + 1, width, lam * x), rtol=1e-12)

    def test_floor_budget(self):
        beta = 0.5
        f = slice_floor(beta, 0.01, 1e-12)
        assert frechet_cdf(f, beta, 0.01) == pytest.approx(1e-12, rel=1e-9)

    @pytest.mark.parametrize("beta", [0.5, 0.75])
    def test_depth_law(self, beta):
        b = sample_slice_batch(beta, 20_000, 9, x_min=slice_floor(beta, 0.25))
        d = b.depth(0.25, 0.75)
        assert stats.kstest(d, lambda x: frechet_cdf(x, beta, 0.5)).pvalue > 1e-3

    def test_single_surface_and_batch_agree(self):
        b = sample_slice_batch(0.5, 5, 10, x_min=0.05)
        for i in range(5):
            s = b.surface(i)
            assert slice_merge_depth(0.1, 0.9, s) == b.depth(0.1, 0.9)[i]

    def test_composition(self, rng):
        s = sample_slice_ppp(0.5, rng, x_min=1e-3)
        for a, c in rng.random((50, 2)):
            a, c = min(a, c), max(a, c)
            m = 0.5 * (a + c)
            assert s.depth(a, c) == max(s.depth(a, m), s.depth(m, c)) or np.any(s.positions == m)
        assert s.depth(0.4, 0.4) == 0.0

    def test_errors(self):
        s = SliceSurface(0.5, 0.1, np.array([0.5]), np.array([1.0]))
        with pytest.raises(RangeError):
            slice_merge_depth(0.6, 0.4, s)
        with pytest.raises(RangeError):
            slice_merge_depth(-0.1, 0.4, s)
        with pytest.raises(ParameterError):
            sample_slice_ppp(0.0)
