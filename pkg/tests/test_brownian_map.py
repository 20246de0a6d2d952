import math

import numpy as np
import pytest
from scipy import stats

from conftest import zscore
from levynet.brownian_map import (
    EXCURSION_MIDPOINT_VARIANCE,
    SnakeSample,
    ancestral_minimum,
    brownian_excursion,
    censored_rank_slope,
    d_circ,
    d_circ_cyclic,
    d_circ_matrix,
    excursion_lengths,
    hull_boundary_length,
    metric_closure,
    metric_matrix,
    sample_discrete_snake,
    sample_gaussian_snake,
    select_points,
    uniform_dyck_excursion,
)
from levynet.errors import ParameterError, RangeError, StructureError


def _brute_ancestral_min(y, x):
    out = []
    for k in range(len(y)):
        anc = [j for j in range(k + 1) if all(y[j] < y[i] for i in range(j + 1, k + 1))]
        out.append(min(x[j] for j in anc))
    return np.array(out)


class TestExcursions:
    def test_dyck_is_uniform(self, rng):
        # Catalan(3) = 5 lattice excursions of 8 steps
        seen = {}
        for _ in range(5000):
            key = tuple(uniform_dyck_excursion(8, rng))
            seen[key] = seen.get(key, 0) + 1
        assert len(seen) == 5
        assert stats.chisquare(list(seen.values())).pvalue > 1e-3
        for key in seen:
            e = np.array(key)
            assert e[0] == e[-1] == 0 and np.all(e[1:-1] > 0) and np.all(np.abs(np.diff(e)) == 1)

    def test_dyck_bad_length(self):
        with pytest.raises(ParameterError):
            uniform_dyck_excursion(7)

    def test_brownian_excursion_midpoint(self, rng):
        mid = np.array([brownian_excursion(4096, rng)[2048] for _ in range(4000)])
        assert np.all(mid >= 0)
        # e(1/2) is half a chi variable with 3 degrees of freedom
        assert mid.mean() == pytest.approx(math.sqrt(2 / math.pi), rel=0.02)
        assert mid.var() == pytest.approx(EXCURSION_MIDPOINT_VARIANCE, rel=0.1)


class TestSnakes:
    def test_lattice_snake_property(self, rng):
        s = sample_discrete_snake(200, rng)
        assert np.all(np.abs(np.diff(s.x)) == 1)
        y = s.y
        for k in range(0, 200, 7):
            for l in range(k + 1, 201):
                if y[l] == y[k] and y[k:l + 1].min() == y[k]:
                    assert s.x[l] == s.x[k]

    def test_gaussian_head_variance(self):
        v = []
        for i in range(3000):
            s = sample_gaussian_snake(128, i)
            k = 64
            v.append(s.x[k] ** 2 / s.y[k])
        # head given lifetime is N(0, y)
        assert abs(zscore(v, 1.0)) < 4

    def test_sample_validation_and_json(self, rng):
        s = sample_discrete_snake(16, rng)
        assert SnakeSample.from_dict(s.to_dict()).x.tolist() == s.x.tolist()
        with pytest.raises(StructureError):
            SnakeSample(2, [0.0, 0.0, 0.0], [0.0, 1.0, 0.0], "lattice")
        with pytest.raises(ParameterError):
            SnakeSample(2, [0.0, 1.0, 0.0], [0.0, 1.0, 0.0], "other")

    def test_ancestral_minimum(self, rng):
        for variant in (sample_discrete_snake, sample_gaussian_snake):
            s = variant(60, rng)
            np.testing.assert_array_equal(ancestral_minimum(s), _brute_ancestral_min(s.y, s.x))


class TestMetric:
    def test_d_circ_matrix_matches_pairs(self, rng):
        x = np.round(rng.normal(size=40), 3)
        p = np.sort(rng.choice(40, 12, replace=False))
        m = d_circ_matrix(x, p)
        for i in range(12):
            for j in range(12):
                assert m[i, j] == pytest.approx(d_circ_cyclic(x, p[i], p[j]), abs=1e-12)

    def test_closure_matches_reference(self, rng):
        s = sample_discrete_snake(2000, rng)
        p = select_points(s, 80, rng)
        dc = d_circ_matrix(s.x[: s.n], p)
        mm = metric_closure(dc, p)
        ref = dc.copy()
        for k in range(ref.shape[0]):
            ref = np.minimum(ref, ref[:, k : k + 1] + ref[k : k + 1, :])
        np.testing.assert_array_equal(mm.d, ref)
        mm.check()

    def test_docstring_example(self):
        assert metric_closure([[0, 5, 1], [5, 0, 1], [1, 1, 0]]).d.tolist() == [[0, 2, 1], [2, 0, 1], [1, 1, 0]]

    def test_closure_rejects_bad_input(self):
        with pytest.raises(StructureError):
            metric_closure([[0, 1], [2, 0]])
        with pytest.raises(StructureError):
            metric_closure([[1, 1], [1, 0]])

    @pytest.mark.parametrize("make", [sample_discrete_snake, sample_gaussian_snake])
    def test_invariants(self, make, rng):
        s = make(4096, rng)
        mm = metric_matrix(s, 256, rng)
        mm.check()
        r = int(np.searchsorted(mm.point_times, s.root_index))
        assert mm.point_times[r] == s.root_index
        np.testing.assert_array_equal(mm.d[r], s.x[mm.point_times] - s.min_x)
        x = s.x[mm.point_times]
        assert np.all(mm.d_circ >= np.abs(x[:, None] - x[None, :]))

    def test_d_circ_range(self, rng):
        s = sample_discrete_snake(16, rng)
        assert d_circ(s, 0, 16) == 0.0
        with pytest.raises(RangeError):
            d_circ(s, 0, 17)


class TestHullAndLengths:
    def test_hull_basic(self, rng):
        s = sample_discrete_snake(4096, rng)
        with pytest.raises(RangeError):
            hull_boundary_length(s, 0.0, 1.0)
        assert hull_boundary_length(s, s.min_x - 1, 1.0) == 0.0
        v = hull_boundary_length(s, -1.0, 1.0)
        assert v >= 0 and (v / (2.0 / 3.0)).is_integer()

    def test_lengths_tail(self):
        lengths, cens = excursion_lengths(5000, 3, eps=1.0, dt=1.0, max_time=1e4)
        assert np.all(lengths[cens] == 1e4)
        assert censored_rank_slope(lengths, cens, lo=100.0) == pytest.approx(-0.5, abs=0.1)

    def test_rank_slope_with_censoring(self, rng):
        t = (1 - rng.random(50_000)) ** -2.0
        cens = t > 1e4
        assert censored_rank_slope(np.minimum(t, 1e4), cens, lo=10.0) == pytest.approx(-0.5, abs=0.03)
        with pytest.raises(ParameterError):
            censored_rank_slope(t, cens, lo=1e9)
