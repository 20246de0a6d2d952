"""Brownian snake samples and the metric they encode.

A snake is a lifetime excursion ``y`` with head positions ``x`` that are
Gaussian along the tree coded by ``y``: ``Cov(x_s, x_t) = min(y over [s, t])``.
From ``x`` one forms

    d°(s, t) = x_s + x_t - 2 max(min x on [s, t], min x on the cyclic complement)

and the metric ``d`` is the largest metric below ``d°``, computed at grid
resolution as the min-plus closure on a set of selected times.

Head positions are rounded to multiples of ``2^-40``. With values of modest
size every sum and difference in ``d°`` and in the closure is then exact, so
metric identities can be asserted with ``==``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .errors import ParameterError, RangeError, StructureError
from .rng import as_generator

__all__ = [
    "POSITION_QUANTUM",
    "SnakeSample",
    "sample_discrete_snake",
    "sample_gaussian_snake",
    "brownian_excursion",
    "uniform_dyck_excursion",
    "d_circ_cyclic",
    "d_circ",
    "d_circ_matrix",
    "MetricMatrix",
    "metric_closure",
    "select_points",
    "metric_matrix",
    "ancestral_minimum",
    "hull_boundary_length",
    "excursion_lengths",
    "censored_rank_slope",
    "EXCURSION_MIDPOINT_VARIANCE",
]

POSITION_QUANTUM = 2.0**-40

#: Variance of a standard Brownian excursion at time 1/2, ``(3 - 8/pi) / 4``.
EXCURSION_MIDPOINT_VARIANCE = (3.0 - 8.0 / np.pi) / 4.0


def _quantize(x: np.ndarray) -> np.ndarray:
    return np.round(x / POSITION_QUANTUM) * POSITION_QUANTUM


@dataclass(frozen=True, eq=False)
class SnakeSample:
    """Lifetime ``y`` and head position ``x`` on ``n + 1`` tour times.

    Attributes
    ----------
    n : int
        Number of steps; ``y[0] = y[n] = 0`` and ``x[0] = x[n] = 0``.
    variant : {"lattice", "gaussian"}
    root_index : int
        First index of the minimum of ``x`` (the root of the map; time 0 is
        the dual root).
    """

    n: int
    y: np.ndarray
    x: np.ndarray
    variant: str
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        y = np.asarray(self.y, dtype=float)
        x = np.asarray(self.x, dtype=float)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "x", x)
        if y.shape != (self.n + 1,) or x.shape != (self.n + 1,):
            raise StructureError("y and x must have n + 1 entries")
        if self.variant not in ("lattice", "gaussian"):
            raise ParameterError(f"unknown variant {self.variant!r}")
        if y[0] != 0 or y[-1] != 0 or np.any(y[1:-1] <= 0):
            raise StructureError("y must be a single excursion")
        if x[0] != 0 or x[-1] != 0:
            raise StructureError("the head must start and end at 0")

    @property
    def root_index(self) -> int:
        return int(np.argmin(self.x))

    @property
    def min_x(self) -> float:
        return float(self.x.min())

    def to_dict(self) -> dict:
        return {"n": self.n, "variant": self.variant, "y": self.y.tolist(), "x": self.x.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "SnakeSample":
        return cls(int(d["n"]), np.asarray(d["y"]), np.asarray(d["x"]), d["variant"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def uniform_dyck_excursion(steps: int, rng: np.random.Generator | int | None = None) -> np.ndarray:
    """Uniform lattice excursion of length ``steps`` (positive inside).

    Built as one up-step, a uniform Dyck path of length ``steps - 2`` lifted by
    one, and one down-step. The Dyck path comes from a uniform arrangement
    of ``m - 1`` up- and ``m`` down-steps, rotated to start just after the
    first time its partial sums reach their minimum (cyclic lemma).
    """
    if steps < 2 or steps % 2:
        raise ParameterError("steps must be an even integer >= 2")
    gen = as_generator(rng)
    m = steps // 2
    seq = np.concatenate([np.ones(m - 1, dtype=np.int64), -np.ones(m, dtype=np.int64)])
    gen.shuffle(seq)
    s = np.cumsum(seq)
    k = int(np.argmin(s))
    rot = np.roll(seq, -(k + 1))
    dyck = np.concatenate([[0], np.cumsum(rot[:-1])])
    return np.concatenate([[0], 1 + dyck, [0]]).astype(np.int64)


def sample_discrete_snake(steps: int, rng: np.random.Generator | int | None = None) -> SnakeSample:
    """Lattice snake on a uniform excursion of ``steps`` steps.

    Every up-step grows the snake by one edge whose horizontal direction is
    a fair coin (``+1`` or ``-1``); every down-step deletes the top edge, so
    the head returns to the stored body position.
    """
    gen = as_generator(rng)
    y = uniform_dyck_excursion(steps, gen)
    coins = 2.0 * gen.integers(0, 2, steps) - 1.0
    x = kernels.snake_retrace(y.astype(float), coins)
    return SnakeSample(steps, y, x, "lattice")


def brownian_excursion(n_grid: int, rng: np.random.Generator | int | None = None) -> np.ndarray:
    """Standard Brownian excursion on ``n_grid + 1`` equally spaced times.

    A Brownian bridge on the grid is rotated to start at its minimum
    (Vervaat transform). The grid minimum misses the true one by about
    ``0.58 / sqrt(n_grid)``, which biases values down by that amount.
    """
    if n_grid < 4:
        raise ParameterError("n_grid must be at least 4")
    gen = as_generator(rng)
    w = np.concatenate([[0.0], np.cumsum(gen.standard_normal(n_grid))]) / np.sqrt(n_grid)
    b = w - np.arange(n_grid + 1) / n_grid * w[-1]
    m = int(np.argmin(b[:-1]))
    e = np.roll(b[:-1], -m) - b[m]
    return np.concatenate([e, [0.0]])


def sample_gaussian_snake(n_grid: int, rng: np.random.Generator | int | None = None) -> SnakeSample:
    """Brownian snake on a grid excursion.

    The head is built in tour order. A rise of the lifetime appends an
    independent Gaussian increment to the current lineage. A fall reads the
    lineage at the new height; between stored heights the lineage is a
    Brownian bridge, sampled exactly given the bracketing values.
    """
    gen = as_generator(rng)
    y = brownian_excursion(n_grid, gen)
    z = gen.standard_normal(n_grid)
    x = _quantize(kernels.snake_retrace(y, z))
    x[0] = x[-1] = 0.0
    return SnakeSample(n_grid, y, x, "gaussian")


def d_circ_cyclic(x: Sequence[float] | np.ndarray, s: int, t: int) -> float:
    """``d°(s, t)`` for one period ``x`` of a cyclic head process.

    Both the interval ``[s, t]`` and its cyclic complement include the two
    endpoints.
    """
    x = np.asarray(x, dtype=float)
    s, t = min(s, t), max(s, t)
    if s < 0 or t >= x.size:
        raise RangeError("index out of range")
    inner = x[s : t + 1].min()
    outer = min(x[t:].min(), x[: s + 1].min())
    return float(x[s] + x[t] - 2.0 * max(inner, outer))


def d_circ(sample: SnakeSample, s: int, t: int) -> float:
    """``d°`` between tour times ``s`` and ``t`` of a snake."""
    if not (0 <= s <= sample.n and 0 <= t <= sample.n):
        raise RangeError("index out of range")
    n = sample.n
    return d_circ_cyclic(sample.x[:n], s % n, t % n)


def d_circ_matrix(x: np.ndarray, points: np.ndarray) -> np.ndarray:
    """``d°`` between all pairs of sorted ``points`` of the period ``x``.

    Uses ``O(len(x) + m^2)`` work via segment minima between consecutive
    points.
    """
    x = np.asarray(x, dtype=float)
    p = np.asarray(points, dtype=np.int64)
    m = p.size
    if m == 0:
        return np.zeros((0, 0))
    if np.any(np.diff(p) <= 0) or p[0] < 0 or p[-1] >= x.size:
        raise ParameterError("points must be strictly increasing indices into x")
    seg = np.minimum.reduceat(x, p)[:-1] if m > 1 else np.zeros(0)
    seg = np.minimum(seg, x[p[1:]])
    pre = np.minimum.accumulate(x)[p]
    suf = np.minimum.accumulate(x[::-1])[::-1][p]
    xp = x[p]
    out = np.zeros((m, m))
    for i in range(m - 1):
        inner = np.minimum.accumulate(seg[i:])
        outer = np.minimum(pre[i], suf[i + 1 :])
        row = xp[i] + xp[i + 1 :] - 2.0 * np.maximum(inner, outer)
        out[i, i + 1 :] = row
        out[i + 1 :, i] = row
    return out


@dataclass(frozen=True, eq=False)
class MetricMatrix:
    """``d°`` and its min-plus closure ``d`` on selected tour times."""

    point_times: np.ndarray
    d_circ: np.ndarray
    d: np.ndarray

    def check(self) -> None:
        """Assert the metric invariants exactly.

        Raises
        ------
        StructureError
            On the first violated invariant.
        """
        d, dc = self.d, self.d_circ
        if not np.array_equal(d, d.T):
            raise StructureError("d is not symmetric")
        if np.any(np.diag(d) != 0):
            raise StructureError("d has a nonzero diagonal")
        if np.any(d > dc):
            raise StructureError("d exceeds d°")
        if np.any(d < 0):
            raise StructureError("d is negative")
        for k in range(d.shape[0]):
            if np.any(d[:, k : k + 1] + d[k : k + 1, :] < d):
                raise StructureError("triangle inequality fails")

    def to_dict(self) -> dict:
        return {"point_times": self.point_times.tolist(), "d_circ": self.d_circ.tolist(), "d": self.d.tolist()}


def _check_square(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise StructureError("matrix must be square")
    if not np.array_equal(m, m.T):
        raise StructureError("matrix must be symmetric")
    if np.any(np.diag(m) != 0) or np.any(m < 0):
        raise StructureError("matrix must be nonnegative with zero diagonal")
    return m


def metric_closure(dc: np.ndarray, point_times: np.ndarray | None = None) -> MetricMatrix:
    """Min-plus transitive closure of a ``d°`` matrix.

    Floyd-Warshall passes are repeated until nothing changes, so the result
    satisfies the triangle inequality exactly in floating point.

    Raises
    ------
    StructureError
        If ``dc`` is not square, symmetric, nonnegative with zero diagonal.

    Examples
    --------
    >>> metric_closure([[0, 5, 1], [5, 0, 1], [1, 1, 0]]).d.tolist()
    [[0.0, 2.0, 1.0], [2.0, 0.0, 1.0], [1.0, 1.0, 0.0]]
    """
    dc = _check_square(dc)
    d = np.ascontiguousarray(dc.copy())
    while kernels.minplus_closure(d):
        pass
    pts = np.arange(dc.shape[0]) if point_times is None else np.asarray(point_times)
    return MetricMatrix(pts, dc, d)


def select_points(sample: SnakeSample, m: int, rng: np.random.Generator | int | None = None) -> np.ndarray:
    """``m`` distinct uniformly chosen tour times in ``[0, n)``, always including the root."""
    n = sample.n
    if not 1 <= m <= n:
        raise ParameterError("need 1 <= m <= n")
    gen = as_generator(rng)
    r = sample.root_index % n
    others = np.delete(np.arange(n), r)
    pick = gen.choice(others, size=m - 1, replace=False)
    return np.sort(np.concatenate([pick, [r]]))


def metric_matrix(
    sample: SnakeSample,
    m: int = 512,
    rng: np.random.Generator | int | None = None,
    points: np.ndarray | None = None,
) -> MetricMatrix:
    """``d°`` and ``d`` on ``m`` selected times of a snake."""
    if m > 2048 and points is None:
        raise ParameterError("at most 2048 points")
    p = select_points(sample, m, rng) if points is None else np.asarray(points, dtype=np.int64)
    dc = d_circ_matrix(sample.x[: sample.n], p)
    return metric_closure(dc, p)


def ancestral_minimum(sample: SnakeSample) -> np.ndarray:
    """Minimum of the head position along the lineage of each tour time.

    The lineage at time ``k`` is represented by the stored heads at the
    heights visited (the records of the tour), as in the head sampler.
    """
    y = sample.y.tolist()
    x = sample.x.tolist()
    out = np.empty(len(y))
    hs: list[float] = []
    ms: list[float] = []
    for k, (yk, xk) in enumerate(zip(y, x)):
        while hs and hs[-1] >= yk:
            hs.pop()
            ms.pop()
        cur = xk if not ms else min(ms[-1], xk)
        hs.append(yk)
        ms.append(cur)
        out[k] = cur
    return out


def hull_boundary_length(sample: SnakeSample, a: float, eps: float) -> float:
    """Boundary length of the hull at level ``a`` from excursion counts.

    Counts the maximal tour intervals during which the snake's lineage lies
    at or below ``a`` and whose head reaches ``a - eps``. Such excursions
    arrive as a Poisson process in boundary length with rate
    ``3 / (2 eps^2)``, so the estimate is ``count * 2 eps^2 / 3``.

    Raises
    ------
    RangeError
        If ``a >= 0`` or ``eps <= 0``.
    """
    if a >= 0:
        raise RangeError("level must be negative")
    if not eps > 0:
        raise RangeError("eps must be positive")
    if a <= sample.min_x:
        return 0.0
    below = ancestral_minimum(sample) <= a
    if not below.any():
        return 0.0
    edges = np.diff(np.concatenate([[0], below.astype(np.int8), [0]]))
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1)
    depth = np.array([sample.x[s:e].min() for s, e in zip(starts, ends)])
    count = int(np.count_nonzero(depth <= a - eps))
    return count * 2.0 * eps**2 / 3.0


def excursion_lengths(
    n: int,
    rng: np.random.Generator | int | None = None,
    *,
    eps: float = 1.0,
    dt: float = 1.0,
    max_time: float = 1e4,
    block: int = 64,
) -> tuple[np.ndarray, np.ndarray]:
    """First-passage times to 0 of Brownian paths started at ``eps``.

    Paths are Gaussian random walks with step variance ``dt``, advanced in
    blocks of ``block`` steps. Paths still positive at ``max_time`` are
    censored.

    Returns
    -------
    lengths : ndarray
        Passage times (``max_time`` for censored paths).
    censored : ndarray of bool
    """
    if not (eps > 0 and dt > 0 and max_time > dt):
        raise ParameterError("need eps > 0, dt > 0 and max_time > dt")
    gen = as_generator(rng)
    max_steps = int(max_time / dt)
    pos = np.full(n, float(eps))
    steps = np.zeros(n, dtype=np.int64)
    hit_any = np.zeros(n, dtype=bool)
    act = np.arange(n)
    sd = np.sqrt(dt)
    while act.size:
        walk = pos[act, None] + np.cumsum(gen.standard_normal((act.size, block)) * sd, axis=1)
        hit = walk <= 0.0
        any_hit = hit.any(axis=1)
        steps[act] += np.where(any_hit, np.argmax(hit, axis=1) + 1, block)
        pos[act] = walk[:, -1]
        hit_any[act[any_hit]] = True
        act = act[~any_hit & (steps[act] < max_steps)]
    censored = steps > max_steps
    censored |= ~hit_any
    lengths = np.minimum(steps, max_steps) * dt
    return lengths, censored


def censored_rank_slope(lengths: np.ndarray, censored: np.ndarray, lo: float, hi: float | None = None) -> float:
    """Rank-plot slope of ``log P[T > a]`` against ``log a`` on ``[lo, hi)``.

    The rank of an observed value counts every length at least as large,
    censored ones included, so censoring at ``hi`` does not bias the slope.
    """
    lengths = np.asarray(lengths, dtype=float)
    censored = np.asarray(censored, dtype=bool)
    hi = np.inf if hi is None else hi
    srt = np.sort(lengths)
    obs = lengths[(~censored) & (lengths >= lo) & (lengths < hi)]
    if obs.size < 3:
        raise ParameterError("too few observed lengths in range")
    rank = lengths.size - np.searchsorted(srt, obs, side="left")
    return float(np.polyfit(np.log(obs), np.log(rank / lengths.size), 1)[0])
