"""Breadth-first Levy-net skeletons and the laws attached to them.

A skeleton is a boundary-length process ``Z`` (an alpha-stable CSBP in the
radius variable) together with one attachment point per jump, uniform on the
boundary just before the jump. This module builds skeletons from discrete
forests, simulates the pair of CSBPs cut out by two geodesics, counts the
coalescence blocks of a boundary segment, and samples the Poisson slice model
whose merge depths are Frechet distributed.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .csbp import CsbpPath, extinction_tail, simulate_csbp
from .errors import ParameterError, RangeError, StructureError
from .rng import as_generator
from .stable_forest import ForestProfile, pooled_attachment_positions
from .stable_levy import check_alpha, sample_stable_increment

__all__ = [
    "LevyNetSkeleton",
    "skeleton_from_profile",
    "rank_plot_slope",
    "GeodesicPair",
    "GeodesicEnsemble",
    "geodesic_pair",
    "geodesic_ensemble",
    "coalescence_mean_block",
    "coalescence_count",
    "coalescence_counts",
    "restarted_csbp_sup",
    "SliceSurface",
    "SliceBatch",
    "sample_slice_ppp",
    "sample_slice_batch",
    "slice_merge_depth",
    "frechet_cdf",
    "slice_floor",
    "merge_depth_scale",
]


# --------------------------------------------------------------------------
# Skeletons


@dataclass(frozen=True, eq=False)
class LevyNetSkeleton:
    """Boundary-length process with its jumps and attachment points.

    Attributes
    ----------
    z_times, z_values : ndarray
        ``Z`` is piecewise constant, equal to ``z_values[i]`` on
        ``[z_times[i], z_times[i+1])``; the last value is 0.
    jumps : ndarray, shape (k, 3)
        ``(time, size, attachment)`` ordered by time then attachment; the
        attachment lies in ``[0, Z(time-)]``.
    total_depth : float
        Time at which ``Z`` is absorbed at 0.
    """

    alpha: float
    z_times: np.ndarray
    z_values: np.ndarray
    jumps: np.ndarray
    total_depth: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        check_alpha(self.alpha)
        t = np.asarray(self.z_times, dtype=float)
        z = np.asarray(self.z_values, dtype=float)
        j = np.asarray(self.jumps, dtype=float).reshape(-1, 3)
        object.__setattr__(self, "z_times", t)
        object.__setattr__(self, "z_values", z)
        object.__setattr__(self, "jumps", j)
        if t.shape != z.shape or t.ndim != 1 or t.size == 0:
            raise StructureError("z_times and z_values must be 1-d of equal length")
        if np.any(np.diff(t) <= 0):
            raise StructureError("z_times must increase")
        if np.any(z < 0):
            raise StructureError("boundary lengths must be nonnegative")
        if z[-1] != 0 or t[-1] != self.total_depth:
            raise StructureError("Z must be absorbed at 0 at total_depth")
        if j.size:
            pre = self.z_before(j[:, 0])
            if np.any(j[:, 2] < 0) or np.any(j[:, 2] > pre):
                raise StructureError("attachment outside [0, Z(t-)]")

    def z_before(self, t: float | np.ndarray) -> np.ndarray:
        """Left limit ``Z(t-)``."""
        idx = np.searchsorted(self.z_times, np.asarray(t, dtype=float), side="left") - 1
        return self.z_values[np.clip(idx, 0, None)]

    def z_at(self, t: float | np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self.z_times, np.asarray(t, dtype=float), side="right") - 1
        return self.z_values[np.clip(idx, 0, None)]

    @property
    def sum_squared_jumps(self) -> float:
        return float(np.sum(self.jumps[:, 1] ** 2))

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "depth": self.total_depth,
            "t": self.z_times.tolist(),
            "z": self.z_values.tolist(),
            "jumps": [{"t": a, "size": b, "attach": c} for a, b, c in self.jumps.tolist()],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LevyNetSkeleton":
        jumps = np.array([[j["t"], j["size"], j["attach"]] for j in d["jumps"]]).reshape(-1, 3)
        return cls(d["alpha"], np.asarray(d["t"]), np.asarray(d["z"]), jumps, float(d["depth"]))

    def to_json(self) -> str:
        """One JSON-lines record."""
        return json.dumps(self.to_dict())


def skeleton_from_profile(
    profile: ForestProfile,
    rng: np.random.Generator | int | None = None,
    *,
    min_size: int = 1,
    n: int | None = None,
) -> LevyNetSkeleton:
    """Rescaled breadth-first skeleton of a forest.

    Generation ``h`` becomes time ``h / n^{1-1/alpha}`` and its size is divided
    by ``n^{1/alpha}``. Every vertex with at least ``1 + min_size`` children is
    a jump of size ``(children - 1) / n^{1/alpha}`` at the next generation;
    its attachment is the rescaled count of same-generation vertices strictly
    to its right. With ``rng`` the attachment is spread uniformly over its
    lattice cell.

    Parameters
    ----------
    n : int, optional
        Size used for rescaling, default the vertex count.

    Raises
    ------
    StructureError
        If the forest is empty.

    Notes
    -----
    Times are in the forest's own units; the limiting CSBP has mechanism
    ``c u^alpha`` with ``c = offspring_law(alpha).psi_constant``.
    """
    if profile.n == 0:
        raise StructureError("empty forest")
    alpha = profile.alpha
    n = profile.n if n is None else int(n)
    sc = n ** (1.0 / alpha)
    tc = n / sc
    lc = profile.level_counts
    H = lc.size
    z_times = np.arange(H + 1) / tc
    z_values = np.concatenate([lc / sc, [0.0]])
    xi = profile.offspring_counts
    big = np.flatnonzero(xi - 1 >= min_size)
    pos = pooled_attachment_positions(profile, 1 + min_size, rng)
    h = profile.heights[big]
    attach = pos * lc[h] / sc
    jumps = np.column_stack([(h + 1) / tc, (xi[big] - 1) / sc, attach])
    order = np.lexsort((jumps[:, 2], jumps[:, 0]))
    meta = {"n": n, "length_scale": sc, "time_scale": tc}
    return LevyNetSkeleton(alpha, z_times, z_values, jumps[order], float(z_times[-1]), meta)


def rank_plot_slope(sizes: Sequence[float] | np.ndarray, top: int | None = None) -> float:
    """Least-squares slope of ``log(rank)`` on ``log(size)`` for the largest values.

    A tail ``P[S > s] ~ s^{-a}`` gives slope ``-a``.
    """
    s = np.sort(np.asarray(sizes, dtype=float))[::-1]
    s = s[s > 0]
    if top is not None:
        s = s[:top]
    if s.size < 3:
        raise ParameterError("need at least three positive sizes")
    rank = np.arange(1, s.size + 1)
    return float(np.polyfit(np.log(s), np.log(rank), 1)[0])


# --------------------------------------------------------------------------
# Geodesic pairs


@dataclass(frozen=True, eq=False)
class GeodesicPair:
    """Boundary lengths ``A``, ``B`` on the two sides of a pair of geodesics."""

    a_path: CsbpPath
    b_path: CsbpPath
    merge_time: float

    @property
    def merge_side(self) -> str | None:
        """``"a"`` or ``"b"`` for the side that vanishes first."""
        za, zb = self.a_path.absorption_time, self.b_path.absorption_time
        if math.isinf(za) and math.isinf(zb):
            return None
        return "a" if za < zb else "b"


@dataclass
class GeodesicEnsemble:
    """Independent geodesic pairs observed on a common grid.

    Attributes
    ----------
    a, b : ndarray, shape (n, len(grid))
    zeta_a, zeta_b : ndarray
        Extinction times (``inf`` past the grid end).
    """

    alpha: float
    a0: float
    b0: float
    grid: np.ndarray
    a: np.ndarray
    b: np.ndarray
    zeta_a: np.ndarray
    zeta_b: np.ndarray

    @property
    def merge_time(self) -> np.ndarray:
        """First grid time at which either side is 0 (``inf`` if none)."""
        dead = (self.a == 0) | (self.b == 0)
        first = np.argmax(dead, axis=1)
        return np.where(dead.any(axis=1), self.grid[first], np.inf)

    @property
    def a_first(self) -> np.ndarray:
        """True where side ``A`` vanishes first."""
        return self.zeta_a < self.zeta_b

    def ratio(self) -> tuple[np.ndarray, np.ndarray]:
        """``A/(A+B)`` per grid time and the mask of defined entries."""
        tot = self.a + self.b
        ok = tot > 0
        r = np.divide(self.a, tot, out=np.full_like(tot, np.nan), where=ok)
        return r, ok


def geodesic_ensemble(
    alpha: float,
    a0: float,
    b0: float,
    grid: Sequence[float],
    n: int,
    rng: np.random.Generator | int | None = None,
    **kw,
) -> GeodesicEnsemble:
    """``n`` independent pairs of CSBPs from ``a0`` and ``b0``."""
    if not (a0 > 0 and b0 > 0):
        raise ParameterError("a0 and b0 must be positive")
    g = np.asarray(sorted(float(t) for t in grid))
    if g.size == 0 or g[0] < 0:
        raise ParameterError("grid must be nonempty and nonnegative")
    pos = g[g > 0]
    y0 = np.concatenate([np.full(n, float(a0)), np.full(n, float(b0))])
    ens = simulate_csbp(alpha, y0, pos, rng=rng, **kw)
    vals = ens.values
    if g[0] == 0:
        vals = np.column_stack([y0, vals])
    return GeodesicEnsemble(alpha, a0, b0, g, vals[:n], vals[n:], ens.zeta[:n], ens.zeta[n:])


def geodesic_pair(
    alpha: float,
    a0: float,
    b0: float,
    grid: Sequence[float],
    rng: np.random.Generator | int | None = None,
    **kw,
) -> GeodesicPair:
    """Two independent CSBPs on a common grid and their first zero.

    ``merge_time`` is the first grid time at which either side is 0.
    """
    ens = geodesic_ensemble(alpha, a0, b0, grid, 1, rng, **kw)
    g = ens.grid
    a = CsbpPath(alpha, g, ens.a[0], float(ens.zeta_a[0]), {"side": "a"})
    b = CsbpPath(alpha, g, ens.b[0], float(ens.zeta_b[0]), {"side": "b"})
    return GeodesicPair(a, b, float(ens.merge_time[0]))


# --------------------------------------------------------------------------
# Coalescence blocks


def coalescence_mean_block(alpha: float, eps: float) -> float:
    """``m_eps = ((alpha - 1) eps)^{1/(alpha-1)}``.

    A CSBP from mass ``x`` survives time ``eps`` with probability
    ``1 - exp(-x / m_eps)``.
    """
    alpha = check_alpha(alpha)
    if not eps > 0:
        raise ParameterError("eps must be positive")
    return ((alpha - 1.0) * eps) ** (1.0 / (alpha - 1.0))


def _piece_survival(alpha: float, delta: float, eps: float) -> float:
    return float(extinction_tail(alpha, delta, eps))


def coalescence_counts(
    alpha: float,
    length: float,
    eps: float,
    runs: int,
    rng: np.random.Generator | int | None = None,
    *,
    delta: float | None = None,
    survival: str = "exact",
) -> np.ndarray:
    """Block counts of a boundary segment for ``runs`` independent segments.

    The segment ``[0, length]`` is cut into pieces of mass ``delta``
    (default ``m_eps / 100``), each carrying an independent CSBP. Walking
    left to right, a new block starts at every piece whose CSBP survives time
    ``eps``; gaps between blocks are geometric in the piece count. The block
    count is Poisson with mean ``length / m_eps`` in the limit
    ``delta / m_eps -> 0``.

    Parameters
    ----------
    survival : {"exact", "simulate"}
        Survival probability of a piece from the closed extinction law, or
        estimated from simulated CSBPs (slow; for cross-checks).
    """
    if not (length > 0 and eps > 0):
        raise ParameterError("length and eps must be positive")
    m = coalescence_mean_block(alpha, eps)
    delta = m / 100.0 if delta is None else float(delta)
    if delta > m / 10.0:
        warnings.warn(f"piece mass {delta:.3g} is not small against m_eps = {m:.3g}", RuntimeWarning, stacklevel=2)
    gen = as_generator(rng)
    pieces = int(math.floor(length / delta))
    if survival == "exact":
        q = _piece_survival(alpha, delta, eps)
    elif survival == "simulate":
        sims = max(10_000, 20 * pieces)
        ens = simulate_csbp(alpha, delta, [eps], sims, rng=gen)
        q = float(np.mean(ens.values[:, 0] > 0))
    else:
        raise ParameterError(f"unknown survival mode {survival!r}")
    counts = np.zeros(runs, dtype=np.int64)
    if pieces == 0 or q == 0.0:
        return counts
    pos = np.zeros(runs, dtype=np.int64)
    active = np.arange(runs)
    while active.size:
        pos[active] += gen.geometric(q, active.size)
        inside = pos[active] <= pieces
        counts[active[inside]] += 1
        active = active[inside]
    return counts


def coalescence_count(
    alpha: float,
    length: float,
    eps: float,
    rng: np.random.Generator | int | None = None,
    **kw,
) -> int:
    """Number of coalescence blocks of one boundary segment of ``length``."""
    return int(coalescence_counts(alpha, length, eps, 1, rng, **kw)[0])


def restarted_csbp_sup(
    alpha: float,
    eps: float,
    t_max: float,
    n: int,
    rng: np.random.Generator | int | None = None,
    *,
    h: float = 2e-3,
    h_min: float = 1e-5,
) -> np.ndarray:
    """Supremum over ``[0, t_max]`` of a CSBP restarted at ``eps`` upon extinction.

    Uses the stepping rule of :func:`levynet.csbp.simulate_csbp`.
    """
    alpha = check_alpha(alpha)
    if not (eps > 0 and t_max > 0):
        raise ParameterError("eps and t_max must be positive")
    gen = as_generator(rng)
    y = np.full(n, float(eps))
    t = np.zeros(n)
    sup = y.copy()
    act = np.arange(n)
    while act.size:
        ya = y[act]
        hk = np.minimum(np.clip(h * ya ** (alpha - 1.0), h_min, h), t_max - t[act])
        new = ya + (ya * hk) ** (1.0 / alpha) * sample_stable_increment(alpha, 1.0, gen, act.size)
        new = np.where(new <= 0.0, eps, new)
        y[act] = new
        t[act] += hk
        sup[act] = np.maximum(sup[act], new)
        act = act[t[act] < t_max]
    return sup


# --------------------------------------------------------------------------
# Slice model


def frechet_cdf(x: float | np.ndarray, beta: float, width: float = 1.0) -> np.ndarray | float:
    """``exp(-width * beta * x^{-1/beta})``, the law of the largest mark over ``width``."""
    x = np.asarray(x, dtype=float)
    xs = np.where(x > 0, x, 1.0)
    out = np.where(x > 0, np.exp(-width * beta * xs ** (-1.0 / beta)), 0.0)
    return float(out) if out.ndim == 0 else out


def slice_floor(beta: float, min_width: float = 1e-2, tail: float = 1e-12) -> float:
    """Mark floor below which no interval of width ``>= min_width`` has its maximum,
    except with probability ``tail``."""
    return (min_width * beta / math.log(1.0 / tail)) ** beta


def merge_depth_scale(beta: float) -> float:
    """Factor ``lam`` with ``lam * dtilde`` distributed as a CSBP extinction time.

    The extinction time from mass ``l`` has CDF ``exp(-l (beta t)^{-1/beta})``
    with ``beta = alpha - 1``; the slice depth over width ``l`` has CDF
    ``exp(-l beta x^{-1/beta})``. Matching gives ``lam = beta^{-1-beta}``.
    """
    return beta ** (-1.0 - beta)


@dataclass(frozen=True, eq=False)
class SliceSurface:
    """One Poisson sample of slice positions and merge-depth marks.

    Points are a Poisson process on ``[0, 1] x [x_min, inf)`` with intensity
    ``ds x^{-1/beta - 1} dx``, sorted by position.
    """

    beta: float
    x_min: float
    positions: np.ndarray
    marks: np.ndarray

    def depth(self, a: float, b: float) -> float:
        return slice_merge_depth(a, b, self)


def _check_beta(beta: float) -> float:
    if not beta > 0:
        raise ParameterError("beta must be positive")
    return float(beta)


def sample_slice_ppp(
    beta: float,
    rng: np.random.Generator | int | None = None,
    *,
    x_min: float = 1e-3,
) -> SliceSurface:
    """Sample one slice surface with marks above ``x_min``.

    The point count is Poisson with mean ``beta x_min^{-1/beta}``, positions
    are uniform and marks are Pareto, ``x_min U^{-beta}``.
    """
    beta = _check_beta(beta)
    if not x_min > 0:
        raise ParameterError("x_min must be positive")
    gen = as_generator(rng)
    k = int(gen.poisson(beta * x_min ** (-1.0 / beta)))
    pos = gen.random(k)
    marks = x_min * (1.0 - gen.random(k)) ** (-beta)
    order = np.argsort(pos)
    return SliceSurface(beta, x_min, pos[order], marks[order])


def slice_merge_depth(a: float, b: float, surface: SliceSurface) -> float:
    """Largest mark with position in ``(a, b)``; 0 when ``a == b``.

    Raises
    ------
    RangeError
        If ``a > b`` or the interval leaves ``[0, 1]``.
    """
    if a > b:
        raise RangeError("need a <= b")
    if a < 0 or b > 1:
        raise RangeError("interval must lie in [0, 1]")
    if a == b:
        return 0.0
    lo = np.searchsorted(surface.positions, a, side="right")
    hi = np.searchsorted(surface.positions, b, side="left")
    return float(surface.marks[lo:hi].max()) if hi > lo else 0.0


@dataclass
class SliceBatch:
    """Many independent slice surfaces stored contiguously.

    Surface ``i`` owns points ``offsets[i]:offsets[i+1]``; positions are sorted
    within each surface.
    """

    beta: float
    x_min: float
    offsets: np.ndarray
    positions: np.ndarray
    marks: np.ndarray

    @property
    def size(self) -> int:
        return int(self.offsets.size - 1)

    def surface(self, i: int) -> SliceSurface:
        a, b = self.offsets[i], self.offsets[i + 1]
        return SliceSurface(self.beta, self.x_min, self.positions[a:b], self.marks[a:b])

    def depth(self, a: float, b: float) -> np.ndarray:
        """``slice_merge_depth(a, b)`` for every surface."""
        if a > b:
            raise RangeError("need a <= b")
        if a < 0 or b > 1:
            raise RangeError("interval must lie in [0, 1]")
        out = np.zeros(self.size)
        if a == b:
            return out
        sel = (self.positions > a) & (self.positions < b)
        owner = np.repeat(np.arange(self.size), np.diff(self.offsets))
        np.maximum.at(out, owner[sel], self.marks[sel])
        return out


def sample_slice_batch(
    beta: float,
    n: int,
    rng: np.random.Generator | int | None = None,
    *,
    x_min: float = 1e-3,
) -> SliceBatch:
    """``n`` independent slice surfaces (see :func:`sample_slice_ppp`)."""
    beta = _check_beta(beta)
    gen = as_generator(rng)
    counts = gen.poisson(beta * x_min ** (-1.0 / beta), n)
    total = int(counts.sum())
    owner = np.repeat(np.arange(n), counts)
    pos = gen.random(total)
    marks = x_min * (1.0 - gen.random(total)) ** (-beta)
    order = np.lexsort((pos, owner))
    offsets = np.concatenate([[0], np.cumsum(counts)])
    return SliceBatch(beta, x_min, offsets, pos[order], marks[order])
