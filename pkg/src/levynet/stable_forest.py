"""Critical Galton-Watson forests with offspring in the alpha-stable domain.

The offspring law is ``P[xi = k] = p k^{-1-alpha}`` for ``k >= 1`` with
``p = 1/zeta(alpha)`` (so ``E[xi] = 1``) and ``P[xi = 0] = 1 - p zeta(1+alpha)``.
Its tail ``P[xi >= k] ~ (p/alpha) k^{-alpha}`` puts the Lukasiewicz walk in
the domain of attraction of the spectrally positive stable law with Levy
density ``p x^{-1-alpha}``, hence with mechanism ``psi(u) = c u^alpha``,
``c = p Gamma(-alpha)``.

Forests are stored in depth-first (left-to-right) order as a
:class:`ForestProfile` holding offspring counts, the Lukasiewicz walk,
the height process and the generation sizes.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Callable, Sequence

import numpy as np
from scipy.special import gamma, zeta

from . import kernels
from .errors import BudgetExceededError, ParameterError, RangeError, StructureError
from .parallel import pmap
from .rng import as_generator, generator
from .stable_levy import check_alpha

__all__ = [
    "OffspringLaw",
    "offspring_law",
    "ForestProfile",
    "height_process",
    "brute_force_heights",
    "level_profile",
    "attachment_positions",
    "pooled_attachment_positions",
    "sample_forest",
    "sample_conditioned_forest",
    "map_conditioned_forests",
    "default_roots",
    "generation_sizes",
]

_TABLE_SIZE = 1024
_GUIDE_SIZE = 4096
_CHUNK = 1 << 14


@dataclass(frozen=True, eq=False)
class OffspringLaw:
    """Critical offspring law with tail index ``alpha``.

    Attributes
    ----------
    p : float
        Weight of the power law, ``1/zeta(alpha)``.
    p0 : float
        Atom at zero, ``1 - p zeta(1 + alpha)``.
    cdf : ndarray
        ``P[xi <= k]`` for ``k < len(cdf)``; larger values are drawn from the
        exact tail by rejection.
    """

    alpha: float
    p: float
    p0: float
    cdf: np.ndarray
    guide: np.ndarray

    @property
    def mean(self) -> float:
        """``p zeta(alpha)``, equal to 1 up to rounding."""
        return float(self.p * zeta(self.alpha))

    @property
    def variance_infinite(self) -> bool:
        return True

    @property
    def psi_constant(self) -> float:
        """``c`` in the limiting mechanism ``psi(u) = c u^alpha``."""
        return float(self.p * gamma(-self.alpha))

    def pmf(self, k: int | np.ndarray) -> np.ndarray | float:
        k = np.asarray(k)
        kk = np.where(k >= 1, k, 1).astype(float)
        out = np.where(k == 0, self.p0, np.where(k >= 1, self.p * kk ** (-1.0 - self.alpha), 0.0))
        return float(out) if out.ndim == 0 else out

    def tail(self, k: int) -> float:
        """``P[xi >= k]`` for ``k >= 1`` via the Hurwitz zeta function."""
        if k < 1:
            return 1.0
        return float(self.p * zeta(1.0 + self.alpha, k))

    def sample(self, size: int, rng: np.random.Generator | int | None = None) -> np.ndarray:
        """Independent draws by table inversion plus an exact tail sampler."""
        gen = as_generator(rng)
        u = gen.random(size)
        xi = np.searchsorted(self.cdf, u, side="right").astype(np.int64)
        big = np.flatnonzero(xi == self.cdf.size)
        for i in big:
            xi[i] = _sample_tail(self.alpha, self.cdf.size, gen)
        return xi


def offspring_law(alpha: float) -> OffspringLaw:
    """The critical power-law offspring distribution with tail index ``alpha``."""
    alpha = check_alpha(alpha)
    p = 1.0 / float(zeta(alpha))
    p0 = 1.0 - p * float(zeta(1.0 + alpha))
    ks = np.arange(1, _TABLE_SIZE, dtype=float)
    cdf = np.concatenate([[p0], p0 + np.cumsum(p * ks ** (-1.0 - alpha))])
    guide = np.searchsorted(cdf, np.arange(_GUIDE_SIZE) / _GUIDE_SIZE, side="right").astype(np.int64)
    return OffspringLaw(alpha, p, p0, cdf, guide)


def _sample_tail(alpha: float, kmin: int, gen: np.random.Generator) -> int:
    # Law proportional to k^{-1-alpha} on k >= kmin. Proposal floor(Y) with
    # Y Pareto on [kmin, inf); the likelihood ratio is decreasing in k.
    def ratio(k: float) -> float:
        return k ** (-1.0 - alpha) / (k ** (-alpha) - (k + 1.0) ** (-alpha))

    top = ratio(float(kmin))
    while True:
        k = math.floor(kmin * gen.random() ** (-1.0 / alpha))
        if gen.random() * top <= ratio(float(k)):
            return int(k)


def _validate_walk(walk: np.ndarray) -> np.ndarray:
    w = np.asarray(walk)
    if w.ndim != 1 or w.size < 2:
        raise StructureError("walk must be a 1-d array with at least two entries")
    if not np.issubdtype(w.dtype, np.integer):
        if not np.all(np.asarray(w, dtype=float) == np.round(w)):
            raise StructureError("walk must be integer valued")
    w = w.astype(np.int64)
    if w[0] != 0:
        raise StructureError("walk must start at 0")
    if np.any(np.diff(w) < -1):
        raise StructureError("walk steps must be >= -1")
    if w[-1] >= 0 or w[:-1].min() <= w[-1]:
        raise StructureError("walk must first reach its final negative value at the end")
    return np.ascontiguousarray(w)


def height_process(walk: Sequence[int] | np.ndarray) -> np.ndarray:
    """Height process of a Lukasiewicz walk.

    ``heights[k]`` is the number of ``j < k`` with
    ``walk[j] = min(walk[j..k])``; computed in linear time with a monotone
    stack.

    Parameters
    ----------
    walk : array of int, length ``n + 1``
        Starts at 0, steps ``>= -1``, and first reaches its final value
        ``-(number of trees)`` at the last index.

    Raises
    ------
    StructureError
        If ``walk`` is not a Lukasiewicz walk.

    Examples
    --------
    >>> height_process([0, 1, 0, -1]).tolist()
    [0, 1, 1]
    """
    return kernels.height_process(_validate_walk(np.asarray(walk)))


def brute_force_heights(walk: Sequence[int] | np.ndarray) -> np.ndarray:
    """Quadratic evaluation of the weak-record count, for testing."""
    w = np.asarray(walk, dtype=np.int64)
    n = w.size - 1
    out = np.zeros(n, dtype=np.int64)
    for k in range(n):
        seg = w[: k + 1]
        suffix_min = np.minimum.accumulate(seg[::-1])[::-1]
        out[k] = int(np.count_nonzero(seg[:k] == suffix_min[:k]))
    return out


def level_profile(heights: Sequence[int] | np.ndarray) -> np.ndarray:
    """Number of vertices at each generation."""
    h = np.asarray(heights, dtype=np.int64)
    if h.size == 0:
        return np.zeros(0, dtype=np.int64)
    if h.min() < 0:
        raise StructureError("heights must be nonnegative")
    return np.bincount(h)


@dataclass(frozen=True, eq=False)
class ForestProfile:
    """A plane forest in depth-first order.

    Attributes
    ----------
    offspring_counts : ndarray of int
        Children of each vertex, depth-first.
    walk : ndarray of int, length ``n + 1``
        ``walk[k+1] - walk[k] = offspring_counts[k] - 1``.
    heights : ndarray of int
        Generation of each vertex.
    level_counts : ndarray of int
        Generation sizes.
    """

    alpha: float
    offspring_counts: np.ndarray
    walk: np.ndarray
    heights: np.ndarray
    level_counts: np.ndarray
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_offspring(cls, alpha: float, offspring: Sequence[int] | np.ndarray, meta: dict | None = None) -> "ForestProfile":
        """Build a profile from depth-first offspring counts.

        Raises
        ------
        StructureError
            If the counts do not describe a finite forest that ends exactly
            with its last vertex.
        """
        xi = np.ascontiguousarray(offspring, dtype=np.int64)
        if xi.ndim != 1 or xi.size == 0:
            raise StructureError("empty forest")
        if xi.min() < 0:
            raise StructureError("offspring counts must be nonnegative")
        walk = np.concatenate([[0], np.cumsum(xi - 1)]).astype(np.int64)
        heights = height_process(walk)
        return cls(alpha, xi, walk, heights, np.bincount(heights), dict(meta or {}))

    @property
    def n(self) -> int:
        return int(self.offspring_counts.size)

    @property
    def roots(self) -> int:
        return int(-self.walk[-1])

    @property
    def max_height(self) -> int:
        return int(self.level_counts.size - 1)

    @cached_property
    def tree_ends(self) -> np.ndarray:
        """Index one past the last vertex of each tree."""
        w = self.walk
        return np.searchsorted(-np.minimum.accumulate(w), np.arange(1, self.roots + 1)).astype(np.int64)

    def subforest(self, first: int, last: int | None = None) -> "ForestProfile":
        """The forest formed by trees ``first .. last - 1`` (0-based)."""
        last = self.roots if last is None else last
        if not 0 <= first < last <= self.roots:
            raise RangeError("tree range out of bounds")
        ends = self.tree_ends
        a = 0 if first == 0 else int(ends[first - 1])
        b = int(ends[last - 1])
        xi = self.offspring_counts[a:b]
        walk = self.walk[a : b + 1] - self.walk[a]
        h = self.heights[a:b]
        return ForestProfile(self.alpha, xi, walk, h, np.bincount(h), {"parent_range": (first, last)})

    def check(self) -> None:
        """Assert the walk/height/level invariants exactly.

        Raises
        ------
        StructureError
            On any violation.
        """
        if not np.array_equal(np.diff(self.walk), self.offspring_counts - 1):
            raise StructureError("walk increments differ from offspring - 1")
        if not np.array_equal(height_process(self.walk), self.heights):
            raise StructureError("heights inconsistent with walk")
        if not np.array_equal(level_profile(self.heights), self.level_counts):
            raise StructureError("level counts inconsistent with heights")
        if int(self.level_counts.sum()) != self.n:
            raise StructureError("level counts do not sum to the vertex count")
        # Generation h+1 is exactly the children of generation h.
        kids = np.bincount(self.heights, weights=self.offspring_counts, minlength=self.level_counts.size)
        if not np.array_equal(kids[:-1].astype(np.int64), self.level_counts[1:]) or kids[-1] != 0:
            raise StructureError("generation sizes do not match offspring totals")

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "n": self.n,
            "walk": self.walk.tolist(),
            "heights": self.heights.tolist(),
            "level_counts": self.level_counts.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ForestProfile":
        walk = np.asarray(d["walk"], dtype=np.int64)
        prof = cls.from_offspring(d["alpha"], np.diff(walk) + 1)
        if "heights" in d and not np.array_equal(prof.heights, d["heights"]):
            raise StructureError("stored heights inconsistent with walk")
        return prof

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def attachment_positions(profile: ForestProfile, level: int, min_offspring: int) -> np.ndarray:
    """Normalized boundary positions of the large vertices at one generation.

    For every vertex at ``level`` with at least ``min_offspring`` children,
    the number of same-generation vertices strictly to its right in
    depth-first order, divided by the generation size.

    Raises
    ------
    RangeError
        If the generation is empty.
    """
    if level < 0 or level >= profile.level_counts.size or profile.level_counts[level] == 0:
        raise RangeError(f"generation {level} is empty")
    idx = np.flatnonzero(profile.heights == level)
    z = idx.size
    big = np.flatnonzero(profile.offspring_counts[idx] >= min_offspring)
    return (z - 1 - big) / z


def pooled_attachment_positions(
    profile: ForestProfile,
    min_offspring: int,
    rng: np.random.Generator | int | None = None,
) -> np.ndarray:
    """Attachment positions of all large vertices, pooled over generations.

    With ``rng`` each position ``j / z`` is spread uniformly over
    ``[j / z, (j + 1) / z)``. A uniform rank then gives an exactly uniform
    position, which removes the lattice effect from continuous-law tests.
    """
    h = profile.heights
    order = np.argsort(h, kind="stable")
    counts = profile.level_counts
    starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
    rank = np.empty(h.size, dtype=np.int64)
    rank[order] = np.arange(h.size) - starts[h[order]]
    big = np.flatnonzero(profile.offspring_counts >= min_offspring)
    z = counts[h[big]]
    right = z - 1 - rank[big]
    if rng is None:
        return right / z
    gen = as_generator(rng)
    return (right + gen.random(big.size)) / z


def default_roots(alpha: float, n: int) -> int:
    """Root count ``round(n^{1/alpha})``, so the rescaled initial mass is 1."""
    return max(1, int(round(n ** (1.0 / alpha))))


def _grow(
    law: OffspringLaw,
    roots: int,
    gen: np.random.Generator,
    limit: int,
    buf: np.ndarray,
) -> int:
    """Fill ``buf`` with depth-first offspring until ``roots`` trees close.

    Returns the vertex count, or -1 once ``limit`` vertices are exceeded.
    """
    target = -roots
    level = 0
    pos = 0
    while pos < limit:
        m = min(_CHUNK, limit - pos)
        u = gen.random(m)
        view = buf[pos : pos + m]
        j = 0
        while True:
            j, level, status = kernels.offspring_walk(u, j, law.cdf, law.guide, view, level, target)
            if status != 2:
                break
            val = _sample_tail(law.alpha, law.cdf.size, gen)
            view[j] = val
            level += val - 1
            j += 1
            if j == m:
                status = 0
                break
        pos += j
        if status == 1:
            return pos
    return -1


def sample_forest(
    alpha: float,
    roots: int,
    rng: np.random.Generator | int | None = None,
    *,
    max_vertices: int = 10_000_000,
) -> ForestProfile:
    """Unconditioned forest of ``roots`` independent trees.

    Raises
    ------
    BudgetExceededError
        If the forest exceeds ``max_vertices``; ``partial`` holds the offspring
        counts generated so far.
    """
    if roots < 1:
        raise ParameterError("need at least one root")
    law = offspring_law(alpha)
    gen = as_generator(rng)
    buf = np.empty(max_vertices, dtype=np.int64)
    size = _grow(law, roots, gen, max_vertices, buf)
    if size < 0:
        raise BudgetExceededError(f"forest larger than {max_vertices} vertices", partial=buf)
    return ForestProfile.from_offspring(alpha, buf[:size].copy(), {"roots": roots, "conditioned": False})


def sample_conditioned_forest(
    alpha: float,
    n: int,
    rng: np.random.Generator | int | None = None,
    *,
    roots: int | None = None,
    window: float = 0.1,
    max_trials: int = 1_000_000,
) -> ForestProfile:
    """Forest conditioned on its size lying in ``[n, (1 + window) n]``.

    Whole forests are drawn and rejected until the size falls in the window;
    generation stops as soon as the window is overshot. ``roots`` defaults to
    :func:`default_roots`.

    Raises
    ------
    BudgetExceededError
        After ``max_trials`` rejected forests.
    """
    alpha = check_alpha(alpha)
    if n < 1 or window < 0:
        raise ParameterError("need n >= 1 and window >= 0")
    k = default_roots(alpha, n) if roots is None else int(roots)
    if k < 1 or k > n:
        raise ParameterError("roots must lie in [1, n]")
    law = offspring_law(alpha)
    gen = as_generator(rng)
    hi = int(math.floor((1.0 + window) * n))
    buf = np.empty(hi, dtype=np.int64)
    for trial in range(1, max_trials + 1):
        size = _grow(law, k, gen, hi, buf)
        if size >= n:
            meta = {"roots": k, "conditioned": True, "n": n, "window": window, "trials": trial}
            return ForestProfile.from_offspring(alpha, buf[:size].copy(), meta)
    raise BudgetExceededError(f"no forest of size in [{n}, {hi}] after {max_trials} trials", partial=None)


def _forest_job(args: tuple) -> Any:
    fn, alpha, n, roots, window, root_seed, name, i = args
    prof = sample_conditioned_forest(alpha, n, generator(root_seed, name, i), roots=roots, window=window)
    return fn(prof)


def map_conditioned_forests(
    fn: Callable[[ForestProfile], Any],
    alpha: float,
    n: int,
    count: int,
    root_seed: int,
    *,
    roots: int | None = None,
    window: float = 0.1,
    name: str = "forest",
    jobs: int = 1,
) -> list[Any]:
    """Apply ``fn`` to ``count`` independent size-conditioned forests.

    Forest ``i`` is drawn from stream ``(root_seed, name, i)``, so results do
    not depend on ``jobs``. Only the outputs of ``fn`` are kept, which bounds
    memory for large ensembles; ``fn`` must be picklable when ``jobs > 1``.
    """
    items = [(fn, alpha, n, roots, window, root_seed, name, i) for i in range(count)]
    return pmap(_forest_job, items, jobs)


def generation_sizes(
    alpha: float,
    roots: int,
    generations: int,
    rng: np.random.Generator | int | None = None,
) -> np.ndarray:
    """Breadth-first generation sizes ``Z_0 = roots, ..., Z_generations``.

    Unconditioned Galton-Watson dynamics: ``Z_{h+1}`` is a sum of ``Z_h``
    independent offspring counts. Cost is linear in the vertices visited.
    """
    if roots < 1 or generations < 0:
        raise ParameterError("need roots >= 1 and generations >= 0")
    law = offspring_law(alpha)
    gen = as_generator(rng)
    z = np.zeros(generations + 1, dtype=np.int64)
    z[0] = roots
    for h in range(generations):
        if z[h] == 0:
            break
        z[h + 1] = int(law.sample(int(z[h]), gen).sum())
    return z
