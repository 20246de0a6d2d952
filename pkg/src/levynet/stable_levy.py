"""Spectrally positive alpha-stable Levy processes.

Normalisation: the Levy measure is ``nu(dx) = x^{-alpha-1} / Gamma(-alpha) dx``
on ``(0, inf)`` and the process is a martingale, so that

    E[exp(-lam X_t)] = exp(t lam^alpha).

This is the convention under which the CSBP obtained by the Lamperti time
change has branching mechanism ``psi(u) = u^alpha``.

Paths are simulated with the usual truncation scheme: jumps of size at least
``delta`` form a compound Poisson process, their compensator is an explicit
drift, and the jumps below ``delta`` are replaced by a Gaussian of matched
variance (or dropped). Marginal increments are available exactly through the
Chambers-Mallows-Stuck transform.

All path times live on a dyadic lattice of spacing ``2**-40`` so that the
reflection ``t -> T - t`` used by :func:`reverse_path` is exact in floating
point.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Literal

import numpy as np
from scipy.special import gamma as gamma_fn

from .errors import BudgetExceededError, ParameterError, RangeError
from .rng import as_generator

__all__ = [
    "TIME_QUANTUM",
    "StablePath",
    "ExcursionBatch",
    "check_alpha",
    "levy_constants",
    "sample_stable_increment",
    "sample_levy_path",
    "sample_excursion_approx",
    "excursion_batch",
    "exit_probability_oracle",
    "reverse_path",
    "extract_jumps",
]

TIME_QUANTUM = 2.0**-40

SmallJumps = Literal["gaussian", "drop"]


def check_alpha(alpha: float) -> float:
    """Validate a stability index in (1, 2)."""
    alpha = float(alpha)
    if not 1.0 < alpha < 2.0:
        raise ParameterError(f"alpha must lie in (1, 2), got {alpha}")
    return alpha


def _quantize(t: np.ndarray | float) -> np.ndarray:
    return np.round(np.asarray(t, dtype=float) / TIME_QUANTUM) * TIME_QUANTUM


def levy_constants(alpha: float, delta: float | np.ndarray) -> tuple[Any, Any, Any]:
    """Rate, compensator drift and small-jump variance at truncation ``delta``.

    Returns
    -------
    rate : jump rate ``nu([delta, inf))``
    comp : ``int_delta^inf x nu(dx)``, subtracted as a drift
    var : ``int_0^delta x^2 nu(dx)``, the variance rate of the small jumps
    """
    g = gamma_fn(-alpha)
    d = np.asarray(delta, dtype=float)
    rate = d ** (-alpha) / (alpha * g)
    comp = d ** (1.0 - alpha) / ((alpha - 1.0) * g)
    var = d ** (2.0 - alpha) / ((2.0 - alpha) * g)
    if np.ndim(delta) == 0:
        return float(rate), float(comp), float(var)
    return rate, comp, var


def sample_stable_increment(
    alpha: float,
    dt: float,
    rng: np.random.Generator | int | None = None,
    size: int | tuple[int, ...] | None = None,
) -> float | np.ndarray:
    """Exact draw(s) of ``X_dt`` by the Chambers-Mallows-Stuck transform.

    Skewness is fixed at +1 and the scale at ``|cos(pi alpha / 2)|^{1/alpha}``
    which yields ``E[exp(-lam X_1)] = exp(lam^alpha)``; a draw at time ``dt``
    is ``dt^{1/alpha}`` times a draw at time 1.

    Raises
    ------
    ParameterError
        If ``alpha`` is outside (1, 2) or ``dt <= 0``.
    """
    alpha = check_alpha(alpha)
    if not dt > 0:
        raise ParameterError(f"dt must be positive, got {dt}")
    gen = as_generator(rng)
    v = gen.uniform(-0.5 * math.pi, 0.5 * math.pi, size)
    w = gen.standard_exponential(size)
    tan = math.tan(0.5 * math.pi * alpha)
    b = math.atan(tan) / alpha
    s = (1.0 + tan * tan) ** (0.5 / alpha)
    av = alpha * (v + b)
    x = s * np.sin(av) / np.cos(v) ** (1.0 / alpha) * (np.cos(v - av) / w) ** ((1.0 - alpha) / alpha)
    scale = abs(math.cos(0.5 * math.pi * alpha)) ** (1.0 / alpha) * dt ** (1.0 / alpha)
    out = scale * x
    return float(out) if size is None else out


@dataclass(frozen=True, eq=False)
class StablePath:
    """A sampled path of a spectrally positive stable process.

    Attributes
    ----------
    alpha : float
        Stability index.
    times, values : ndarray
        Grid times (starting at 0, strictly increasing) and path values.
    jumps : ndarray, shape (k, 2)
        ``(time, size)`` of every resolved jump of absolute size at least
        ``truncation``, in time order. Sizes are positive for forward paths
        and negative for reversed ones.
    truncation : float
        Smallest resolved jump size.
    jump_levels : ndarray, shape (k, 2)
        Left and right limits of the path at each recorded jump.
    exit : {"zero", "cap", None}
        For excursion-type paths, which boundary stopped the path.
    """

    alpha: float
    times: np.ndarray
    values: np.ndarray
    jumps: np.ndarray
    truncation: float
    jump_levels: np.ndarray | None = None
    exit: str | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        check_alpha(self.alpha)
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        j = np.asarray(self.jumps, dtype=float).reshape(-1, 2)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "jumps", j)
        if self.jump_levels is not None:
            lv = np.asarray(self.jump_levels, dtype=float).reshape(-1, 2)
            if lv.shape[0] != j.shape[0]:
                raise ParameterError("jump_levels must have one row per jump")
            object.__setattr__(self, "jump_levels", lv)
        if t.ndim != 1 or t.shape != v.shape or t.size == 0:
            raise ParameterError("times and values must be 1-d arrays of equal length")
        if t[0] != 0.0 or np.any(np.diff(t) <= 0):
            raise ParameterError("times must start at 0 and increase strictly")
        if self.truncation < 0:
            raise ParameterError("truncation must be nonnegative")
        if j.size and np.any(np.abs(j[:, 1]) < self.truncation):
            raise ParameterError("recorded jump smaller than the truncation level")
        if j.size and np.any(np.diff(j[:, 0]) < 0):
            raise ParameterError("jumps must be in time order")
        if self.exit not in (None, "zero", "cap"):
            raise ParameterError(f"unknown exit flag {self.exit!r}")

    @property
    def duration(self) -> float:
        return float(self.times[-1])

    def to_dict(self) -> dict:
        """JSON-ready dictionary ``{alpha, truncation, times, values, jumps}``."""
        d = {
            "alpha": self.alpha,
            "truncation": self.truncation,
            "times": self.times.tolist(),
            "values": self.values.tolist(),
            "jumps": self.jumps.tolist(),
        }
        if self.jump_levels is not None:
            d["jump_levels"] = self.jump_levels.tolist()
        if self.exit is not None:
            d["exit"] = self.exit
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "StablePath":
        return cls(
            alpha=d["alpha"],
            times=np.asarray(d["times"], dtype=float),
            values=np.asarray(d["values"], dtype=float),
            jumps=np.asarray(d.get("jumps", []), dtype=float).reshape(-1, 2),
            truncation=d["truncation"],
            jump_levels=None if "jump_levels" not in d else np.asarray(d["jump_levels"]),
            exit=d.get("exit"),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, s: str) -> "StablePath":
        return cls.from_dict(json.loads(s))

    def same_as(self, other: "StablePath") -> bool:
        """Exact equality of all numeric content."""
        lv_eq = (self.jump_levels is None and other.jump_levels is None) or (
            self.jump_levels is not None
            and other.jump_levels is not None
            and np.array_equal(self.jump_levels, other.jump_levels)
        )
        return (
            self.alpha == other.alpha
            and self.truncation == other.truncation
            and np.array_equal(self.times, other.times)
            and np.array_equal(self.values, other.values)
            and np.array_equal(self.jumps, other.jumps)
            and lv_eq
        )


def _step_noise(
    alpha: float,
    x: np.ndarray,
    dt: np.ndarray,
    delta: np.ndarray,
    gen: np.random.Generator,
    small_jumps: SmallJumps,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """One truncation-scheme step for a vector of states.

    Returns the continuous part of each increment, and for every jump event
    its owner index, its time fraction within the step and its size.
    """
    rate, comp, var = levy_constants(alpha, delta)
    cont = -comp * dt
    if small_jumps == "gaussian":
        cont = cont + np.sqrt(var * dt) * gen.standard_normal(x.size)
    counts = gen.poisson(rate * dt)
    owner = np.repeat(np.arange(x.size), counts)
    sizes = delta[owner] * gen.random(owner.size) ** (-1.0 / alpha)
    frac = gen.random(owner.size)
    return cont, owner, frac, sizes


def sample_levy_path(
    alpha: float,
    t_max: float,
    dt: float = 1e-3,
    rng: np.random.Generator | int | None = None,
    *,
    truncation: float = 1e-4,
    x0: float = 0.0,
    small_jumps: SmallJumps = "gaussian",
) -> StablePath:
    """Unconditioned path on the uniform grid ``0, dt, ..., t_max``."""
    alpha = check_alpha(alpha)
    if not (t_max > 0 and dt > 0 and truncation > 0):
        raise ParameterError("t_max, dt and truncation must be positive")
    gen = as_generator(rng)
    n = int(math.ceil(t_max / dt - 1e-9))
    times = _quantize(np.arange(n + 1) * dt)
    steps = np.diff(times)
    delta = np.full(n, truncation)
    cont, owner, frac, sizes = _step_noise(alpha, np.zeros(n), steps, delta, gen, small_jumps)
    jump_sum = np.bincount(owner, sizes, n)
    values = x0 + np.concatenate([[0.0], np.cumsum(cont + jump_sum)])
    jt = _quantize(times[owner] + frac * steps[owner])
    jt = np.minimum(np.maximum(jt, times[owner]), times[owner + 1])
    order = np.lexsort((jt, owner))
    jt, sizes, owner, frac = jt[order], sizes[order], owner[order], frac[order]
    before = np.zeros(sizes.size)
    if sizes.size:
        csum = np.cumsum(sizes)
        start = np.searchsorted(owner, owner, side="left")
        before = csum - sizes - (csum[start] - sizes[start])
    left = values[owner] + frac * cont[owner] + before
    return StablePath(
        alpha=alpha,
        times=times,
        values=values,
        jumps=np.column_stack([jt, sizes]),
        truncation=truncation,
        jump_levels=np.column_stack([left, left + sizes]),
    )


@dataclass
class ExcursionBatch:
    """Summary of many first-passage excursions simulated together.

    Attributes
    ----------
    exit : ndarray of str
        ``"zero"`` or ``"cap"`` per excursion.
    lengths : ndarray
        Exit grid time per excursion.
    final : ndarray
        Value at the exit time.
    jump_owner, jump_time, jump_size, jump_left : ndarray
        Recorded jumps (size at least ``truncation``) with their excursion
        index, time, size and left-limit level.
    """

    alpha: float
    eps_start: float
    stop_cap: float
    truncation: float
    exit: np.ndarray
    lengths: np.ndarray
    final: np.ndarray
    jump_owner: np.ndarray
    jump_time: np.ndarray
    jump_size: np.ndarray
    jump_left: np.ndarray
    steps: int = 0

    def path(self, i: int) -> StablePath:
        """Coarse two-point :class:`StablePath` carrying excursion ``i``'s jumps."""
        sel = self.jump_owner == i
        jt, js, jl = self.jump_time[sel], self.jump_size[sel], self.jump_left[sel]
        return StablePath(
            alpha=self.alpha,
            times=np.array([0.0, self.lengths[i]]),
            values=np.array([self.eps_start, self.final[i]]),
            jumps=np.column_stack([jt, js]),
            truncation=self.truncation,
            jump_levels=np.column_stack([jl, jl + js]),
            exit=str(self.exit[i]),
        )


def excursion_batch(
    alpha: float,
    eps_start: float,
    stop_cap: float,
    n: int,
    rng: np.random.Generator | int | None = None,
    *,
    grid_dt: float = 1e-3,
    truncation: float | None = None,
    adaptive: float | None = None,
    rel_truncation: float | None = None,
    dt_min: float = 1e-9,
    small_jumps: SmallJumps = "gaussian",
    max_steps: int = 10_000_000,
) -> ExcursionBatch:
    """Simulate ``n`` independent paths from ``eps_start`` until they leave ``(0, stop_cap)``.

    Parameters
    ----------
    grid_dt : float
        Grid step; with ``adaptive`` set it is only an upper bound.
    truncation : float, optional
        Jumps at least this large are resolved and recorded. Defaults to
        ``1e-4 * stop_cap``.
    adaptive : float, optional
        Use the state-dependent step ``clip(adaptive * x^alpha, dt_min, grid_dt)``
        which keeps the relative size of one step constant.
    rel_truncation : float, optional
        Simulate jumps down to ``min(rel_truncation * x, truncation)``;
        jumps below ``truncation`` are applied but not recorded.

    Raises
    ------
    BudgetExceededError
        If some path is still inside the interval after ``max_steps`` steps.
    """
    alpha = check_alpha(alpha)
    if not 0.0 < eps_start < stop_cap:
        raise ParameterError("need 0 < eps_start < stop_cap")
    if not grid_dt > 0:
        raise ParameterError("grid_dt must be positive")
    gen = as_generator(rng)
    trunc = 1e-4 * stop_cap if truncation is None else float(truncation)
    if not trunc > 0:
        raise ParameterError("truncation must be positive")

    x = np.full(n, float(eps_start))
    t = np.zeros(n)
    exit_flag = np.empty(n, dtype=object)
    act = np.arange(n)
    rec_owner: list[np.ndarray] = []
    rec_time: list[np.ndarray] = []
    rec_size: list[np.ndarray] = []
    rec_left: list[np.ndarray] = []
    steps = 0
    while act.size:
        if steps >= max_steps:
            raise BudgetExceededError(
                f"{act.size} excursions still running after {max_steps} steps",
                partial={"active": act.copy(), "values": x[act].copy(), "times": t[act].copy()},
            )
        xa = x[act]
        if adaptive is None:
            dt = np.full(act.size, grid_dt)
        else:
            dt = np.clip(adaptive * xa**alpha, dt_min, grid_dt)
        dt = _quantize(np.maximum(dt, TIME_QUANTUM))
        if rel_truncation is None:
            delta = np.full(act.size, trunc)
        else:
            # scale of one step; equals x unless dt was clipped
            scale = xa if adaptive is None else np.maximum(xa, (dt / adaptive) ** (1.0 / alpha))
            delta = np.minimum(rel_truncation * scale, trunc)
        cont, owner, frac, sizes = _step_noise(alpha, xa, dt, delta, gen, small_jumps)
        new = xa + cont + np.bincount(owner, sizes, act.size)
        big = sizes >= trunc
        if np.any(big):
            # Left limits: continuous part pro rata plus earlier jumps in the step.
            order = np.lexsort((frac, owner))
            o, f, s = owner[order], frac[order], sizes[order]
            csum = np.cumsum(s)
            start = np.searchsorted(o, o, side="left")
            before = csum - s - (csum[start] - s[start])
            left = xa[o] + f * cont[o] + before
            keep = s >= trunc
            o, f, s, left = o[keep], f[keep], s[keep], left[keep]
            rec_owner.append(act[o])
            rec_time.append(t[act[o]] + f * dt[o])
            rec_size.append(s)
            rec_left.append(left)
        t[act] = _quantize(t[act] + dt)
        x[act] = new
        down = new <= 0.0
        up = new >= stop_cap
        exit_flag[act[down]] = "zero"
        exit_flag[act[up]] = "cap"
        act = act[~(down | up)]
        steps += 1

    if rec_owner:
        jo = np.concatenate(rec_owner)
        jt = np.concatenate(rec_time)
        js = np.concatenate(rec_size)
        jl = np.concatenate(rec_left)
        order = np.lexsort((jt, jo))
        jo, jt, js, jl = jo[order], jt[order], js[order], jl[order]
        # keep jump times on the lattice and inside their step
        jt = _quantize(jt)
    else:
        jo = np.zeros(0, dtype=np.int64)
        jt = js = jl = np.zeros(0)
    return ExcursionBatch(
        alpha=alpha,
        eps_start=float(eps_start),
        stop_cap=float(stop_cap),
        truncation=trunc,
        exit=exit_flag.astype(str),
        lengths=t,
        final=x,
        jump_owner=jo,
        jump_time=jt,
        jump_size=js,
        jump_left=jl,
        steps=steps,
    )


def sample_excursion_approx(
    alpha: float,
    eps_start: float,
    stop_cap: float,
    grid_dt: float = 1e-3,
    rng: np.random.Generator | int | None = None,
    *,
    truncation: float | None = None,
    small_jumps: SmallJumps = "gaussian",
    max_steps: int = 1_000_000,
) -> StablePath:
    """First-passage path from ``eps_start`` stopped on leaving ``(0, stop_cap)``.

    The path lives on the uniform grid of step ``grid_dt`` and stops at the
    first grid time its value is ``<= 0`` (``exit="zero"``) or
    ``>= stop_cap`` (``exit="cap"``). Normalising such paths into an
    excursion measure is left to the caller.

    Raises
    ------
    BudgetExceededError
        If the path has not stopped after ``max_steps`` steps; the partial
        path is attached as ``err.partial``.
    """
    alpha = check_alpha(alpha)
    if not 0.0 < eps_start < stop_cap:
        raise ParameterError("need 0 < eps_start < stop_cap")
    if not grid_dt > 0:
        raise ParameterError("grid_dt must be positive")
    gen = as_generator(rng)
    trunc = 1e-4 * stop_cap if truncation is None else float(truncation)
    dt = float(_quantize(grid_dt))
    block = 256
    values = [float(eps_start)]
    jt_all: list[np.ndarray] = []
    js_all: list[np.ndarray] = []
    jl_all: list[np.ndarray] = []
    x = float(eps_start)
    k = 0
    exit_flag = None
    while exit_flag is None:
        if k >= max_steps:
            partial = StablePath(
                alpha=alpha,
                times=_quantize(np.arange(len(values)) * dt),
                values=np.array(values),
                jumps=np.column_stack([np.concatenate(jt_all or [np.zeros(0)]),
                                       np.concatenate(js_all or [np.zeros(0)])]),
                truncation=trunc,
            )
            raise BudgetExceededError(f"path did not exit within {max_steps} steps", partial)
        m = min(block, max_steps - k)
        steps = np.full(m, dt)
        cont, owner, frac, sizes = _step_noise(
            alpha, np.zeros(m), steps, np.full(m, trunc), gen, small_jumps
        )
        incr = cont + np.bincount(owner, sizes, m)
        path = x + np.cumsum(incr)
        out = np.flatnonzero((path <= 0.0) | (path >= stop_cap))
        last = out[0] if out.size else m - 1
        order = np.lexsort((frac, owner))
        owner, frac, sizes = owner[order], frac[order], sizes[order]
        keep = owner <= last
        owner, frac, sizes = owner[keep], frac[keep], sizes[keep]
        if sizes.size:
            start_vals = np.concatenate([[x], path[:-1]])
            csum = np.cumsum(sizes)
            first = np.searchsorted(owner, owner, side="left")
            before = csum - sizes - (csum[first] - sizes[first])
            left = start_vals[owner] + frac * cont[owner] + before
            jt_all.append(_quantize((k + owner + frac) * dt))
            js_all.append(sizes)
            jl_all.append(left)
        values.extend(path[: last + 1].tolist())
        k += last + 1
        x = float(path[last])
        if out.size:
            exit_flag = "zero" if path[last] <= 0.0 else "cap"
        block = min(block * 2, 1 << 16)
    times = _quantize(np.arange(len(values)) * dt)
    jt = np.concatenate(jt_all) if jt_all else np.zeros(0)
    js = np.concatenate(js_all) if js_all else np.zeros(0)
    jl = np.concatenate(jl_all) if jl_all else np.zeros(0)
    return StablePath(
        alpha=alpha,
        times=times,
        values=np.asarray(values),
        jumps=np.column_stack([jt, js]),
        truncation=trunc,
        jump_levels=np.column_stack([jl, jl + js]),
        exit=exit_flag,
    )


def exit_probability_oracle(alpha: float, eps_start: float, stop_cap: float) -> float:
    """``P[exceed stop_cap before hitting 0]`` from ``eps_start``.

    For a spectrally positive process the downward passage is continuous and
    the two-sided exit problem is solved by the scale function
    ``W(x) = x^{alpha-1} / Gamma(alpha)`` of the dual process:
    ``P[hit 0 first] = W(cap - eps) / W(cap)``. Hence the answer
    ``1 - (1 - eps/cap)^{alpha-1}``, which is ``~ (alpha-1) eps / cap`` for small
    ``eps``.
    """
    alpha = check_alpha(alpha)
    if not 0.0 < eps_start < stop_cap:
        raise ParameterError("need 0 < eps_start < stop_cap")
    return -math.expm1((alpha - 1.0) * math.log1p(-eps_start / stop_cap))


def reverse_path(path: StablePath) -> StablePath:
    """Time reversal about the final time.

    Times map to ``T - t`` (exact on the dyadic time lattice), values are
    read backwards, jump sizes change sign and left/right limits swap. The
    map is an exact involution.
    """
    T = path.times[-1]
    times = T - path.times[::-1]
    values = path.values[::-1].copy()
    jumps = np.column_stack([T - path.jumps[::-1, 0], -path.jumps[::-1, 1]]) if path.jumps.size else path.jumps.copy()
    levels = None
    if path.jump_levels is not None:
        levels = path.jump_levels[::-1, ::-1].copy()
    return StablePath(
        alpha=path.alpha,
        times=times,
        values=values,
        jumps=jumps,
        truncation=path.truncation,
        jump_levels=levels,
        exit=path.exit,
        meta=dict(path.meta, reversed=not path.meta.get("reversed", False)),
    )


def extract_jumps(path: StablePath, threshold: float) -> list[tuple[float, float]]:
    """All recorded jumps with ``|size| >= threshold``, in time order.

    Raises
    ------
    ParameterError
        If ``threshold`` is below the path's truncation (smaller jumps were
        never resolved).
    """
    if threshold < path.truncation:
        raise ParameterError(
            f"threshold {threshold} is below the truncation {path.truncation}; "
            "those jumps were not resolved"
        )
    if threshold <= 0:
        raise ParameterError("threshold must be positive")
    sel = np.abs(path.jumps[:, 1]) >= threshold
    return [(float(t), float(s)) for t, s in path.jumps[sel]]
