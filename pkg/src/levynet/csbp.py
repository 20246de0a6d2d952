"""Continuous-state branching processes with mechanism ``psi(u) = u^alpha``.

A CSBP is obtained from a spectrally positive stable process ``X`` started at
``y0 > 0`` by the Lamperti time change ``Y_t = X_{theta_t}``,
``theta_t = int_0^t Y_s ds``, stopped when ``X`` reaches 0. :func:`lamperti`
applies this map to a stored Levy path; :func:`simulate_csbp` runs it on a
whole ensemble, advancing the Levy clock by ``Y h`` per CSBP step of length
``h`` with exact stable increments.

Closed forms used as oracles:

* ``E[exp(-lam Y_t)] = exp(-y0 u_t(lam))``,
  ``u_t(lam) = (lam^{1-alpha} + (alpha-1) t)^{1/(1-alpha)}``;
* ``P[zeta > t] = 1 - exp(-y0 ((alpha-1) t)^{1/(1-alpha)})`` for the
  extinction time ``zeta``, the ``lam -> inf`` limit of the former.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DegenerateSampleError, ParameterError
from .parallel import chunk_sizes, pmap
from .rng import as_generator
from .stable_levy import StablePath, check_alpha, sample_stable_increment

__all__ = [
    "CsbpPath",
    "CsbpEnsemble",
    "RatioEstimate",
    "lamperti",
    "lamperti_transform",
    "u_lambda",
    "extinction_tail",
    "extinction_cdf",
    "simulate_csbp",
    "csbp_path",
    "subordinator_ratio_estimate",
    "additivity_samples",
    "scaling_samples",
]


@dataclass(frozen=True, eq=False)
class CsbpPath:
    """A CSBP trajectory.

    Attributes
    ----------
    times, values : ndarray
        Increasing time grid and nonnegative values (piecewise constant
        between grid points).
    absorption_time : float
        First time the value is 0, ``inf`` if the path is not absorbed.
    source : dict
        Provenance of the path, e.g. the generating Levy path's metadata.
    """

    alpha: float
    times: np.ndarray
    values: np.ndarray
    absorption_time: float = math.inf
    source: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        check_alpha(self.alpha)
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)
        if t.ndim != 1 or t.shape != v.shape or t.size == 0:
            raise ParameterError("times and values must be 1-d arrays of equal length")
        if np.any(np.diff(t) < 0):
            raise ParameterError("times must be nondecreasing")
        if np.any(v < 0):
            raise ParameterError("CSBP values must be nonnegative")
        zero = np.flatnonzero(v == 0.0)
        if zero.size and np.any(v[zero[0]:] != 0.0):
            raise ParameterError("0 is absorbing")

    def value_at(self, t: float | np.ndarray) -> np.ndarray:
        """Piecewise-constant evaluation (0 at and after absorption)."""
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.times, t, side="right") - 1
        out = self.values[np.clip(idx, 0, None)]
        return np.where(t >= self.absorption_time, 0.0, out)

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "times": self.times.tolist(),
            "values": self.values.tolist(),
            "absorption_time": None if math.isinf(self.absorption_time) else self.absorption_time,
            "source": self.source,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CsbpPath":
        at = d.get("absorption_time")
        return cls(
            alpha=d["alpha"],
            times=np.asarray(d["times"]),
            values=np.asarray(d["values"]),
            absorption_time=math.inf if at is None else float(at),
            source=d.get("source", {}),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def lamperti(levy: StablePath, grid: np.ndarray | None = None) -> CsbpPath:
    """Lamperti time change of a Levy path into a CSBP path.

    The Levy path is read as piecewise constant on its grid; Levy-time step
    ``ds`` at value ``x > 0`` takes CSBP time ``ds / x``. The first grid value
    ``<= 0`` absorbs the path. With ``grid`` the result is sampled on that
    CSBP-time grid, otherwise it keeps the image of the Levy grid.

    Examples
    --------
    A constant Levy path ``c`` gives the constant CSBP ``c`` with
    ``t = s / c``. A Levy path equal to 2 on ``[0, 1)`` and 0 afterwards
    becomes 2 on ``[0, 1/2)`` and is absorbed at ``1/2``.

    Raises
    ------
    ParameterError
        If the Levy path does not start at a positive value.
    """
    x = levy.values
    if not x[0] > 0:
        raise ParameterError("Lamperti transform needs a positive starting value")
    dead = np.flatnonzero(x <= 0.0)
    end = dead[0] if dead.size else x.size
    ds = np.diff(levy.times[: end + 1]) if dead.size else np.diff(levy.times)
    live = x[: ds.size]
    t = np.concatenate([[0.0], np.cumsum(ds / live)])
    if dead.size:
        vals = np.concatenate([x[:end], [0.0]])
        absorb = float(t[end])
        t = t[: end + 1]
    else:
        vals = x.copy()
        absorb = math.inf
        t = t[: vals.size]
    path = CsbpPath(levy.alpha, t, vals, absorb, source={"levy_duration": levy.duration})
    if grid is None:
        return path
    grid = np.asarray(grid, dtype=float)
    return CsbpPath(levy.alpha, grid, path.value_at(grid), absorb, source=path.source)


def lamperti_transform(csbp: CsbpPath) -> StablePath:
    """Inverse map: a CSBP path read on the Levy clock ``theta = int Y dt``.

    Examples
    --------
    A CSBP equal to 2 on ``[0, 1)`` and absorbed at 1 becomes a Levy path
    equal to 2 on ``[0, 2)`` (``kappa_s = s / 2``) and 0 afterwards.
    """
    t = csbp.times
    y = csbp.values
    if not y[0] > 0:
        raise ParameterError("CSBP path must start positive")
    theta = np.concatenate([[0.0], np.cumsum(np.diff(t) * y[:-1])])
    keep = np.concatenate([[True], np.diff(theta) > 0])
    return StablePath(
        alpha=csbp.alpha,
        times=theta[keep],
        values=y[keep],
        jumps=np.zeros((0, 2)),
        truncation=0.0,
    )


def u_lambda(alpha: float, lam: float | np.ndarray, t: float | np.ndarray) -> np.ndarray | float:
    """Solution of ``du/dt = -u^alpha``, ``u_0 = lam``.

    ``u_t(lam) = (lam^{1-alpha} + (alpha-1) t)^{1/(1-alpha)}``.
    """
    alpha = check_alpha(alpha)
    lam = np.asarray(lam, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(lam <= 0) or np.any(t < 0):
        raise ParameterError("need lam > 0 and t >= 0")
    out = (lam ** (1.0 - alpha) + (alpha - 1.0) * t) ** (1.0 / (1.0 - alpha))
    return float(out) if out.ndim == 0 else out


def extinction_tail(alpha: float, y0: float | np.ndarray, t: float | np.ndarray) -> np.ndarray | float:
    """``P[zeta > t]`` for the CSBP started at ``y0``."""
    alpha = check_alpha(alpha)
    y0 = np.asarray(y0, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(y0 <= 0) or np.any(t <= 0):
        raise ParameterError("need y0 > 0 and t > 0")
    out = -np.expm1(-y0 * ((alpha - 1.0) * t) ** (1.0 / (1.0 - alpha)))
    return float(out) if out.ndim == 0 else out


def extinction_cdf(alpha: float, y0: float, t: float | np.ndarray) -> np.ndarray | float:
    """``P[zeta <= t] = exp(-y0 ((alpha-1) t)^{-1/(alpha-1)})``; equals 0 at ``t = 0``."""
    alpha = check_alpha(alpha)
    if not y0 > 0:
        raise ParameterError("need y0 > 0")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ParameterError("need t >= 0")
    tt = np.where(t > 0, t, 1.0)
    out = np.where(t > 0, np.exp(-y0 * ((alpha - 1.0) * tt) ** (1.0 / (1.0 - alpha))), 0.0)
    return float(out) if out.ndim == 0 else out


@dataclass
class CsbpEnsemble:
    """Values of independent CSBPs at checkpoint times.

    Attributes
    ----------
    times : ndarray
        Checkpoint times.
    values : ndarray, shape (n, len(times))
    zeta : ndarray
        Extinction times; ``inf`` when the path survives past ``times[-1]``.
    """

    alpha: float
    y0: np.ndarray
    times: np.ndarray
    values: np.ndarray
    zeta: np.ndarray
    h: float
    h_min: float


def _csbp_chunk(args: tuple) -> tuple[np.ndarray, np.ndarray]:
    alpha, y0, cps, h, h_min, seed = args
    gen = np.random.default_rng(seed)
    n = y0.size
    y = y0.astype(float).copy()
    t = np.zeros(n)
    nxt = np.zeros(n, dtype=np.int64)
    out = np.zeros((n, cps.size))
    zeta = np.full(n, np.inf)
    act = np.arange(n)
    while act.size:
        ya = y[act]
        ta = t[act]
        target = cps[nxt[act]]
        # Step scaled with the CSBP's own clock: a state y evolves on time
        # scale y^{alpha-1}, so h * y^{alpha-1} keeps relative moves even.
        hk = np.clip(h * ya ** (alpha - 1.0), h_min, h)
        reach = ta + hk >= target
        hk = np.where(reach, target - ta, hk)
        # Levy clock advances by y * hk.
        incr = (ya * hk) ** (1.0 / alpha) * sample_stable_increment(alpha, 1.0, gen, act.size)
        new = ya + incr
        dead = new <= 0.0
        if np.any(dead):
            frac = ya[dead] / (ya[dead] - new[dead])
            zeta[act[dead]] = ta[dead] + frac * hk[dead]
            new[dead] = 0.0
        y[act] = new
        t[act] = np.where(reach, target, ta + hk)
        done = reach & ~dead
        if np.any(done):
            idx = act[done]
            out[idx, nxt[idx]] = new[done]
            nxt[idx] += 1
        alive = ~dead & (nxt[act] < cps.size)
        act = act[alive]
    return out, zeta


def simulate_csbp(
    alpha: float,
    y0: float | np.ndarray,
    times: Sequence[float],
    n: int | None = None,
    rng: np.random.Generator | int | None = None,
    *,
    h: float = 2e-3,
    h_min: float = 1e-5,
    chunk: int = 25_000,
    jobs: int = 1,
) -> CsbpEnsemble:
    """Ensemble of CSBPs by stepwise Lamperti time change.

    Each step of CSBP length ``hk = clip(h * Y^{alpha-1}, h_min, h)`` draws the
    exact stable increment over Levy time ``Y * hk``; steps are shortened so
    that every checkpoint is hit exactly. A step that reaches 0 records the
    extinction time by linear interpolation of the Levy path.

    Parameters
    ----------
    y0 : float or ndarray
        Initial mass, scalar (with ``n``) or one value per path.
    times : sequence of float
        Increasing positive checkpoint times.
    jobs : int
        Worker processes; results do not depend on it.
    """
    alpha = check_alpha(alpha)
    cps = np.asarray(sorted(float(s) for s in times))
    if cps.size == 0 or cps[0] <= 0:
        raise ParameterError("checkpoint times must be positive")
    y0a = np.asarray(y0, dtype=float)
    if y0a.ndim == 0:
        if n is None:
            raise ParameterError("n is required with a scalar y0")
        y0a = np.full(int(n), float(y0a))
    if np.any(y0a <= 0):
        raise ParameterError("initial mass must be positive")
    gen = as_generator(rng)
    base = int(gen.integers(0, 2**63 - 1))
    sizes = chunk_sizes(y0a.size, chunk)
    offs = np.concatenate([[0], np.cumsum(sizes)])
    args = [
        (alpha, y0a[offs[i] : offs[i + 1]], cps, h, h_min, [base, i]) for i in range(len(sizes))
    ]
    parts = pmap(_csbp_chunk, args, jobs)
    values = np.concatenate([p[0] for p in parts]) if parts else np.zeros((0, cps.size))
    zeta = np.concatenate([p[1] for p in parts]) if parts else np.zeros(0)
    return CsbpEnsemble(alpha, y0a, cps, values, zeta, h, h_min)


def csbp_path(
    alpha: float,
    y0: float,
    t_max: float,
    rng: np.random.Generator | int | None = None,
    *,
    h: float = 2e-3,
    h_min: float = 1e-5,
) -> CsbpPath:
    """One CSBP trajectory on its own adaptive grid up to ``t_max``.

    Built as :func:`lamperti` of a Levy path whose grid is chosen on the fly
    (Levy step ``Y * hk`` with ``hk`` as in :func:`simulate_csbp`).
    """
    alpha = check_alpha(alpha)
    if not (y0 > 0 and t_max > 0):
        raise ParameterError("need y0 > 0 and t_max > 0")
    gen = as_generator(rng)
    s = [0.0]
    xs = [float(y0)]
    t = 0.0
    y = float(y0)
    while t < t_max and y > 0:
        hk = min(max(h * y ** (alpha - 1.0), h_min), h, t_max - t)
        ds = y * hk
        y = y + ds ** (1.0 / alpha) * sample_stable_increment(alpha, 1.0, gen)
        s.append(s[-1] + ds)
        xs.append(y)
        t += hk
    levy = StablePath(alpha, np.asarray(s), np.asarray(xs), np.zeros((0, 2)), 0.0)
    path = lamperti(levy)
    return CsbpPath(alpha, path.times, path.values, path.absorption_time, {"scheme": "lamperti", "h": h})


@dataclass(frozen=True)
class RatioEstimate:
    """Monte Carlo estimate of ``E[A/(A+B) | A+B > 0]``."""

    mean: float
    halfwidth: float
    discard_rate: float
    n_used: int
    level: float

    @property
    def ci(self) -> tuple[float, float]:
        return (self.mean - self.halfwidth, self.mean + self.halfwidth)


def subordinator_ratio_estimate(
    alpha: float,
    a: float,
    b: float,
    t: float,
    n: int,
    rng: np.random.Generator | int | None = None,
    *,
    level: float = 0.99,
    jobs: int = 1,
    **kw,
) -> RatioEstimate:
    """``E[A_t / (A_t + B_t)]`` for independent CSBPs from ``a`` and ``b``.

    By the branching property ``a -> Y_t^{(a)}`` is a subordinator, so the
    mean is ``a / (a + b)``. Pairs with ``A + B = 0`` are discarded and the
    discard rate reported.

    Raises
    ------
    ParameterError
        If ``a`` or ``b`` is not positive.
    DegenerateSampleError
        If every pair went extinct.
    """
    from scipy.stats import norm

    if not (a > 0 and b > 0):
        raise ParameterError("a and b must be positive")
    if not t > 0:
        raise ParameterError("t must be positive")
    gen = as_generator(rng)
    y0 = np.concatenate([np.full(n, float(a)), np.full(n, float(b))])
    ens = simulate_csbp(alpha, y0, [t], rng=gen, jobs=jobs, **kw)
    A = ens.values[:n, 0]
    B = ens.values[n:, 0]
    ok = (A + B) > 0
    if not np.any(ok):
        raise DegenerateSampleError("all pairs extinct; choose a smaller t")
    r = A[ok] / (A[ok] + B[ok])
    m = int(ok.sum())
    se = float(r.std(ddof=1) / math.sqrt(m)) if m > 1 else float("inf")
    hw = float(norm.ppf(0.5 + 0.5 * level)) * se
    return RatioEstimate(float(r.mean()), hw, 1.0 - m / n, m, level)


def additivity_samples(
    alpha: float,
    x1: float,
    x2: float,
    t: float,
    n: int,
    rng: np.random.Generator | int | None = None,
    **kw,
) -> tuple[np.ndarray, np.ndarray]:
    """Draws of ``Y_t`` from ``x1 + x2`` and of ``Y_t' + Y_t''`` from ``x1``, ``x2``.

    The branching property says both samples share one law.
    """
    gen = as_generator(rng)
    y0 = np.concatenate([np.full(n, x1 + x2), np.full(n, x1), np.full(n, x2)])
    ens = simulate_csbp(alpha, y0, [t], rng=gen, **kw)
    v = ens.values[:, 0]
    return v[:n], v[n : 2 * n] + v[2 * n :]


def scaling_samples(
    alpha: float,
    y0: float,
    c: float,
    t: float,
    n: int,
    rng: np.random.Generator | int | None = None,
    **kw,
) -> tuple[np.ndarray, np.ndarray]:
    """Draws of ``Y_{c^{alpha-1} t} / c`` from ``c y0`` and of ``Y_t`` from ``y0``.

    Stable scaling says both samples share one law.
    """
    gen = as_generator(rng)
    big = simulate_csbp(alpha, c * y0, [c ** (alpha - 1.0) * t], n, rng=gen, **kw)
    small = simulate_csbp(alpha, y0, [t], n, rng=gen, **kw)
    return big.values[:, 0] / c, small.values[:, 0]
