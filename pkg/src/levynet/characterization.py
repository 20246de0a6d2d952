"""Jump laws, the drift integral I_alpha and the Monte Carlo drift test.

The integral

    I(alpha) = int_0^1 (x^{2a-1} + (1-x)^{2a-1} - 1) Pi(dx) - (2a-1) C

with ``Pi(dx) = x^{-a-1} (1-x)^{-a-1} dx`` restricted to ``[0, 1/2]`` and the
counterterm ``C = int_0^inf x^{-a} dx`` (both regularised jointly) is the
first-order drift of the area functional ``A_r = M_r^{2a-1} + sum |jumps|^{2a-1}``
of the centre exploration. It is evaluated two independent ways:

* :func:`i_alpha_closed` uses ``-4^a/a - 2 B_{1/2}(-a, 1-a)`` with the
  incomplete beta function continued to a negative first parameter through
  a hand-written Gauss hypergeometric series;
* :func:`i_alpha_quadrature` integrates the regularised integrand directly
  with algebraic-weight adaptive quadrature.

The two agree to about 1e-12 on (1.1, 1.9). Note that I is *decreasing* in
alpha, positive below 3/2 and negative above.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np
from scipy import integrate

from .errors import BudgetExceededError, NumericError, ParameterError, RangeError
from .rng import as_generator

__all__ = [
    "JumpLawSpec",
    "DriftEstimate",
    "reversal_jump_density",
    "reversal_jump_cdf",
    "center_jump_density",
    "area_weight",
    "fold_identity_terms",
    "fold_identity_check",
    "is_big_jump",
    "hyp2f1_series",
    "incomplete_beta",
    "i_alpha_closed",
    "i_alpha_four_term",
    "i_alpha_quadrature",
    "i_alpha_integrand",
    "find_martingale_alpha",
    "drift_estimate",
    "small_jump_moments",
]

JumpKind = Literal["reversal", "center", "weighted"]


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 1.0 < alpha < 2.0:
        raise ParameterError(f"alpha must lie in (1, 2), got {alpha}")
    return alpha


# ---------------------------------------------------------------------------
# jump densities
# ---------------------------------------------------------------------------


def reversal_jump_density(alpha: float, a: float, c: float) -> float:
    """Unnormalised downward-jump density of a time-reversed excursion.

    From level ``c`` the reversed process jumps down by ``a`` at rate
    proportional to ``a^{-alpha-1} (1 - a/c)^{alpha-2}``.

    Raises
    ------
    RangeError
        Unless ``0 < a < c``.
    """
    alpha = _check_alpha(alpha)
    if not 0.0 < a < c:
        raise RangeError(f"need 0 < a < c, got a={a}, c={c}")
    return a ** (-alpha - 1.0) * (1.0 - a / c) ** (alpha - 2.0)


def reversal_jump_cdf(
    alpha: float, a: np.ndarray | float, c: float, lo: float, hi: float
) -> np.ndarray:
    """CDF of the reversal jump law given level ``c``, truncated to ``[lo, hi]``.

    Used for probability-integral transforms of observed jumps, each jump
    with its own pre-jump level.
    """
    alpha = _check_alpha(alpha)
    if not 0.0 < lo < hi < c:
        raise RangeError(f"need 0 < lo < hi < c, got lo={lo}, hi={hi}, c={c}")

    def dens(x: float) -> float:
        return x ** (-alpha - 1.0) * (1.0 - x / c) ** (alpha - 2.0)

    total = integrate.quad(dens, lo, hi, epsabs=0.0, epsrel=1e-11)[0]
    a_arr = np.clip(np.atleast_1d(np.asarray(a, dtype=float)), lo, hi)
    out = np.array(
        [integrate.quad(dens, lo, x, epsabs=0.0, epsrel=1e-11)[0] / total for x in a_arr]
    )
    return out


def center_jump_density(alpha: float, a: float, c: float) -> float:
    """Unnormalised jump density of the centre-exploration boundary length.

    A jump from ``c`` cuts off a piece of length ``a`` in ``(0, c/2]``; the
    density is ``a^{-alpha-1} (b/c)^{-alpha-1}`` with ``b = c - a``.
    """
    alpha = _check_alpha(alpha)
    if not 0.0 < a <= 0.5 * c:
        raise RangeError(f"need 0 < a <= c/2, got a={a}, c={c}")
    b = c - a
    return a ** (-alpha - 1.0) * (b / c) ** (-alpha - 1.0)


def area_weight(alpha: float, a: float, c: float) -> float:
    """Expected-area weight ``(a/c)^{2a-1} + (b/c)^{2a-1}`` of a split of ``c``."""
    alpha = _check_alpha(alpha)
    b = c - a
    p = 2.0 * alpha - 1.0
    return (a / c) ** p + (b / c) ** p


def fold_identity_terms(alpha: float, a: float, c: float) -> tuple[float, float, float]:
    """The two folded reversal terms and the weighted centre density.

    Returns ``(t1, t2, rhs)`` with ``t1 + t2 == rhs`` in exact arithmetic:
    folding the reversal law at ``c/2`` equals the area weight times the
    centre density.
    """
    alpha = _check_alpha(alpha)
    if not 0.0 < a <= 0.5 * c:
        raise RangeError(f"need 0 < a <= c/2, got a={a}, c={c}")
    b = c - a
    t1 = a ** (-alpha - 1.0) * (b / c) ** (alpha - 2.0)
    t2 = (a / c) ** (alpha - 2.0) * b ** (-alpha - 1.0)
    rhs = area_weight(alpha, a, c) * center_jump_density(alpha, a, c)
    return t1, t2, rhs


def fold_identity_check(alpha: float, a: float, c: float) -> float:
    """Scaled residual of the fold identity.

    The residual ``|t1 + t2 - rhs|`` is divided by ``|t1| + |t2| + |rhs|`` so
    that it measures agreement in units of the working precision; the raw
    terms grow like ``a^{-alpha-1}`` and an unscaled residual would only
    reflect their magnitude.
    """
    t1, t2, rhs = fold_identity_terms(alpha, a, c)
    scale = abs(t1) + abs(t2) + abs(rhs)
    return abs(t1 + t2 - rhs) / scale


def is_big_jump(c: float, lower: float) -> bool:
    """A downward jump from ``c`` to ``lower`` is big iff ``lower < c/2``."""
    if not 0.0 <= lower <= c:
        raise RangeError(f"need 0 <= lower <= c, got lower={lower}, c={c}")
    return lower < 0.5 * c


@dataclass(frozen=True)
class JumpLawSpec:
    """An unnormalised jump law on a bounded support.

    Attributes
    ----------
    alpha : float
        Stability index in (1, 2).
    kind : {"reversal", "center", "weighted"}
        ``"reversal"`` is the law of the time-reversed excursion on ``(0, c)``;
        ``"center"`` the centre-exploration law on ``(0, c/2]``; ``"weighted"``
        the centre law multiplied by the area weight.
    c : float
        Pre-jump level.
    """

    alpha: float
    kind: JumpKind
    c: float = 1.0

    def __post_init__(self) -> None:
        _check_alpha(self.alpha)
        if self.kind not in ("reversal", "center", "weighted"):
            raise ParameterError(f"unknown jump-law kind {self.kind!r}")
        if self.c <= 0:
            raise ParameterError("c must be positive")

    @property
    def support(self) -> tuple[float, float]:
        return (0.0, self.c) if self.kind == "reversal" else (0.0, 0.5 * self.c)

    def density(self, a: float) -> float:
        if self.kind == "reversal":
            return reversal_jump_density(self.alpha, a, self.c)
        if self.kind == "center":
            return center_jump_density(self.alpha, a, self.c)
        return area_weight(self.alpha, a, self.c) * center_jump_density(self.alpha, a, self.c)


# ---------------------------------------------------------------------------
# special functions
# ---------------------------------------------------------------------------


def hyp2f1_series(
    a: float, b: float, c: float, x: float, tol: float = 1e-16, max_terms: int = 10_000
) -> float:
    """Gauss hypergeometric series ``2F1(a, b; c; x)`` for ``|x| < 1``.

    Terms are accumulated with the recurrence
    ``t_{k+1} = t_k (a+k)(b+k) / ((c+k)(k+1)) x`` and the sum stops once the
    ratio test guarantees the remaining tail is below ``tol`` relative to the
    partial sum.

    Raises
    ------
    NumericError
        If ``c`` is a non-positive integer, ``|x| >= 1``, or the series does
        not settle within ``max_terms`` terms.
    """
    if abs(x) >= 1.0:
        raise NumericError(f"series requires |x| < 1, got x={x}")
    if c <= 0 and float(c).is_integer():
        raise NumericError(f"c = {c} is a pole of 2F1")
    term = 1.0
    total = 1.0
    for k in range(max_terms):
        ratio = (a + k) * (b + k) / ((c + k) * (k + 1.0)) * x
        term *= ratio
        total += term
        if term == 0.0:
            return total
        # Past k0 = max(|a|,|b|,|c|) the ratio is monotone towards |x|, so the
        # tail is bounded by a geometric series.
        if k + 1 > max(abs(a), abs(b), abs(c)) + 1:
            r = abs(ratio)
            if r < 1.0 and abs(term) * r / (1.0 - r) <= tol * abs(total):
                return total
    raise NumericError(
        f"2F1({a}, {b}; {c}; {x}) did not converge in {max_terms} terms "
        f"(last term {term:.3e}, partial sum {total:.17g})"
    )


def incomplete_beta(x: float, a: float, b: float) -> float:
    """Incomplete beta ``B_x(a, b)`` continued to negative ``a``.

    Evaluated as ``x^a / a * 2F1(a, 1-b; a+1; x)``, which coincides with
    ``int_0^x u^{a-1} (1-u)^{b-1} du`` when ``a > 0`` and provides the
    analytic continuation otherwise (``a`` not a non-positive integer).
    """
    if not 0.0 < x < 1.0:
        raise RangeError(f"x must lie in (0, 1), got {x}")
    if a == 0 or (a < 0 and float(a).is_integer()):
        raise NumericError(f"a = {a} is a pole of the continued incomplete beta")
    return x**a / a * hyp2f1_series(a, 1.0 - b, a + 1.0, x)


def i_alpha_closed(alpha: float) -> float:
    """Closed form ``-4^a/a - 2 B_{1/2}(-a, 1-a)`` of the drift integral."""
    alpha = _check_alpha(alpha)
    return -(4.0**alpha) / alpha - 2.0 * incomplete_beta(0.5, -alpha, 1.0 - alpha)


def i_alpha_four_term(alpha: float) -> float:
    """Unsimplified four-term form of the drift integral.

    ``-4^a/a - 2 B_{1/2}(-a,1-a) + 2^{a-1}(1-2a)/(a-1) + (2a-1) int_{1/2}^inf x^{-a} dx``;
    the last two terms cancel, which this function lets tests confirm.
    """
    alpha = _check_alpha(alpha)
    tail = 0.5 ** (1.0 - alpha) / (alpha - 1.0)
    return (
        -(4.0**alpha) / alpha
        - 2.0 * incomplete_beta(0.5, -alpha, 1.0 - alpha)
        + 2.0 ** (alpha - 1.0) * (1.0 - 2.0 * alpha) / (alpha - 1.0)
        + (2.0 * alpha - 1.0) * tail
    )


def _binom_coeffs(p: float, n: int) -> np.ndarray:
    """Coefficients of ``(1 - x)^p = sum_k out[k] x^k`` for ``k <= n``."""
    out = np.empty(n + 1)
    out[0] = 1.0
    for k in range(1, n + 1):
        out[k] = out[k - 1] * (k - 1 - p) / k
    return out


_SERIES_CUT = 0.05
_SERIES_TERMS = 40


def _cancel_coeffs(alpha: float) -> np.ndarray:
    """Series of ``g(x) = ((1-x)^{2a-1} - 1)(1-x)^{-a-1} + (2a-1) x`` divided by x^2."""
    p = 2.0 * alpha - 1.0
    q = -alpha - 1.0
    n = _SERIES_TERMS + 2
    A = _binom_coeffs(p, n)
    A[0] = 0.0
    B = _binom_coeffs(q, n)
    prod = np.convolve(A, B)[: n + 1]
    prod[1] += p
    # prod[0] and prod[1] vanish identically
    return prod[2:]


def _cancel_over_x2(x: float, alpha: float, coeffs: np.ndarray) -> float:
    if x <= _SERIES_CUT:
        return float(np.polynomial.polynomial.polyval(x, coeffs))
    p = 2.0 * alpha - 1.0
    l1 = math.log1p(-x)
    g = math.expm1(p * l1) * math.exp(-(alpha + 1.0) * l1) + p * x
    return g / (x * x)


def i_alpha_integrand(x: float | np.ndarray, alpha: float) -> np.ndarray:
    """Regularised integrand on ``(0, 1/2]``.

    ``(x^{2a-1} + (1-x)^{2a-1} - 1) x^{-a-1} (1-x)^{-a-1} + (2a-1) x^{-a}``,
    evaluated without cancellation so that it stays finite down to
    ``x = 1e-12`` (it behaves like ``x^{a-2}`` there).
    """
    alpha = _check_alpha(alpha)
    coeffs = _cancel_coeffs(alpha)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty_like(xs)
    for i, xi in enumerate(xs):
        lead = xi ** (alpha - 2.0) * (1.0 - xi) ** (-alpha - 1.0)
        out[i] = lead + xi ** (1.0 - alpha) * _cancel_over_x2(xi, alpha, coeffs)
    return out


def i_alpha_quadrature(alpha: float, epsrel: float = 1e-13) -> float:
    """Drift integral by adaptive quadrature of the regularised integrand.

    The integrand is split into ``x^{a-2} (1-x)^{-a-1}`` and
    ``x^{1-a} h(x)`` with ``h`` smooth; each piece is integrated with QUADPACK's
    algebraic end-point weight so that the integrable singularities at 0 are
    handled exactly. The counterterm on ``[1/2, inf)`` is added analytically.

    Raises
    ------
    NumericError
        If QUADPACK reports an error estimate above ``1e-9``.
    """
    alpha = _check_alpha(alpha)
    coeffs = _cancel_coeffs(alpha)
    lead, err1 = integrate.quad(
        lambda x: (1.0 - x) ** (-alpha - 1.0),
        0.0,
        0.5,
        weight="alg",
        wvar=(alpha - 2.0, 0.0),
        epsabs=0.0,
        epsrel=epsrel,
        limit=200,
    )
    rest, err2 = integrate.quad(
        lambda x: _cancel_over_x2(x, alpha, coeffs),
        0.0,
        0.5,
        weight="alg",
        wvar=(1.0 - alpha, 0.0),
        epsabs=0.0,
        epsrel=epsrel,
        limit=200,
        points=None,
    )
    if err1 + err2 > 1e-9:
        raise NumericError(f"quadrature error estimate {err1 + err2:.2e} too large at alpha={alpha}")
    tail = (2.0 * alpha - 1.0) * 0.5 ** (1.0 - alpha) / (alpha - 1.0)
    return lead + rest + tail


def find_martingale_alpha(
    tol: float = 1e-10,
    bracket: tuple[float, float] = (1.1, 1.9),
    func: Callable[[float], float] | None = None,
) -> float:
    """Bisection root of the drift integral on ``bracket``.

    Parameters
    ----------
    tol : float
        Width of the final bracket.
    func : callable, optional
        Evaluator of I; defaults to :func:`i_alpha_closed`.

    Raises
    ------
    NumericError
        If the bracket endpoints do not straddle a sign change.
    """
    if tol <= 0:
        raise ParameterError("tol must be positive")
    f = i_alpha_closed if func is None else func
    lo, hi = map(float, bracket)
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise NumericError(f"no sign change on [{lo}, {hi}]: I={flo:.4g}, {fhi:.4g}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Monte Carlo drift test
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DriftEstimate:
    """Monte Carlo estimate of the drift of the area functional.

    Attributes
    ----------
    mean : float
        Estimated drift per unit time.
    halfwidth : float
        Normal-approximation CI halfwidth at ``level``.
    reference : float
        ``I_alpha`` from the closed form.
    """

    alpha: float
    r: float
    eps: float
    n: int
    mean: float
    halfwidth: float
    reference: float
    level: float = 0.99
    stderr: float = float("nan")
    method: str = "richardson"
    small_jumps: str = "gaussian"
    extra: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.halfwidth > 0:
            raise NumericError("CI halfwidth must be positive")

    @property
    def ci(self) -> tuple[float, float]:
        return (self.mean - self.halfwidth, self.mean + self.halfwidth)

    def contains(self, value: float) -> bool:
        lo, hi = self.ci
        return lo <= value <= hi


def small_jump_moments(alpha: float, eps: float) -> tuple[float, float, float]:
    """Drift, variance and area rates of the jumps below ``eps``.

    Returns ``(mu, var, area)`` with ``mu = int_0^eps (x^{-a} - x pi(x)) dx``,
    ``var = int_0^eps x^2 pi(x) dx`` and ``area = int_0^eps x^{2a-1} pi(x) dx``
    where ``pi(x) = x^{-a-1} (1-x)^{-a-1}``.
    """
    alpha = _check_alpha(alpha)
    kw = dict(weight="alg", epsabs=0.0, epsrel=1e-12, limit=200)
    # x^{-a}(1 - (1-x)^{-a-1}) = x^{1-a} * [-(expm1((-a-1) log1p(-x)))/x]
    def mu_f(x: float) -> float:
        if x == 0.0:
            return -(alpha + 1.0)
        return -math.expm1((-alpha - 1.0) * math.log1p(-x)) / x

    mu = integrate.quad(mu_f, 0.0, eps, wvar=(1.0 - alpha, 0.0), **kw)[0]
    var = integrate.quad(lambda x: (1.0 - x) ** (-alpha - 1.0), 0.0, eps, wvar=(1.0 - alpha, 0.0), **kw)[0]
    area = integrate.quad(
        lambda x: (1.0 - x) ** (-alpha - 1.0), 0.0, eps, wvar=(alpha - 2.0, 0.0), **kw
    )[0]
    return mu, var, area


_MAX_EVENTS = 10_000
_DRAWS_PER_CHUNK = 4_000_000


def _drift_chunk(
    alpha: float,
    r: float,
    eps: float,
    m: int,
    rng: np.random.Generator,
    small: tuple[float, float, float] | None,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-path difference quotients over ``[0, r]`` and ``[0, r/2]``."""
    p = 2.0 * alpha - 1.0
    # Marks on [eps, 1/2] with density x^{-a-1}(1-x)^{-a-1}, by superposition:
    # exact inversion of x^{-a-1} plus thinning of the remainder g <= K x^{-a}.
    lam_main = (eps ** (-alpha) - 0.5 ** (-alpha)) / alpha
    K = 2.0 * (2.0 ** (alpha + 1.0) - 1.0)
    lam_dom = K * (eps ** (1.0 - alpha) - 0.5 ** (1.0 - alpha)) / (alpha - 1.0)
    C = eps ** (1.0 - alpha) / (alpha - 1.0)

    k1 = rng.poisson(r * lam_main, m)
    k2 = rng.poisson(r * lam_dom, m)
    if k1.max(initial=0) + k2.max(initial=0) > _MAX_EVENTS:
        raise BudgetExceededError(
            f"more than {_MAX_EVENTS} jump events on one path; increase eps or decrease r"
        )
    u1 = rng.random(int(k1.sum()))
    x1 = (eps ** (-alpha) - u1 * (eps ** (-alpha) - 0.5 ** (-alpha))) ** (-1.0 / alpha)
    u2 = rng.random(int(k2.sum()))
    x2 = (eps ** (1.0 - alpha) - u2 * (eps ** (1.0 - alpha) - 0.5 ** (1.0 - alpha))) ** (
        1.0 / (1.0 - alpha)
    )
    keep = rng.random(x2.size) * K * x2 < np.expm1((-alpha - 1.0) * np.log1p(-x2))
    idx = np.concatenate([np.repeat(np.arange(m), k1), np.repeat(np.arange(m), k2)[keep]])
    x = np.concatenate([x1, x2[keep]])
    first = rng.random(x.size) < 0.5  # jump time falls in [0, r/2]
    xp = x**p
    J_half = np.bincount(idx[first], x[first], m)
    J_full = np.bincount(idx, x, m)
    S_half = np.bincount(idx[first], xp[first], m)
    S_full = np.bincount(idx, xp, m)

    g1 = np.zeros(m)
    g2 = np.zeros(m)
    area_rate = 0.0
    if small is not None:
        mu_s, var_s, area_rate = small
        sd = math.sqrt(0.5 * r * var_s)
        g1 = rng.normal(0.5 * r * mu_s, sd, m)
        g2 = rng.normal(0.5 * r * mu_s, sd, m)

    M_half = np.maximum(1.0 - J_half + 0.5 * r * C + g1, 0.0)
    M_full = np.maximum(1.0 - J_full + r * C + g1 + g2, 0.0)
    d_half = (M_half**p + S_half + 0.5 * r * area_rate - 1.0) / (0.5 * r)
    d_full = (M_full**p + S_full + r * area_rate - 1.0) / r
    return d_full, d_half


def drift_estimate(
    alpha: float,
    r: float = 1e-2,
    eps: float = 1e-3,
    n: int = 1_000_000,
    rng: np.random.Generator | int | None = None,
    *,
    level: float = 0.99,
    method: Literal["richardson", "difference"] = "richardson",
    small_jumps: Literal["gaussian", "drop"] = "gaussian",
    jobs: int = 1,
) -> DriftEstimate:
    """Monte Carlo drift of ``A_r = M_r^{2a-1} + sum |jumps|^{2a-1}`` at state 1.

    ``M_r = (1 - J_r + r C + G_r)_+`` where ``J_r`` sums the jumps on
    ``[0, r]`` of a Poisson process with mark density
    ``x^{-a-1}(1-x)^{-a-1}`` on ``[eps, 1/2]`` (intensity frozen at state 1),
    ``C = eps^{1-a}/(a-1)`` is the compensator and ``G_r`` the matched
    Gaussian for the jumps below ``eps`` (``small_jumps="gaussian"``; the
    deterministic area of those jumps is added as well). With
    ``small_jumps="drop"`` the literal truncation is used, which carries a
    bias of order ``eps^{2-a}``.

    ``method="difference"`` averages ``(A_r - A_0)/r``, whose expectation is
    ``I + O(r)``. ``method="richardson"`` averages ``2 D(r/2) - D(r)`` over the
    same paths, cancelling the O(r) term.

    Parameters
    ----------
    n : int
        Number of independent paths.
    level : float
        Confidence level of the normal-approximation interval.
    jobs : int
        Worker processes; the result does not depend on it.
    """
    alpha = _check_alpha(alpha)
    if not r > 0:
        raise ParameterError("r must be positive")
    if not 0.0 < eps < 0.25:
        raise ParameterError("eps must lie in (0, 1/4)")
    if n < 2:
        raise ParameterError("n must be at least 2")
    if not 0.0 < level < 1.0:
        raise ParameterError("level must lie in (0, 1)")
    if method not in ("richardson", "difference"):
        raise ParameterError(f"unknown method {method!r}")
    if small_jumps not in ("gaussian", "drop"):
        raise ParameterError(f"unknown small-jump treatment {small_jumps!r}")
    gen = as_generator(rng)
    base = int(gen.integers(0, 2**63 - 1))

    lam = r * ((eps ** (-alpha)) / alpha + 4.0 * eps ** (1.0 - alpha) / (alpha - 1.0))
    chunk = int(max(1000, min(200_000, _DRAWS_PER_CHUNK / max(lam, 1.0))))
    bounds = [(i, min(chunk, n - i * chunk)) for i in range((n + chunk - 1) // chunk)]
    small = small_jump_moments(alpha, eps) if small_jumps == "gaussian" else None
    args = [(alpha, r, eps, size, base, idx, small, method) for idx, size in bounds]

    if jobs > 1 and len(args) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as ex:
            parts = list(ex.map(_drift_worker, args))
    else:
        parts = [_drift_worker(a) for a in args]

    # fixed-order reduction: each part is (sum, sum of squares, count)
    tot = sum(pt[0] for pt in parts)
    tot2 = sum(pt[1] for pt in parts)
    mean = tot / n
    var = max(tot2 / n - mean * mean, 0.0) * n / (n - 1)
    se = math.sqrt(var / n)
    from scipy.stats import norm

    hw = float(norm.ppf(0.5 + 0.5 * level)) * se
    return DriftEstimate(
        alpha=alpha,
        r=r,
        eps=eps,
        n=int(n),
        mean=float(mean),
        halfwidth=hw,
        reference=i_alpha_closed(alpha),
        level=level,
        stderr=se,
        method=method,
        small_jumps=small_jumps,
    )


def _drift_worker(args: tuple) -> tuple[float, float]:
    alpha, r, eps, size, base, idx, small, method = args
    g = np.random.default_rng([base, idx])
    d_full, d_half = _drift_chunk(alpha, r, eps, size, g, small)
    vals = d_full if method == "difference" else 2.0 * d_half - d_full
    # math.fsum keeps the per-chunk sums independent of summation order
    return math.fsum(vals), math.fsum(vals * vals)
