"""Distributional tests and interval estimates used by the verification suites."""
from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np
from scipy import stats

from ..errors import DegenerateSampleError, ParameterError

__all__ = [
    "MIN_KS_SAMPLES",
    "ks_test",
    "two_sample_ks",
    "mean_ci",
    "binomial_se",
    "poisson_dispersion",
    "z_score",
]

MIN_KS_SAMPLES = 20


def _as_sample(samples: Sequence[float] | np.ndarray, name: str = "samples") -> np.ndarray:
    x = np.asarray(samples, dtype=float).ravel()
    if x.size < MIN_KS_SAMPLES:
        raise ParameterError(f"{name} needs at least {MIN_KS_SAMPLES} values, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise ParameterError(f"{name} contains non-finite values")
    return x


def ks_test(samples: Sequence[float] | np.ndarray, cdf: Callable[[np.ndarray], np.ndarray]) -> tuple[float, float]:
    """One-sample Kolmogorov-Smirnov test with the asymptotic p-value.

    Returns
    -------
    D, p : float
        Sup distance between the empirical and target CDFs, and the p-value.

    Raises
    ------
    ParameterError
        With fewer than 20 samples.
    """
    x = _as_sample(samples)
    res = stats.kstest(x, cdf, method="asymp")
    return float(res.statistic), float(res.pvalue)


def two_sample_ks(a: Sequence[float] | np.ndarray, b: Sequence[float] | np.ndarray) -> tuple[float, float]:
    """Two-sample Kolmogorov-Smirnov test with the asymptotic p-value."""
    xa = _as_sample(a, "a")
    xb = _as_sample(b, "b")
    res = stats.ks_2samp(xa, xb, method="asymp")
    return float(res.statistic), float(res.pvalue)


def mean_ci(samples: Sequence[float] | np.ndarray, level: float = 0.99) -> tuple[float, float]:
    """Sample mean and normal-approximation CI halfwidth."""
    x = np.asarray(samples, dtype=float).ravel()
    if x.size < 2:
        raise DegenerateSampleError("need at least two samples")
    if not 0 < level < 1:
        raise ParameterError("level must lie in (0, 1)")
    q = float(stats.norm.ppf(0.5 + 0.5 * level))
    return float(x.mean()), q * float(x.std(ddof=1)) / math.sqrt(x.size)


def binomial_se(p: float, n: int) -> float:
    """Standard error of a proportion with true value ``p`` over ``n`` trials."""
    return math.sqrt(p * (1.0 - p) / n)


def poisson_dispersion(samples: Sequence[float] | np.ndarray) -> float:
    """Variance-to-mean ratio (1 for Poisson counts)."""
    x = np.asarray(samples, dtype=float).ravel()
    if x.size < 2 or x.mean() <= 0:
        raise DegenerateSampleError("need at least two samples with positive mean")
    return float(x.var(ddof=1) / x.mean())


def z_score(samples: Sequence[float] | np.ndarray, target: float) -> float:
    """``(mean - target) / standard error``."""
    x = np.asarray(samples, dtype=float).ravel()
    se = float(x.std(ddof=1)) / math.sqrt(x.size)
    if se == 0:
        return 0.0 if x.mean() == target else math.copysign(math.inf, x.mean() - target)
    return float((x.mean() - target) / se)
