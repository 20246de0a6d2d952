"""Compare the compiled and pure-Python kernel backends.

Usage: ``python3 benchmarks/bench_kernels.py [--repeat 3]``
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from levynet import kernels
from levynet.brownian_map import d_circ_matrix, sample_discrete_snake, select_points
from levynet.stable_forest import offspring_law, sample_forest


def _cases(rng: np.random.Generator) -> dict:
    snake = sample_discrete_snake(8192, rng)
    pts = select_points(snake, 256, rng)
    dc = d_circ_matrix(snake.x[: snake.n], pts)
    walk = sample_forest(1.5, 2000, rng).walk
    y = np.abs(np.cumsum(rng.normal(size=100_000)))
    y[0] = 0.0
    z = rng.normal(size=y.size)
    law = offspring_law(1.5)
    u = rng.random(200_000)

    def closure(mod):
        d = dc.copy()
        while mod.minplus_closure(d):
            pass

    def walk_inv(mod):
        xi = np.zeros(u.size, dtype=np.int64)
        mod.offspring_walk(u, 0, law.cdf, law.guide, xi, 0, -10**9)

    return {
        "minplus_closure (m=256)": closure,
        f"height_process (n={walk.size - 1})": lambda mod: mod.height_process(walk),
        "snake_retrace (n=1e5)": lambda mod: mod.snake_retrace(y, z),
        "offspring_walk (n=2e5)": walk_inv,
    }


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    py = kernels.get_backend("python")
    try:
        cy = kernels.get_backend("cython")
    except ImportError:
        print("compiled extension not built; only the Python backend is available")
        cy = None
    cases = _cases(np.random.default_rng(0))
    print(f"{'kernel':32s} {'python (s)':>11s} {'cython (s)':>11s} {'speedup':>8s}")
    for name, fn in cases.items():
        tp = min(timeit.repeat(lambda: fn(py), number=1, repeat=args.repeat))
        if cy is None:
            print(f"{name:32s} {tp:11.4f} {'-':>11s} {'-':>8s}")
            continue
        tc = min(timeit.repeat(lambda: fn(cy), number=1, repeat=args.repeat))
        print(f"{name:32s} {tp:11.4f} {tc:11.4f} {tp / tc:8.1f}")


if __name__ == "__main__":
    main()
