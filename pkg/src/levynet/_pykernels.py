"""Pure-Python reference implementations of the compiled kernels.

Each function reproduces the floating-point semantics of its counterpart in
``_ckernels.pyx`` so that results do not depend on the selected backend.
"""
from __future__ import annotations

import math

import numpy as np


def minplus_closure(d: np.ndarray) -> bool:
    """In-place Floyd-Warshall relaxation; returns True if anything changed."""
    m = d.shape[0]
    changed = False
    for k in range(m):
        cand = d[:, k : k + 1] + d[k : k + 1, :]
        better = cand < d
        if better.any():
            changed = True
            np.copyto(d, cand, where=better)
    return changed


def height_process(walk: np.ndarray) -> np.ndarray:
    """Weak-record counts of a Lukasiewicz walk via a monotone stack."""
    w = walk.tolist()
    n = len(w) - 1
    out = [0] * n
    stack: list[int] = []
    for k in range(n):
        wk = w[k]
        while stack and w[stack[-1]] > wk:
            stack.pop()
        out[k] = len(stack)
        stack.append(k)
    return np.asarray(out, dtype=np.int64)


def snake_retrace(y: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Head positions of a Brownian snake driven by the lifetime ``y``."""
    yl = y.tolist()
    zl = z.tolist()
    n = len(yl)
    x = [0.0] * n
    sh = [yl[0]]
    sv = [0.0]
    sqrt = math.sqrt
    for k in range(1, n):
        yk = yl[k]
        if yk >= sh[-1]:
            if yk > sh[-1]:
                xk = sv[-1] + sqrt(yk - sh[-1]) * zl[k - 1]
                sh.append(yk)
                sv.append(xk)
                x[k] = xk
            else:
                x[k] = sv[-1]
            continue
        yr, xr = sh[-1], sv[-1]
        while len(sh) > 1 and sh[-1] > yk:
            yr, xr = sh.pop(), sv.pop()
        yq, xq = sh[-1], sv[-1]
        if yq == yk:
            x[k] = xq
        else:
            w = (yk - yq) / (yr - yq)
            var = (yk - yq) * (yr - yk) / (yr - yq)
            xk = xq + w * (xr - xq) + sqrt(var) * zl[k - 1]
            sh.append(yk)
            sv.append(xk)
            x[k] = xk
    return np.asarray(x, dtype=np.float64)


def offspring_walk(
    u: np.ndarray,
    start: int,
    cdf: np.ndarray,
    guide: np.ndarray,
    xi: np.ndarray,
    level: int,
    target: int,
) -> tuple[int, int, int]:
    """Invert uniforms into offspring counts while running the Lukasiewicz walk."""
    seg = u[start:]
    ks = np.searchsorted(cdf, seg, side="right")
    tail = np.flatnonzero(ks == cdf.size)
    ti = int(tail[0]) if tail.size else seg.size
    walk = level + np.cumsum(ks[:ti] - 1)
    hits = np.flatnonzero(walk == target)
    if hits.size:
        h = int(hits[0]) + 1
        xi[start : start + h] = ks[:h]
        return start + h, int(target), 1
    xi[start : start + ti] = ks[:ti]
    if ti:
        level = int(walk[-1])
    return start + ti, int(level), 2 if ti < seg.size else 0
