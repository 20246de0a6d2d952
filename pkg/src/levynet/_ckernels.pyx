# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops. Semantics match ``levynet._pykernels`` exactly."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()


def minplus_closure(double[:, ::1] d):
    """In-place Floyd-Warshall relaxation; returns True if anything changed."""
    cdef Py_ssize_t m = d.shape[0]
    cdef Py_ssize_t i, j, k
    cdef double dik, cand
    cdef bint changed = False
    with nogil:
        for k in range(m):
            for i in range(m):
                dik = d[i, k]
                for j in range(m):
                    cand = dik + d[k, j]
                    if cand < d[i, j]:
                        d[i, j] = cand
                        changed = True
    return changed


def height_process(const long long[::1] walk):
    """Weak-record counts of a Lukasiewicz walk via a monotone stack."""
    cdef Py_ssize_t n = walk.shape[0] - 1
    cdef Py_ssize_t k, top = 0
    cdef cnp.ndarray[long long, ndim=1] out = np.empty(n, dtype=np.int64)
    cdef cnp.ndarray[long long, ndim=1] stack = np.empty(max(n, 1), dtype=np.int64)
    cdef long long[::1] o = out
    cdef long long[::1] s = stack
    with nogil:
        for k in range(n):
            while top > 0 and walk[s[top - 1]] > walk[k]:
                top -= 1
            o[k] = top
            s[top] = k
            top += 1
    return out


def snake_retrace(const double[::1] y, const double[::1] z):
    """Head positions of a Brownian snake driven by the lifetime ``y``.

    ``z`` holds one standard normal per step. Up-steps extend the lineage
    with independent Gaussian increments; down-steps read the lineage at the
    new height, sampling the Brownian bridge between the bracketing records.
    """
    cdef Py_ssize_t n = y.shape[0]
    cdef Py_ssize_t k, top = 1
    cdef double yk, yq, yr, xq, xr, w, var
    cdef cnp.ndarray[double, ndim=1] out = np.zeros(n, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] hs = np.empty(n + 1, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] vs = np.empty(n + 1, dtype=np.float64)
    cdef double[::1] x = out
    cdef double[::1] sh = hs
    cdef double[::1] sv = vs
    sh[0] = y[0]
    sv[0] = 0.0
    with nogil:
        for k in range(1, n):
            yk = y[k]
            if yk >= sh[top - 1]:
                if yk > sh[top - 1]:
                    x[k] = sv[top - 1] + sqrt(yk - sh[top - 1]) * z[k - 1]
                    sh[top] = yk
                    sv[top] = x[k]
                    top += 1
                else:
                    x[k] = sv[top - 1]
                continue
            yr = sh[top - 1]
            xr = sv[top - 1]
            while top > 1 and sh[top - 1] > yk:
                yr = sh[top - 1]
                xr = sv[top - 1]
                top -= 1
            yq = sh[top - 1]
            xq = sv[top - 1]
            if yq == yk:
                x[k] = xq
            else:
                w = (yk - yq) / (yr - yq)
                var = (yk - yq) * (yr - yk) / (yr - yq)
                x[k] = xq + w * (xr - xq) + sqrt(var) * z[k - 1]
                sh[top] = yk
                sv[top] = x[k]
                top += 1
    return out


def offspring_walk(
    const double[::1] u,
    Py_ssize_t start,
    const double[::1] cdf,
    const long long[::1] guide,
    long long[::1] xi,
    long long level,
    long long target,
):
    """Invert uniforms into offspring counts while running the Lukasiewicz walk.

    Starting at ``u[start]``, each uniform becomes the smallest ``k`` with
    ``cdf[k] > u`` and the walk moves by ``k - 1``. Stops when the walk
    reaches ``target`` (status 1), at a uniform beyond the table (status 2,
    ``xi`` not written there) or at the end of ``u`` (status 0). Returns
    ``(stop, level, status)`` where ``stop`` is the first unprocessed index.
    """
    cdef Py_ssize_t n = u.shape[0]
    cdef Py_ssize_t K = cdf.shape[0]
    cdef Py_ssize_t G = guide.shape[0]
    cdef Py_ssize_t i = start, k
    cdef double ui
    cdef int status = 0
    with nogil:
        while i < n:
            ui = u[i]
            k = guide[<Py_ssize_t>(ui * G)]
            while k < K and cdf[k] <= ui:
                k += 1
            if k == K:
                status = 2
                break
            xi[i] = k
            level += k - 1
            i += 1
            if level == target:
                status = 1
                break
    return i, level, status
