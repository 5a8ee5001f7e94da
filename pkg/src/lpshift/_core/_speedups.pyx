# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops: moment-system accumulation and kNN order statistics.

Signatures match ``lpshift._core._fallback``.
"""

from libc.math cimport INFINITY, fabs, sqrt
from libc.stdlib cimport free, malloc

import numpy as np


def moment_system(x, y, x_star, double h, exponents, inv_factorial,
                  int kind_code, int support_code, double epa_floor):
    """Accumulate S = sum_i K_i z_i z_i^T and s = sum_i K_i z_i y_i."""
    cdef double[:, ::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef double[::1] xs = np.ascontiguousarray(x_star, dtype=np.float64)
    # int64 maps to "long long" on every LP64/LLP64 platform.
    cdef long long[:, ::1] ev = np.ascontiguousarray(exponents, dtype=np.int64)
    cdef double[::1] fv = np.ascontiguousarray(inv_factorial, dtype=np.float64)

    cdef Py_ssize_t n = xv.shape[0]
    cdef Py_ssize_t dim = xv.shape[1]
    cdef Py_ssize_t m = ev.shape[0]
    cdef Py_ssize_t i, j, t, a, b
    cdef long long maxdeg = 0
    for t in range(m):
        for j in range(dim):
            if ev[t, j] > maxdeg:
                maxdeg = ev[t, j]

    s_mat_np = np.zeros((m, m))
    s_vec_np = np.zeros(m)
    mask_np = np.zeros(n, dtype=np.uint8)
    cdef double[:, ::1] S = s_mat_np
    cdef double[::1] s = s_vec_np
    cdef unsigned char[::1] mask = mask_np

    cdef double *u = <double *> malloc(dim * sizeof(double))
    cdef double *pows = <double *> malloc(dim * (maxdeg + 1) * sizeof(double))
    cdef double *z = <double *> malloc(m * sizeof(double))
    if u == NULL or pows == NULL or z == NULL:
        free(u); free(pows); free(z)
        raise MemoryError()

    cdef double r2, linf, w, wy, acc, zw
    try:
        with nogil:
            for i in range(n):
                r2 = 0.0
                linf = 0.0
                for j in range(dim):
                    u[j] = (xv[i, j] - xs[j]) / h
                    r2 += u[j] * u[j]
                    if fabs(u[j]) > linf:
                        linf = fabs(u[j])
                if support_code == 0:
                    if r2 > 1.0:
                        continue
                else:
                    if linf > 1.0:
                        continue
                if kind_code == 0:
                    w = 0.5
                else:
                    w = 0.75 * (1.0 - r2)
                    if w < epa_floor:
                        w = epa_floor
                mask[i] = 1
                for j in range(dim):
                    pows[j * (maxdeg + 1)] = 1.0
                    for a in range(1, maxdeg + 1):
                        pows[j * (maxdeg + 1) + a] = pows[j * (maxdeg + 1) + a - 1] * u[j]
                for t in range(m):
                    acc = fv[t]
                    for j in range(dim):
                        acc *= pows[j * (maxdeg + 1) + ev[t, j]]
                    z[t] = acc
                wy = w * yv[i]
                for a in range(m):
                    zw = w * z[a]
                    s[a] += z[a] * wy
                    for b in range(a, m):
                        S[a, b] += zw * z[b]
    finally:
        free(u)
        free(pows)
        free(z)

    for a in range(m):
        for b in range(a + 1, m):
            S[b, a] = S[a, b]
    return s_mat_np, s_vec_np, np.nonzero(mask_np)[0]


def knn_radii_pair(x, int k_hi, int k_lo, chunk=None):
    """Distance to the k_hi-th and k_lo-th nearest neighbor (self excluded)."""
    cdef double[:, ::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0]
    cdef Py_ssize_t dim = xv.shape[1]
    if not 1 <= k_lo <= k_hi <= n - 1:
        raise ValueError(f"need 1 <= k_lo <= k_hi <= n-1, got k_lo={k_lo}, k_hi={k_hi}, n={n}")

    r_hi_np = np.empty(n)
    r_lo_np = np.empty(n)
    cdef double[::1] r_hi = r_hi_np
    cdef double[::1] r_lo = r_lo_np

    cdef double *best = <double *> malloc(k_hi * sizeof(double))
    if best == NULL:
        raise MemoryError()

    cdef Py_ssize_t i, j, t, pos, cnt
    cdef double d2, diff, worst
    try:
        with nogil:
            for i in range(n):
                cnt = 0
                worst = INFINITY
                for j in range(n):
                    if j == i:
                        continue
                    d2 = 0.0
                    for t in range(dim):
                        diff = xv[i, t] - xv[j, t]
                        d2 += diff * diff
                    if cnt < k_hi:
                        # Sorted insertion while the buffer is filling.
                        pos = cnt
                        while pos > 0 and best[pos - 1] > d2:
                            best[pos] = best[pos - 1]
                            pos -= 1
                        best[pos] = d2
                        cnt += 1
                        if cnt == k_hi:
                            worst = best[k_hi - 1]
                    elif d2 < worst:
                        pos = k_hi - 1
                        while pos > 0 and best[pos - 1] > d2:
                            best[pos] = best[pos - 1]
                            pos -= 1
                        best[pos] = d2
                        worst = best[k_hi - 1]
                r_hi[i] = sqrt(best[k_hi - 1])
                r_lo[i] = sqrt(best[k_lo - 1])
    finally:
        free(best)
    return r_hi_np, r_lo_np
