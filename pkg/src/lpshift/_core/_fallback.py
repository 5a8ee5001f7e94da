"""Vectorized numpy implementations of the hot kernels.

Mirrors the signatures of the compiled module ``_speedups`` exactly; used
when the extension is unavailable or when forced via LPSHIFT_BACKEND=python.
"""

from __future__ import annotations

import numpy as np


def moment_system(x, y, x_star, h, exponents, inv_factorial, kind_code, support_code, epa_floor):
    """Accumulate S = sum_i K_i z_i z_i^T and s = sum_i K_i z_i y_i.

    Rows with zero kernel weight are skipped.  Returns (S, s, active_idx)
    where active_idx are the indices with nonzero weight.
    """
    x = np.ascontiguousarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    x_star = np.asarray(x_star, dtype=float)
    m = exponents.shape[0]

    u = (x - x_star) / h
    sq = np.einsum("ij,ij->i", u, u)
    if support_code == 0:
        inside = sq <= 1.0
    else:
        inside = np.max(np.abs(u), axis=1) <= 1.0
    active_idx = np.nonzero(inside)[0]

    if active_idx.size == 0:
        return np.zeros((m, m)), np.zeros(m), active_idx

    ua = u[active_idx]
    if kind_code == 0:
        w = np.full(active_idx.size, 0.5)
    else:
        w = np.maximum(0.75 * (1.0 - sq[active_idx]), epa_floor)

    max_degree = int(exponents.max())
    z = np.tile(inv_factorial, (active_idx.size, 1))
    for j in range(x.shape[1]):
        pows = ua[:, j : j + 1] ** np.arange(max_degree + 1)
        z *= pows[:, exponents[:, j]]

    wz = z * w[:, None]
    s_mat = wz.T @ z
    s_vec = wz.T @ y[active_idx]
    # Symmetrize: the BLAS product carries tiny asymmetries.
    s_mat = 0.5 * (s_mat + s_mat.T)
    return s_mat, s_vec, active_idx


def knn_radii_pair(x, k_hi, k_lo, chunk=512):
    """Distance to the k_hi-th and k_lo-th nearest neighbor (self excluded).

    Both k's are 1-indexed order statistics of the Euclidean distances from
    each row to all others.  Returns (r_hi, r_lo) of length n.
    """
    x = np.ascontiguousarray(x, dtype=float)
    n = x.shape[0]
    if not 1 <= k_lo <= k_hi <= n - 1:
        raise ValueError(f"need 1 <= k_lo <= k_hi <= n-1, got k_lo={k_lo}, k_hi={k_hi}, n={n}")
    sq = np.einsum("ij,ij->i", x, x)
    r_hi = np.empty(n)
    r_lo = np.empty(n)
    for start in range(0, n, chunk):
        stop = min(start + chunk, n)
        # Squared distances via the Gram trick, assembled in place.
        d2 = x[start:stop] @ x.T
        d2 *= -2.0
        d2 += sq[start:stop, None]
        d2 += sq[None, :]
        np.maximum(d2, 0.0, out=d2)
        d2[np.arange(start, stop) - start, np.arange(start, stop)] = np.inf
        d2.partition((k_lo - 1, k_hi - 1), axis=1)
        r_lo[start:stop] = np.sqrt(d2[:, k_lo - 1])
        r_hi[start:stop] = np.sqrt(d2[:, k_hi - 1])
    return r_hi, r_lo
