"""Shared test oracles, kept independent of the library code paths.

All expected values asserted in the tests are computed here by brute force
(naive enumeration, dense solves, extended-precision arithmetic) rather than
by the implementations under test.
"""

from __future__ import annotations

import itertools
import math
from decimal import Decimal, getcontext

import numpy as np

getcontext().prec = 60


def dec_pow(base: float, exponent: float) -> float:
    """base**exponent at 60 significant digits, back to float."""
    if base == 0.0:
        return 0.0 if exponent > 0 else 1.0
    b = Decimal(repr(base)) if isinstance(base, float) else Decimal(base)
    e = Decimal(repr(exponent)) if isinstance(exponent, float) else Decimal(exponent)
    return float((e * b.ln()).exp())


def dec_log(value) -> Decimal:
    return Decimal(repr(float(value))).ln()


def naive_multi_indices(dim: int, degree: int) -> set[tuple[int, ...]]:
    """All exponent tuples with total degree <= degree, by raw product scan."""
    out = set()
    for tup in itertools.product(range(degree + 1), repeat=dim):
        if sum(tup) <= degree:
            out.add(tup)
    return out


def naive_features(indices, u) -> np.ndarray:
    """Direct per-monomial evaluation of the scaled feature vector."""
    u = np.asarray(u, dtype=float)
    vals = []
    for alpha in indices:
        term = 1.0
        for uj, aj in zip(u, alpha):
            term *= uj**aj / math.factorial(aj)
        vals.append(term)
    return np.array(vals)


def naive_kernel(offsets, kind="box", support="ball", floor=0.05) -> np.ndarray:
    """Scalar-loop kernel evaluation."""
    offsets = np.atleast_2d(offsets)
    out = []
    for u in offsets:
        if support == "ball":
            inside = math.sqrt(float(np.dot(u, u))) <= 1.0
        else:
            inside = max(abs(float(v)) for v in u) <= 1.0
        if not inside:
            out.append(0.0)
        elif kind == "box":
            out.append(0.5)
        else:
            out.append(max(0.75 * (1.0 - float(np.dot(u, u))), floor))
    return np.array(out)


def naive_lpr(x, y, x_star, h, degree, kind="box", support="ball", floor=0.05):
    """Dense-system oracle: full Z and W, general-purpose solve.

    Returns (value, S, s).  No row skipping, no symmetry tricks.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    x_star = np.asarray(x_star, dtype=float)
    dim = x.shape[1]
    indices = sorted(naive_multi_indices(dim, degree), key=lambda r: (sum(r), tuple(-a for a in r)))
    offsets = (x - x_star) / h
    z = np.array([naive_features(indices, u) for u in offsets])
    w = naive_kernel(offsets, kind=kind, support=support, floor=floor)
    s_mat = np.zeros((len(indices), len(indices)))
    s_vec = np.zeros(len(indices))
    for i in range(len(x)):
        for a in range(len(indices)):
            s_vec[a] += w[i] * z[i, a] * y[i]
            for b in range(len(indices)):
                s_mat[a, b] += w[i] * z[i, a] * z[i, b]
    theta = np.linalg.solve(s_mat, s_vec)
    return float(theta[0]), s_mat, s_vec


def brute_knn_radius(points, i: int, k: int) -> float:
    """Sorted full distance list, k-th entry with self removed."""
    points = np.asarray(points, dtype=float)
    dists = sorted(
        float(np.linalg.norm(points[j] - points[i])) for j in range(len(points)) if j != i
    )
    return dists[k - 1]


def _dpow(base: Decimal, exponent: Decimal) -> Decimal:
    if base == 0:
        return Decimal(0) if exponent > 0 else Decimal(1)
    return (exponent * base.ln()).exp()


def oracle_rate_quantities(n_p, n_q, beta, d, big_d, rho, h, exponent=2.0, c4=1.0, c_h=1.5):
    """Every closed-form rate quantity, evaluated in 60-digit decimal.

    Returns a dict of floats keyed by quantity name.  Written independently
    of the library (Decimal arithmetic end to end, including exponents).
    """
    n_p_d, n_q_d = Decimal(n_p), Decimal(n_q)
    beta_d = Decimal(repr(beta))
    d_d, big_d_d = Decimal(d), Decimal(big_d)
    rho_d, h_d = Decimal(repr(rho)), Decimal(repr(h))
    n_d = n_p_d + n_q_d

    transfer_expo = (2 * beta_d + d_d) / (2 * beta_d + big_d_d)
    n_eff = _dpow(n_p_d, transfer_expo) + n_q_d
    kappa = _dpow(n_eff, -1 / (2 * beta_d + d_d))

    reach = max(rho_d, h_d)
    psi = n_p_d / n_d + (n_q_d / n_d) * _dpow(reach, d_d - big_d_d)
    h_pow = _dpow(h_d, big_d_d)
    tau_base = n_p_d * h_pow + n_q_d * _dpow(reach, d_d - big_d_d) * h_pow
    tau = _dpow(tau_base, -Decimal(repr(exponent))) if tau_base > 0 else None

    small = rho_d <= kappa
    if small:
        h_oracle = Decimal(repr(c4)) * _dpow(n_eff, -1 / (2 * beta_d + d_d))
        rate = _dpow(n_eff, -2 * beta_d / (2 * beta_d + d_d))
    else:
        base = n_p_d + n_q_d * _dpow(rho_d, d_d - big_d_d)
        h_oracle = Decimal(repr(c4)) * _dpow(base, -1 / (2 * beta_d + big_d_d))
        rate = _dpow(base, -2 * beta_d / (2 * beta_d + big_d_d))
    if d == big_d:
        rate = _dpow(n_d, -2 * beta_d / (2 * beta_d + big_d_d))

    h_manifold_pooled = _dpow(n_q_d + _dpow(n_p_d, transfer_expo), -1 / (2 * beta_d + d_d))
    h_manifold_target = _dpow(n_q_d, -1 / (2 * beta_d + d_d))
    lepski = None
    if n_p + n_q >= 3:
        lepski_base = (n_q_d + _dpow(n_p_d, transfer_expo)) / n_d.ln()
        lepski = Decimal(repr(c_h)) * _dpow(lepski_base, -1 / (2 * beta_d + d_d))
    samedim = _dpow(n_d, -1 / (2 * beta_d + big_d_d))

    out = {
        "n_eff": n_eff,
        "kappa": kappa,
        "psi": psi,
        "tau": tau,
        "small_regime": small,
        "h_oracle": h_oracle,
        "rate": rate,
        "h_manifold_pooled": h_manifold_pooled,
        "h_manifold_target": h_manifold_target,
        "lepski": lepski,
        "samedim_unit_density": samedim,
    }
    return {k: (float(v) if isinstance(v, Decimal) else v) for k, v in out.items()}


def random_rotation(dim: int, rng) -> np.ndarray:
    """Haar-ish rotation via QR with positive diagonal."""
    a = rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(a)
    return q * np.sign(np.diag(r))


def random_polynomial(rng, dim: int, degree: int, anchor):
    """A random polynomial of total degree <= degree and its evaluator."""
    indices = sorted(naive_multi_indices(dim, degree))
    coeffs = rng.standard_normal(len(indices))
    anchor = np.asarray(anchor, dtype=float)

    def evaluate(pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(pts)
        out = np.zeros(pts.shape[0])
        for c, alpha in zip(coeffs, indices):
            term = np.full(pts.shape[0], c)
            for j, aj in enumerate(alpha):
                term = term * (pts[:, j] - anchor[j]) ** aj
            out += term
        return out

    return evaluate
