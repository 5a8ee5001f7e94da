"""Multi-index polynomial bases of bounded total degree.

A basis over ``dim`` variables and total degree ``degree`` collects every
exponent tuple (a_1, ..., a_dim) with non-negative entries summing to at most
``degree``.  The associated feature vector evaluated at u has one entry per
multi-index, ``prod_j u_j**a_j / a_j!``, so the zero index (listed first)
always contributes an exact 1 and extracting coefficient 0 of a local
least-squares fit yields the fitted function value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = ["PolyBasis", "build_basis", "eval_features", "feature_matrix", "basis_size"]


def basis_size(dim: int, degree: int) -> int:
    """Number of multi-indices in ``dim`` variables with total degree <= ``degree``."""
    return math.comb(dim + degree, degree)


@dataclass(frozen=True)
class PolyBasis:
    """Ordered multi-index set with cached factorial scaling.

    Attributes
    ----------
    dim : int
        Number of variables.
    degree : int
        Maximum total degree.
    exponents : np.ndarray, shape (size, dim), dtype int64
        One row per multi-index, graded order (total degree ascending), ties
        broken lexicographically with the leading variable first.  Row 0 is
        always the all-zeros index.
    inv_factorial : np.ndarray, shape (size,)
        1 / prod_j a_j! per row, precomputed once.
    """

    dim: int
    degree: int
    exponents: np.ndarray = field(repr=False)
    inv_factorial: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return self.exponents.shape[0]

    def indices(self) -> list[tuple[int, ...]]:
        """Multi-indices as plain tuples, in basis order."""
        return [tuple(int(a) for a in row) for row in self.exponents]


def build_basis(dim: int, degree: int) -> PolyBasis:
    """Enumerate all multi-indices with total degree <= ``degree``.

    Parameters
    ----------
    dim : int
        Number of variables, >= 1.
    degree : int
        Maximum total degree, >= 0.

    Returns
    -------
    PolyBasis
        Indices in graded order with the zero index first; the count equals
        binomial(dim + degree, degree).
    """
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    if degree < 0:
        raise ValueError(f"degree must be >= 0, got {degree}")

    rows: list[tuple[int, ...]] = []

    def extend(prefix: tuple[int, ...], remaining: int) -> None:
        if len(prefix) == dim:
            rows.append(prefix)
            return
        for a in range(remaining + 1):
            extend(prefix + (a,), remaining - a)

    extend((), degree)
    # Graded order; within a grade the index with the larger leading exponent
    # comes first, matching e.g. (1,0) before (0,1).
    rows.sort(key=lambda r: (sum(r), tuple(-a for a in r)))

    exponents = np.array(rows, dtype=np.int64)
    inv_factorial = np.array(
        [1.0 / math.prod(math.factorial(a) for a in row) for row in rows]
    )
    return PolyBasis(dim=dim, degree=degree, exponents=exponents, inv_factorial=inv_factorial)


def eval_features(basis: PolyBasis, u) -> np.ndarray:
    """Evaluate the scaled monomial vector at a single point ``u``.

    Entry for multi-index a is ``prod_j u_j**a_j / a_j!``; the zero index
    evaluates to exactly 1.
    """
    u = np.asarray(u, dtype=float)
    if u.shape != (basis.dim,):
        raise ValueError(f"expected u of shape ({basis.dim},), got {u.shape}")
    return feature_matrix(basis, u[None, :])[0]


def feature_matrix(basis: PolyBasis, points: np.ndarray) -> np.ndarray:
    """Evaluate the feature vector for every row of ``points``.

    Parameters
    ----------
    points : np.ndarray, shape (n, dim)

    Returns
    -------
    np.ndarray, shape (n, basis.size)
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] != basis.dim:
        raise ValueError(f"expected points of shape (n, {basis.dim}), got {points.shape}")
    n = points.shape[0]
    out = np.tile(basis.inv_factorial, (n, 1))
    for j in range(basis.dim):
        # u_j**a for a = 0..degree, then gathered per column of exponents.
        pows = points[:, j : j + 1] ** np.arange(basis.degree + 1)
        out *= pows[:, basis.exponents[:, j]]
    return out
