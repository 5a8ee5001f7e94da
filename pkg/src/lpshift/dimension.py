"""Intrinsic dimension estimation from k-nearest-neighbor distance ratios.

In a d-dimensional set the distance needed to enclose k points versus
ceil(k/2) points shrinks like 2^(1/d), so d is recovered from the log of the
ratio of the two neighbor radii.  Per-point estimates are aggregated by
averaging or majority vote.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _core

__all__ = [
    "DimEstimate",
    "round_half_away",
    "knn_radius",
    "local_dim",
    "local_dims",
    "estimate_dim",
]

METHOD_AVG = "avg"
METHOD_VOTE = "vote"


def round_half_away(x: float) -> int:
    """Nearest integer with halves rounded away from zero."""
    return int(math.floor(x + 0.5)) if x >= 0 else -int(math.floor(-x + 0.5))


@dataclass(frozen=True)
class DimEstimate:
    """Per-point estimates plus both aggregates.

    ``local`` entries are capped to [1, D] before aggregation; ``value`` is
    the aggregate picked by the requested method.
    """

    local: np.ndarray
    d_avg: int
    d_vote: int
    k: int
    value: int


def _as_points(points) -> np.ndarray:
    pts = np.ascontiguousarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise ValueError(f"points must be a 2-d array with >= 2 rows, got shape {pts.shape}")
    return pts


def knn_radius(points, i: int, k: int) -> float:
    """Exact distance from points[i] to its k-th nearest neighbor (self excluded)."""
    pts = _as_points(points)
    n = pts.shape[0]
    if not 0 <= i < n:
        raise ValueError(f"index {i} out of range for {n} points")
    if not 1 <= k <= n - 1:
        raise ValueError(f"need 1 <= k <= n-1={n - 1}, got k={k}")
    diffs = pts - pts[i]
    dists = np.sqrt(np.einsum("ij,ij->i", diffs, diffs))
    dists = np.delete(dists, i)
    dists.sort()
    return float(dists[k - 1])


def _dim_from_radii(r_hi: float, r_lo: float, ambient_dim: int) -> int:
    # Duplicated points up to the k-th neighbor (ratio 1): infinite apparent
    # density, mapped to the ambient cap.  A zero inner radius with a positive
    # outer one behaves like ratio infinity and maps to 1.
    if r_hi <= 0.0 or r_hi == r_lo:
        return ambient_dim
    if r_lo <= 0.0:
        return 1
    raw = math.log(2.0) / math.log(r_hi / r_lo)
    return min(max(round_half_away(raw), 1), ambient_dim)


def local_dim(points, i: int, k: int, ambient_dim: int | None = None) -> int:
    """Per-point estimate from the ratio of the k-th and ceil(k/2)-th radii."""
    pts = _as_points(points)
    if k < 2:
        raise ValueError(f"need k >= 2, got {k}")
    if ambient_dim is None:
        ambient_dim = pts.shape[1]
    r_hi = knn_radius(pts, i, k)
    r_lo = knn_radius(pts, i, math.ceil(k / 2))
    return _dim_from_radii(r_hi, r_lo, ambient_dim)


def local_dims(points, k: int, ambient_dim: int | None = None) -> np.ndarray:
    """Per-point estimates for every row, via the bulk radii backend."""
    pts = _as_points(points)
    if k < 2:
        raise ValueError(f"need k >= 2, got {k}")
    if pts.shape[0] < k + 1:
        raise ValueError(f"need at least k+1={k + 1} points, got {pts.shape[0]}")
    if ambient_dim is None:
        ambient_dim = pts.shape[1]
    r_hi, r_lo = _core.knn_radii_pair(pts, k, math.ceil(k / 2))
    return np.array(
        [_dim_from_radii(hi, lo, ambient_dim) for hi, lo in zip(r_hi, r_lo)], dtype=np.int64
    )


def estimate_dim(points, k: int = 10, method: str = METHOD_AVG) -> DimEstimate:
    """Aggregate the per-point estimates.

    Parameters
    ----------
    points : array, shape (n, D)
        Typically the target covariates only.
    k : int
        Neighborhood size, >= 2; needs n >= k + 1.
    method : {"avg", "vote"}
        Which aggregate ``value`` reports.  Vote ties break toward the
        smaller dimension.
    """
    if method not in (METHOD_AVG, METHOD_VOTE):
        raise ValueError(f"method must be 'avg' or 'vote', got {method!r}")
    pts = _as_points(points)
    local = local_dims(pts, k)
    d_avg = round_half_away(float(np.mean(local)))
    counts = np.bincount(local)
    d_vote = int(np.argmax(counts))  # first maximum = smallest dimension on ties
    value = d_avg if method == METHOD_AVG else d_vote
    return DimEstimate(local=local, d_avg=d_avg, d_vote=d_vote, k=k, value=value)
