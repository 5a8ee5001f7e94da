"""Compactly supported localization kernels.

Two kinds are provided, both bounded away from zero and infinity on their
support, which is either the closed Euclidean unit ball (default) or the
closed sup-norm unit cube:

* ``box``: constant 1/2 on the support.
* ``epa``: the Epanechnikov profile 3/4*(1 - ||u||^2) floored at a small
  positive constant so the two-sided bound still holds near the boundary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "BOX",
    "EPA",
    "BALL",
    "CUBE",
    "KernelSpec",
    "kernel_eval",
    "kernel_weights",
    "scaled_kernel",
]

BOX = "box"
EPA = "epa"
BALL = "ball"
CUBE = "cube"

DEFAULT_EPA_FLOOR = 0.05

_KIND_CODES = {BOX: 0, EPA: 1}
_SUPPORT_CODES = {BALL: 0, CUBE: 1}


@dataclass(frozen=True)
class KernelSpec:
    """Kernel kind plus support shape; radius is fixed at 1.

    ``epa_floor`` only affects the ``epa`` kind.
    """

    kind: str = BOX
    support: str = BALL
    epa_floor: float = DEFAULT_EPA_FLOOR

    def __post_init__(self) -> None:
        if self.kind not in _KIND_CODES:
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.support not in _SUPPORT_CODES:
            raise ValueError(f"unknown support shape {self.support!r}")
        if self.kind == EPA and not 0.0 < self.epa_floor <= 0.75:
            raise ValueError("epa_floor must lie in (0, 0.75]")

    @property
    def lower_bound(self) -> float:
        """c such that K(u) >= c on the support."""
        return 0.5 if self.kind == BOX else self.epa_floor

    @property
    def upper_bound(self) -> float:
        """C such that K(u) <= C everywhere."""
        return 0.5 if self.kind == BOX else 0.75

    @property
    def kind_code(self) -> int:
        return _KIND_CODES[self.kind]

    @property
    def support_code(self) -> int:
        return _SUPPORT_CODES[self.support]


def kernel_weights(spec: KernelSpec, offsets: np.ndarray) -> np.ndarray:
    """K(u) for each row u of ``offsets``; exact zero outside the support."""
    offsets = np.atleast_2d(np.asarray(offsets, dtype=float))
    sq = np.einsum("ij,ij->i", offsets, offsets)
    if spec.support == BALL:
        inside = sq <= 1.0
    else:
        inside = np.max(np.abs(offsets), axis=1) <= 1.0
    if spec.kind == BOX:
        vals = np.where(inside, 0.5, 0.0)
    else:
        vals = np.where(inside, np.maximum(0.75 * (1.0 - sq), spec.epa_floor), 0.0)
    return vals


def kernel_eval(spec: KernelSpec, u) -> float:
    """Evaluate K at a single offset vector."""
    return float(kernel_weights(spec, np.asarray(u, dtype=float)[None, :])[0])


def scaled_kernel(spec: KernelSpec, x, x_star, h: float) -> float:
    """K((x - x_star) / h).

    No 1/h**D prefactor is applied: the bandwidth-power normalization belongs
    to the analytical rate formulas, not to the weight matrix.
    """
    if h <= 0:
        raise ValueError(f"bandwidth h must be positive, got {h}")
    x = np.asarray(x, dtype=float)
    x_star = np.asarray(x_star, dtype=float)
    if x.shape != x_star.shape:
        raise ValueError(f"shape mismatch: {x.shape} vs {x_star.shape}")
    return kernel_eval(spec, (x - x_star) / h)
