"""Seeded generators for the simulation studies.

Three data-generating processes are provided:

* ``samedim``: source and target are full-dimensional uniform boxes with
  partial overlap, source on [-0.5, 0.5]^D and target on [0, 1]^D.  The two
  standard evaluation points are ``X_STAR_INTERIOR`` (inside both supports)
  and ``X_STAR_EXTERIOR`` (inside the target support only, so the source
  carries no local information there).
* ``manifold``: source uniform on [0, 1]^D, target the image of a uniform
  latent draw under a smooth embedding (d=2 into D=5 by default).
* ``approx-manifold``: the manifold target perturbed by rho * U with U
  uniform on [-1, 1]^D, placing the target within distance rho of the
  manifold per coordinate.

Responses are y = mean_function(x) + noise_sd * N(0,1) with the mean a sum
of powered absolute deviations from an anchor point.  All draws come from a
counter-based Philox stream keyed by the spec seed, so a (spec, seed) pair
fully determines the output on every platform; replication r of a study uses
seed = base_seed + r.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .samples import SOURCE, TARGET, SampleSet

__all__ = [
    "SAMEDIM",
    "MANIFOLD",
    "APPROX_MANIFOLD",
    "X_STAR_INTERIOR",
    "X_STAR_EXTERIOR",
    "Z_STAR_LATENT",
    "X_STAR_MANIFOLD",
    "SAMEDIM_SOURCE_BOX",
    "SAMEDIM_TARGET_BOX",
    "EmbeddingMap",
    "quadratic_embedding",
    "GeneratorSpec",
    "mean_function",
    "uniform_box_density",
    "gen_samedim",
    "gen_manifold",
    "gen_approx_manifold",
    "generate",
    "replication_spec",
]

SAMEDIM = "samedim"
MANIFOLD = "manifold"
APPROX_MANIFOLD = "approx-manifold"

# Evaluation points for the same-dimension study.
X_STAR_INTERIOR = (0.2288, 0.2788, 0.2409, 0.2883, 0.2940)
X_STAR_EXTERIOR = (0.7288, 0.7788, 0.7409, 0.7883, 0.7940)

# Uniform supports of the same-dimension study, as (low, high) per coordinate.
SAMEDIM_SOURCE_BOX = (-0.5, 0.5)
SAMEDIM_TARGET_BOX = (0.0, 1.0)

# Latent point and its image used throughout the manifold studies.
Z_STAR_LATENT = (-0.4248, 0.5766)


@dataclass(frozen=True)
class EmbeddingMap:
    """A smooth map from the latent cube [-1,1]^d into the ambient space."""

    latent_dim: int
    ambient_dim: int
    func: Callable[[np.ndarray], np.ndarray]

    def __call__(self, z: np.ndarray) -> np.ndarray:
        z = np.atleast_2d(np.asarray(z, dtype=float))
        if z.shape[1] != self.latent_dim:
            raise ValueError(f"expected latent dim {self.latent_dim}, got {z.shape[1]}")
        out = np.asarray(self.func(z), dtype=float)
        if out.shape != (z.shape[0], self.ambient_dim):
            raise ValueError(f"embedding returned shape {out.shape}")
        return out


def _quadratic(z: np.ndarray) -> np.ndarray:
    z1, z2 = z[:, 0], z[:, 1]
    return np.column_stack(
        [
            (z1 + 1.0) / 2.0,
            (z2 + 1.0) / 2.0,
            z1**2,
            z2**2,
            (z1 + 1.0) * (z2 + 1.0) / 4.0,
        ]
    )


def quadratic_embedding() -> EmbeddingMap:
    """The built-in embedding of [-1,1]^2 into [0,1]^5."""
    return EmbeddingMap(latent_dim=2, ambient_dim=5, func=_quadratic)


X_STAR_MANIFOLD = tuple(float(v) for v in quadratic_embedding()(np.array([Z_STAR_LATENT]))[0])


@dataclass(frozen=True)
class GeneratorSpec:
    """Declarative description of one data-generating process."""

    kind: str
    n_p: int
    n_q: int
    D: int = 5
    d: int = 2
    rho: float = 0.0
    beta_true: float = 2.5
    anchor: tuple[float, ...] | None = None
    noise_sd: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in (SAMEDIM, MANIFOLD, APPROX_MANIFOLD):
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.kind == SAMEDIM and self.d != self.D:
            object.__setattr__(self, "d", self.D)
        if self.rho != 0.0 and self.kind != APPROX_MANIFOLD:
            raise ValueError("rho > 0 requires the approx-manifold kind")
        if self.rho < 0:
            raise ValueError(f"rho must be >= 0, got {self.rho}")
        if self.n_p < 0 or self.n_q < 0 or self.n_p + self.n_q < 1:
            raise ValueError("need non-negative sizes with at least one sample")
        if self.noise_sd < 0:
            raise ValueError(f"noise_sd must be >= 0, got {self.noise_sd}")
        if self.beta_true <= 0:
            raise ValueError(f"beta_true must be positive, got {self.beta_true}")
        if self.anchor is None:
            default = X_STAR_INTERIOR if self.kind == SAMEDIM else X_STAR_MANIFOLD
            object.__setattr__(self, "anchor", tuple(default))
        else:
            object.__setattr__(self, "anchor", tuple(float(v) for v in self.anchor))
        if len(self.anchor) != self.D:
            raise ValueError(f"anchor must have length D={self.D}")

    def anchor_array(self) -> np.ndarray:
        return np.asarray(self.anchor, dtype=float)


def mean_function(x, anchor, beta: float) -> np.ndarray | float:
    """sum_j |x_j - anchor_j|**beta, the true conditional mean."""
    x = np.asarray(x, dtype=float)
    anchor = np.asarray(anchor, dtype=float)
    return np.sum(np.abs(x - anchor) ** beta, axis=-1)


def uniform_box_density(x, box: tuple[float, float], dim: int) -> float:
    """Density of the uniform law on box^dim at x (0 outside)."""
    x = np.asarray(x, dtype=float)
    lo, hi = box
    inside = bool(np.all((x >= lo) & (x <= hi)))
    return 1.0 / (hi - lo) ** dim if inside else 0.0


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed))


def _responses(rng, x: np.ndarray, spec: GeneratorSpec) -> np.ndarray:
    y = mean_function(x, spec.anchor_array(), spec.beta_true)
    if spec.noise_sd > 0:
        y = y + spec.noise_sd * rng.standard_normal(x.shape[0])
    else:
        y = np.asarray(y, dtype=float)
    return y


def _assemble(xs: np.ndarray, xt: np.ndarray, rng, spec: GeneratorSpec) -> SampleSet:
    x = np.vstack([xs, xt])
    y = _responses(rng, x, spec)
    origin = np.array([SOURCE] * len(xs) + [TARGET] * len(xt), dtype="U1")
    return SampleSet(x=x, y=y, origin=origin)


def gen_samedim(spec: GeneratorSpec) -> SampleSet:
    """Source uniform on [-0.5,0.5]^D, target uniform on [0,1]^D."""
    if spec.kind != SAMEDIM:
        raise ValueError(f"expected kind {SAMEDIM!r}, got {spec.kind!r}")
    rng = _rng(spec.seed)
    lo_s, hi_s = SAMEDIM_SOURCE_BOX
    lo_t, hi_t = SAMEDIM_TARGET_BOX
    xs = lo_s + (hi_s - lo_s) * rng.random((spec.n_p, spec.D))
    xt = lo_t + (hi_t - lo_t) * rng.random((spec.n_q, spec.D))
    return _assemble(xs, xt, rng, spec)


def _gen_on_manifold(spec: GeneratorSpec, rho: float) -> SampleSet:
    embedding = quadratic_embedding()
    if (spec.d, spec.D) != (embedding.latent_dim, embedding.ambient_dim):
        raise ValueError(
            f"built-in embedding requires d={embedding.latent_dim}, D={embedding.ambient_dim}"
        )
    rng = _rng(spec.seed)
    xs = rng.random((spec.n_p, spec.D))
    latent = 2.0 * rng.random((spec.n_q, spec.d)) - 1.0
    bump = 2.0 * rng.random((spec.n_q, spec.D)) - 1.0
    xt = embedding(latent) + rho * bump
    return _assemble(xs, xt, rng, spec)


def gen_manifold(spec: GeneratorSpec) -> SampleSet:
    """Source uniform on [0,1]^D, target exactly on the embedded manifold."""
    if spec.kind != MANIFOLD:
        raise ValueError(f"expected kind {MANIFOLD!r}, got {spec.kind!r}")
    return _gen_on_manifold(spec, rho=0.0)


def gen_approx_manifold(spec: GeneratorSpec) -> SampleSet:
    """Manifold target perturbed by rho * Uniform([-1,1]^D)."""
    if spec.kind != APPROX_MANIFOLD:
        raise ValueError(f"expected kind {APPROX_MANIFOLD!r}, got {spec.kind!r}")
    return _gen_on_manifold(spec, rho=spec.rho)


def generate(spec: GeneratorSpec) -> SampleSet:
    """Dispatch on the spec kind."""
    if spec.kind == SAMEDIM:
        return gen_samedim(spec)
    if spec.kind == MANIFOLD:
        return gen_manifold(spec)
    return gen_approx_manifold(spec)


def replication_spec(spec: GeneratorSpec, index: int) -> GeneratorSpec:
    """The spec for replication ``index``: seed shifted by the index."""
    if index < 0:
        raise ValueError(f"replication index must be >= 0, got {index}")
    return replace(spec, seed=spec.seed + index)
