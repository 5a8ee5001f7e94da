"""Local polynomial regression with eigenvalue truncation.

The fit at x_star solves the kernel-weighted least-squares system
S theta = s with S = sum_i K_i z_i z_i^T and s = sum_i K_i z_i Y_i, where
z_i is the scaled monomial vector of the offset (X_i - x_star)/h and K_i the
kernel weight.  The fitted value is the coefficient of the zero multi-index.
When a truncation rule is configured and the minimum eigenvalue of S falls
below n * tau * psi, the estimate is truncated to zero instead of solved.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import _core
from .kernels import KernelSpec, kernel_weights
from .poly import PolyBasis, build_basis, feature_matrix
from .samples import SampleSet

__all__ = [
    "Truncation",
    "LprConfig",
    "LprFit",
    "SingularSystemError",
    "WeightsUnavailableError",
    "ActiveWindow",
    "assemble_system",
    "lpr_fit",
    "effective_weights",
]


class SingularSystemError(ArithmeticError):
    """The moment matrix is numerically singular and truncation is disabled.

    Carries the minimum eigenvalue so callers can decide on a fallback.
    """

    def __init__(self, min_eigenvalue: float):
        self.min_eigenvalue = float(min_eigenvalue)
        super().__init__(
            f"local system is numerically singular (min eigenvalue {min_eigenvalue:.3e})"
        )


class WeightsUnavailableError(RuntimeError):
    """Effective weights requested for a truncated fit, where none exist."""


@dataclass(frozen=True)
class Truncation:
    """Threshold inputs for the zero-truncation rule.

    The fit is zeroed out when min-eig(S) < n * tau * psi.
    """

    tau: float
    psi: float

    def __post_init__(self):
        if self.tau < 0:
            raise ValueError(f"tau must be >= 0, got {self.tau}")
        if self.psi <= 0:
            raise ValueError(f"psi must be > 0, got {self.psi}")

    @classmethod
    def from_regime(cls, params, h: float, exponent: float = 2.0) -> "Truncation":
        """Build the rule from regime parameters at bandwidth h."""
        from . import rates

        return cls(
            tau=rates.robustness_factor(params, h, exponent=exponent),
            psi=rates.density_balance(params, h),
        )


@dataclass(frozen=True)
class LprConfig:
    """Bandwidth, degree, kernel and stability settings for one fit."""

    h: float
    degree: int
    kernel: KernelSpec = KernelSpec()
    truncation: Truncation | None = None
    ridge_epsilon: float = 0.0

    def __post_init__(self):
        if self.h <= 0:
            raise ValueError(f"bandwidth h must be positive, got {self.h}")
        if self.degree < 0:
            raise ValueError(f"degree must be >= 0, got {self.degree}")
        if self.ridge_epsilon < 0:
            raise ValueError(f"ridge_epsilon must be >= 0, got {self.ridge_epsilon}")


@dataclass(frozen=True)
class ActiveWindow:
    """Rows with nonzero kernel weight: indices, feature rows, and weights."""

    indices: np.ndarray
    features: np.ndarray
    weights: np.ndarray


@dataclass(frozen=True)
class LprFit:
    """Fit result plus diagnostics.

    ``value`` is 0 when ``truncated``; otherwise it solves the local system.
    The effective weight vector is computed on demand via
    :func:`effective_weights`.
    """

    value: float
    min_eigenvalue: float
    truncated: bool
    active_count: int
    _n: int = field(repr=False)
    _data: SampleSet | None = field(repr=False, default=None)
    _x_star: np.ndarray | None = field(repr=False, default=None)
    _cfg: LprConfig | None = field(repr=False, default=None)
    _basis: PolyBasis | None = field(repr=False, default=None)
    _active_idx: np.ndarray | None = field(repr=False, default=None)
    _gain: np.ndarray | None = field(repr=False, default=None)

    @property
    def weights(self) -> np.ndarray:
        """Full-length effective weight vector; see :func:`effective_weights`."""
        return effective_weights(self)


def _check_x_star(data: SampleSet, x_star) -> np.ndarray:
    x_star = np.asarray(x_star, dtype=float)
    if x_star.shape != (data.ambient_dim,):
        raise ValueError(
            f"x_star must have shape ({data.ambient_dim},), got {x_star.shape}"
        )
    return x_star


def _moment_system(data: SampleSet, x_star: np.ndarray, cfg: LprConfig, basis: PolyBasis):
    return _core.moment_system(
        data.x,
        data.y,
        x_star,
        cfg.h,
        basis.exponents,
        basis.inv_factorial,
        cfg.kernel.kind_code,
        cfg.kernel.support_code,
        cfg.kernel.epa_floor,
    )


def assemble_system(data: SampleSet, x_star, cfg: LprConfig):
    """Build (S, s) and the active-row map for inspection.

    Returns
    -------
    (S, s, window) : S is the symmetric moment matrix, s the weighted response
    moments, and window an :class:`ActiveWindow` holding only the rows with
    nonzero kernel weight.
    """
    x_star = _check_x_star(data, x_star)
    basis = build_basis(data.ambient_dim, cfg.degree)
    s_mat, s_vec, active_idx = _moment_system(data, x_star, cfg, basis)
    offsets = (data.x[active_idx] - x_star) / cfg.h
    window = ActiveWindow(
        indices=active_idx,
        features=feature_matrix(basis, offsets),
        weights=kernel_weights(cfg.kernel, offsets),
    )
    return s_mat, s_vec, window


def lpr_fit(data: SampleSet, x_star, cfg: LprConfig) -> LprFit:
    """Fit the local polynomial estimator at ``x_star``.

    Applies the zero-truncation rule when configured; otherwise solves the
    symmetric system through its eigendecomposition (or Cholesky with the
    optional ridge jitter).  Rank-deficient windows are solved only when the
    fitted value is uniquely determined; see :func:`_solve_for_gain`.

    Raises
    ------
    SingularSystemError
        If the fitted value is numerically underdetermined and truncation is
        disabled.  Garbage values are never silently returned.
    """
    x_star = _check_x_star(data, x_star)
    basis = build_basis(data.ambient_dim, cfg.degree)
    s_mat, s_vec, active_idx = _moment_system(data, x_star, cfg, basis)

    if active_idx.size:
        evals, evecs = np.linalg.eigh(s_mat)
        min_eig = float(evals[0])
    else:
        evals = evecs = None
        min_eig = 0.0

    if cfg.truncation is not None:
        threshold = data.n * cfg.truncation.tau * cfg.truncation.psi
        if min_eig < threshold:
            return LprFit(
                value=0.0,
                min_eigenvalue=min_eig,
                truncated=True,
                active_count=int(active_idx.size),
                _n=data.n,
            )

    gain = _solve_for_gain(s_mat, evals, evecs, min_eig, cfg.ridge_epsilon)
    return LprFit(
        value=float(gain @ s_vec),
        min_eigenvalue=min_eig,
        truncated=False,
        active_count=int(active_idx.size),
        _n=data.n,
        _data=data,
        _x_star=x_star,
        _cfg=cfg,
        _basis=basis,
        _active_idx=active_idx,
        _gain=gain,
    )


def _solve_for_gain(s_mat, evals, evecs, min_eig, ridge_epsilon):
    """The gain vector g = S^{-1} e_1; the fitted value is g . s.

    Designs whose active rows satisfy exact polynomial relations (e.g. target
    covariates lying on an algebraic manifold) make S rank-deficient even
    with many points in the window, yet the fitted value stays uniquely
    determined whenever e_1 has no component in the null space: the
    minimum-norm solve then returns that unique value.  Windows where the
    value itself is underdetermined (too few or collapsed points) fail the
    null-space check and raise.
    """
    m = s_mat.shape[0]
    e1 = np.zeros(m)
    e1[0] = 1.0

    if ridge_epsilon > 0:
        system = s_mat + ridge_epsilon * np.eye(m)
        try:
            cho = scipy.linalg.cho_factor(system, lower=True)
        except (scipy.linalg.LinAlgError, np.linalg.LinAlgError):
            raise SingularSystemError(min_eig) from None
        return scipy.linalg.cho_solve(cho, e1)

    if evals is None or evals[-1] <= 0:
        raise SingularSystemError(min_eig)
    cutoff = float(evals[-1]) * m * np.finfo(float).eps
    keep = evals > cutoff
    basis_kept = evecs[:, keep]
    gain = basis_kept @ ((basis_kept.T @ e1) / evals[keep])
    if not np.all(keep):
        residual = np.linalg.norm(s_mat @ gain - e1)
        if residual > 1e-6:
            raise SingularSystemError(min_eig)
    return gain


def effective_weights(fit: LprFit) -> np.ndarray:
    """Weight vector w with fitted value = sum_i w_i Y_i.

    Defined only for untruncated fits; w_i = e_1^T S^{-1} z_i K_i, zero for
    rows outside the kernel window.
    """
    if fit.truncated or fit._gain is None:
        raise WeightsUnavailableError("effective weights do not exist for a truncated fit")
    data, cfg, basis = fit._data, fit._cfg, fit._basis
    offsets = (data.x[fit._active_idx] - fit._x_star) / cfg.h
    z = feature_matrix(basis, offsets)
    kw = kernel_weights(cfg.kernel, offsets)
    weights = np.zeros(fit._n)
    weights[fit._active_idx] = (z @ fit._gain) * kw
    return weights
