"""Closed-form rate and bandwidth calculators.

The estimation problem is parameterized by source/target sample sizes, the
smoothness ``beta`` of the mean function, the intrinsic dimension ``d`` of
the target support, the ambient dimension ``D``, and the distance ``rho`` of
the target support from an exact d-dimensional manifold.  The optimal
squared-error rate switches regime at a threshold value of rho
(``phase_threshold``): below it the effective-sample-size rate applies,
above it rho enters the rate.  All powers are computed in the log domain.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

__all__ = [
    "RegimeParams",
    "Regime",
    "RegimeLabel",
    "effective_sample_size",
    "phase_threshold",
    "density_balance",
    "robustness_factor",
    "classify_regime",
    "oracle_bandwidth",
    "samedim_bandwidth",
    "manifold_bandwidths",
    "lepski_bandwidth",
    "theoretical_rate",
]


def _pow(base: float, exponent: float) -> float:
    """base**exponent via exp/log; base 0 maps to 0 for positive exponents."""
    if base == 0.0:
        if exponent > 0:
            return 0.0
        if exponent == 0:
            return 1.0
        raise ZeroDivisionError("0 raised to a negative power")
    return math.exp(exponent * math.log(base))


@dataclass(frozen=True)
class RegimeParams:
    """Problem-size bundle from which every rate quantity derives."""

    n_p: int
    n_q: int
    beta: float
    d: int
    D: int
    rho: float = 0.0

    def __post_init__(self):
        if self.n_p < 0 or self.n_q < 0:
            raise ValueError("sample sizes must be non-negative")
        if self.n_p + self.n_q < 1:
            raise ValueError("need at least one sample overall")
        if self.beta <= 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if not 1 <= self.d <= self.D:
            raise ValueError(f"need 1 <= d <= D, got d={self.d}, D={self.D}")
        if self.rho < 0:
            raise ValueError(f"rho must be >= 0, got {self.rho}")

    @property
    def n(self) -> int:
        return self.n_p + self.n_q


class Regime(enum.Enum):
    SMALL_RHO = "SmallRho"
    LARGE_RHO = "LargeRho"


@dataclass(frozen=True)
class RegimeLabel:
    """Classification outcome together with the threshold it was tested against."""

    regime: Regime
    kappa_star: float


def effective_sample_size(p: RegimeParams) -> float:
    """n_P^((2 beta + d)/(2 beta + D)) + n_Q, the transfer-adjusted sample size."""
    expo = (2.0 * p.beta + p.d) / (2.0 * p.beta + p.D)
    return _pow(float(p.n_p), expo) + float(p.n_q)


def phase_threshold(p: RegimeParams) -> float:
    """The rho level at which the rate changes regime: n_eff^(-1/(2 beta + d))."""
    return _pow(effective_sample_size(p), -1.0 / (2.0 * p.beta + p.d))


def density_balance(p: RegimeParams, h: float) -> float:
    """n_P/n + (n_Q/n) * max(rho, h)^(d - D).

    Normalizes the expected kernel mass for a target supported near a
    d-dimensional set inside an ambient D-dimensional window.
    """
    if h <= 0:
        raise ValueError(f"bandwidth h must be positive, got {h}")
    n = float(p.n)
    return p.n_p / n + (p.n_q / n) * _pow(max(p.rho, h), float(p.d - p.D))


def robustness_factor(p: RegimeParams, h: float, exponent: float = 2.0) -> float:
    """(n_P h^D + n_Q max(rho, h)^(d-D) h^D)^(-exponent).

    The truncation threshold for the local fit is n * this * density_balance.
    """
    if h <= 0:
        raise ValueError(f"bandwidth h must be positive, got {h}")
    if exponent <= 1:
        raise ValueError(f"exponent must be > 1, got {exponent}")
    h_pow = _pow(h, float(p.D))
    base = p.n_p * h_pow + p.n_q * _pow(max(p.rho, h), float(p.d - p.D)) * h_pow
    if base <= 0:
        raise ValueError("degenerate configuration: truncation base is zero")
    return _pow(base, -exponent)


def classify_regime(p: RegimeParams, boundary_scale: float = 1.0) -> RegimeLabel:
    """Assign SmallRho iff rho <= boundary_scale * phase_threshold.

    The boundary itself goes to SmallRho; ``boundary_scale`` exists for
    sensitivity studies around the (constant-free) threshold.
    """
    if boundary_scale <= 0:
        raise ValueError(f"boundary_scale must be positive, got {boundary_scale}")
    kappa = phase_threshold(p)
    regime = Regime.SMALL_RHO if p.rho <= boundary_scale * kappa else Regime.LARGE_RHO
    return RegimeLabel(regime=regime, kappa_star=kappa)


def oracle_bandwidth(
    p: RegimeParams, c4: float = 1.0, boundary_scale: float = 1.0
) -> tuple[float, RegimeLabel]:
    """Regime-matched bandwidth given full knowledge of the parameters."""
    if c4 <= 0:
        raise ValueError(f"c4 must be positive, got {c4}")
    label = classify_regime(p, boundary_scale)
    if label.regime is Regime.SMALL_RHO:
        h = c4 * _pow(effective_sample_size(p), -1.0 / (2.0 * p.beta + p.d))
    else:
        base = p.n_p + p.n_q * _pow(p.rho, float(p.d - p.D))
        h = c4 * _pow(base, -1.0 / (2.0 * p.beta + p.D))
    return h, label


def samedim_bandwidth(n: int, density: float, beta: float, d: int) -> float:
    """(n * density)^(-1/(2 beta + d)) for full-dimensional supports.

    ``density`` is the relevant covariate density at the evaluation point:
    the split-weighted mix for the pooled fit, the target density alone for
    the target-only fit.
    """
    if density <= 0:
        raise ValueError(f"density at the evaluation point must be positive, got {density}")
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    return _pow(n * density, -1.0 / (2.0 * beta + d))


def manifold_bandwidths(n_p: int, n_q: int, beta: float, d: int, D: int) -> tuple[float, float]:
    """Bandwidths (pooled, target-only) for a target supported on a manifold."""
    if n_q < 1:
        raise ValueError(f"need n_q >= 1, got {n_q}")
    expo = (2.0 * beta + d) / (2.0 * beta + D)
    h_pooled = _pow(n_q + _pow(float(n_p), expo), -1.0 / (2.0 * beta + d))
    h_target = _pow(float(n_q), -1.0 / (2.0 * beta + d))
    return h_pooled, h_target


def lepski_bandwidth(
    n_p: int, n_q: int, beta_tilde: float, d: int, D: int, c_h: float
) -> float:
    """c_h * ((n_Q + n_P^((2b+d)/(2b+D))) / log n)^(-1/(2b+d)) at candidate b.

    Natural logarithm; requires n = n_P + n_Q >= 3 so that log n > 1.
    """
    n = n_p + n_q
    if n < 3:
        raise ValueError(f"need n_p + n_q >= 3, got {n}")
    if beta_tilde <= 0:
        raise ValueError(f"beta_tilde must be positive, got {beta_tilde}")
    if c_h <= 0:
        raise ValueError(f"c_h must be positive, got {c_h}")
    expo = (2.0 * beta_tilde + d) / (2.0 * beta_tilde + D)
    base = (n_q + _pow(float(n_p), expo)) / math.log(n)
    return c_h * _pow(base, -1.0 / (2.0 * beta_tilde + d))


def theoretical_rate(p: RegimeParams, boundary_scale: float = 1.0) -> float:
    """Squared-error rate for the regime the parameters fall in.

    d = D collapses both regimes to the ambient pooled rate.
    """
    if p.d == p.D:
        return _pow(float(p.n), -2.0 * p.beta / (2.0 * p.beta + p.D))
    label = classify_regime(p, boundary_scale)
    if label.regime is Regime.SMALL_RHO:
        return _pow(effective_sample_size(p), -2.0 * p.beta / (2.0 * p.beta + p.d))
    base = p.n_p + p.n_q * _pow(p.rho, float(p.d - p.D))
    return _pow(base, -2.0 * p.beta / (2.0 * p.beta + p.D))
