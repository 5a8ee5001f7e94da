"""Data-driven smoothness selection and the fully adaptive estimator.

Candidate smoothness levels on a grid with spacing about 1/log n each get
their own bandwidth and local fit (degree = floor of the candidate).  The
selected level is the largest candidate whose estimate stays within the
calibrated band C_ell * h_eta**eta of every estimate at a rougher-or-equal
level eta.  The fully adaptive pipeline first estimates the intrinsic
dimension from the target covariates, then runs the selection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import rates
from .dimension import estimate_dim
from .kernels import KernelSpec
from .lpr import LprConfig, SingularSystemError, Truncation, lpr_fit
from .samples import SampleSet

__all__ = [
    "SmoothnessGrid",
    "LepskiCandidate",
    "LepskiTrace",
    "AdaptiveResult",
    "AdaptiveFitError",
    "build_grid",
    "select_largest_consistent",
    "lepski_select",
    "adaptive_estimate",
]

DEFAULT_K = 10
DEFAULT_BETA_MIN = 1.0
DEFAULT_BETA_MAX = 5.0
DEFAULT_C_H = 1.5
DEFAULT_C_ELL = 0.5


class AdaptiveFitError(RuntimeError):
    """Every candidate fit failed; no adaptive estimate exists."""


@dataclass(frozen=True)
class SmoothnessGrid:
    """Uniform candidate grid over [beta_min, beta_max]."""

    beta_min: float
    beta_max: float
    values: tuple[float, ...]
    spacing_target: float

    def __len__(self) -> int:
        return len(self.values)


def build_grid(n: int, beta_min: float, beta_max: float) -> SmoothnessGrid:
    """Grid with step (beta_max - beta_min) / ceil((beta_max - beta_min) * log n).

    Endpoints are always included; the step tracks 1/log n.
    """
    if n < 3:
        raise ValueError(f"need n >= 3, got {n}")
    if not 0 < beta_min < beta_max:
        raise ValueError(f"need 0 < beta_min < beta_max, got [{beta_min}, {beta_max}]")
    span = beta_max - beta_min
    pieces = max(1, math.ceil(span * math.log(n)))
    values = tuple(np.linspace(beta_min, beta_max, pieces + 1))
    return SmoothnessGrid(
        beta_min=beta_min,
        beta_max=beta_max,
        values=values,
        spacing_target=1.0 / math.log(n),
    )


@dataclass(frozen=True)
class LepskiCandidate:
    """One candidate's bandwidth, estimate, and comparison outcome.

    ``estimate`` is None when the candidate's fit failed; such candidates are
    neither selectable nor used as comparison points.
    """

    beta_tilde: float
    h: float
    estimate: float | None
    passed: bool
    first_violation: tuple[float, float, float] | None  # (eta, gap, threshold)


@dataclass(frozen=True)
class LepskiTrace:
    candidates: tuple[LepskiCandidate, ...]
    selected_beta: float
    selected_h: float
    final_value: float


@dataclass(frozen=True)
class AdaptiveResult:
    value: float
    trace: LepskiTrace
    d_hat: int


def select_largest_consistent(
    betas, bandwidths, estimates, c_ell: float
) -> tuple[int, list[bool], list[tuple[float, float, float] | None]]:
    """Index of the largest candidate passing every pairwise band check.

    Pure selection rule over precomputed estimates, shared by the estimator
    and by brute-force cross-checks.  ``estimates`` entries may be None
    (failed fits): those candidates fail and are skipped as comparators.
    """
    if c_ell < 0:
        raise ValueError(f"c_ell must be >= 0, got {c_ell}")
    n = len(betas)
    passed = [False] * n
    violations: list[tuple[float, float, float] | None] = [None] * n
    for j in range(n):
        if estimates[j] is None:
            continue
        ok = True
        for i in range(j + 1):
            if estimates[i] is None:
                continue
            gap = abs(estimates[j] - estimates[i])
            threshold = c_ell * bandwidths[i] ** betas[i]
            if gap > threshold:
                ok = False
                violations[j] = (betas[i], gap, threshold)
                break
        passed[j] = ok
    selected = -1
    for j in range(n):
        if passed[j]:
            selected = j
    if selected < 0:
        raise AdaptiveFitError("all candidate fits failed")
    return selected, passed, violations


def lepski_select(
    data: SampleSet,
    x_star,
    grid: SmoothnessGrid,
    d_hat: int,
    ambient_dim: int | None = None,
    c_h: float = DEFAULT_C_H,
    c_ell: float = DEFAULT_C_ELL,
    kernel: KernelSpec = KernelSpec(),
    truncation_exponent: float | None = None,
) -> LepskiTrace:
    """Fit every candidate and apply the selection rule.

    ``truncation_exponent`` enables the zero-truncation rule inside the
    candidate fits (it is off by default, matching the simulation studies).
    """
    if ambient_dim is None:
        ambient_dim = data.ambient_dim
    x_star = np.asarray(x_star, dtype=float)

    bandwidths: list[float] = []
    estimates: list[float | None] = []
    for beta in grid.values:
        h = rates.lepski_bandwidth(data.n_p, data.n_q, beta, d_hat, ambient_dim, c_h)
        bandwidths.append(h)
        truncation = None
        if truncation_exponent is not None:
            params = rates.RegimeParams(
                n_p=data.n_p, n_q=data.n_q, beta=beta, d=d_hat, D=ambient_dim
            )
            truncation = Truncation.from_regime(params, h, exponent=truncation_exponent)
        cfg = LprConfig(h=h, degree=math.floor(beta), kernel=kernel, truncation=truncation)
        try:
            estimates.append(lpr_fit(data, x_star, cfg).value)
        except SingularSystemError:
            estimates.append(None)

    selected, passed, violations = select_largest_consistent(
        grid.values, bandwidths, estimates, c_ell
    )
    candidates = tuple(
        LepskiCandidate(
            beta_tilde=beta,
            h=bandwidths[j],
            estimate=estimates[j],
            passed=passed[j],
            first_violation=violations[j],
        )
        for j, beta in enumerate(grid.values)
    )
    return LepskiTrace(
        candidates=candidates,
        selected_beta=grid.values[selected],
        selected_h=bandwidths[selected],
        final_value=estimates[selected],
    )


def adaptive_estimate(
    data: SampleSet,
    x_star,
    k: int = DEFAULT_K,
    beta_min: float = DEFAULT_BETA_MIN,
    beta_max: float = DEFAULT_BETA_MAX,
    c_h: float = DEFAULT_C_H,
    c_ell: float = DEFAULT_C_ELL,
    dim_method: str = "avg",
    kernel: KernelSpec = KernelSpec(),
    truncation_exponent: float | None = None,
) -> AdaptiveResult:
    """Full pipeline: estimate d from the target covariates, then select beta.

    Requires at least k+1 target rows for the dimension step.
    """
    target_x = data.target_x()
    if target_x.shape[0] < k + 1:
        raise ValueError(
            f"need at least k+1={k + 1} target rows for dimension estimation, "
            f"got {target_x.shape[0]}"
        )
    d_hat = estimate_dim(target_x, k=k, method=dim_method).value
    grid = build_grid(data.n, beta_min, beta_max)
    trace = lepski_select(
        data,
        x_star,
        grid,
        d_hat,
        ambient_dim=data.ambient_dim,
        c_h=c_h,
        c_ell=c_ell,
        kernel=kernel,
        truncation_exponent=truncation_exponent,
    )
    return AdaptiveResult(value=trace.final_value, trace=trace, d_hat=d_hat)
