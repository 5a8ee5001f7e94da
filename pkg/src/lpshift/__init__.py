"""Pooled local polynomial regression under covariate shift onto manifolds.

Estimates a regression function at a point from pooled source+target samples
whose target covariates live near a low-dimensional set, with closed-form
rate calculators, an intrinsic-dimension + smoothness adaptive pipeline, and
a seeded Monte Carlo harness.
"""

from ._core import BACKEND
from .dimension import DimEstimate, estimate_dim, knn_radius, local_dim
from .harness import (
    ExperimentSpec,
    McResult,
    emit_results,
    fit_slope,
    load_experiment_specs,
    run_experiment,
)
from .kernels import KernelSpec, kernel_eval, scaled_kernel
from .lepski import (
    AdaptiveResult,
    LepskiTrace,
    SmoothnessGrid,
    adaptive_estimate,
    build_grid,
    lepski_select,
)
from .lpr import (
    LprConfig,
    LprFit,
    SingularSystemError,
    Truncation,
    assemble_system,
    effective_weights,
    lpr_fit,
)
from .poly import PolyBasis, build_basis, eval_features
from .rates import (
    Regime,
    RegimeLabel,
    RegimeParams,
    classify_regime,
    density_balance,
    effective_sample_size,
    lepski_bandwidth,
    manifold_bandwidths,
    oracle_bandwidth,
    phase_threshold,
    robustness_factor,
    samedim_bandwidth,
    theoretical_rate,
)
from .samples import LabeledSample, SampleSet, read_samples_csv, write_samples_csv
from .synthdata import GeneratorSpec, generate, mean_function, quadratic_embedding

__version__ = "0.1.0"
