"""Monte Carlo experiment runner.

An experiment sweeps (n_P, n_Q, rho) triples, draws seeded replications from
a generator template, evaluates the configured estimators at the evaluation
point, and aggregates squared errors.  Estimators:

* ``pooled_oracle``: local fit on all samples at the recipe bandwidth for the
  generator kind (weighted-density rule for samedim, effective-sample-size
  rule for manifold, regime-matched rule for approx-manifold).
* ``target_only_oracle``: same recipes restricted to the target rows.
* ``pooled_adaptive``: the dimension + smoothness adaptive pipeline.

A replication whose fit is singular scores the truncated-to-zero outcome
(estimate 0) and increments ``n_failures``; sweeps never abort.  Replication
r at sweep point p uses generator seed base_seed + p * replications + r, so
identical specs reproduce bit-identical results.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np

from . import rates
from .kernels import CUBE, KernelSpec
from .lepski import AdaptiveFitError, adaptive_estimate
from .lpr import LprConfig, SingularSystemError, lpr_fit
from .samples import DataFormatError, SampleSet
from .synthdata import (
    APPROX_MANIFOLD,
    MANIFOLD,
    SAMEDIM,
    SAMEDIM_SOURCE_BOX,
    SAMEDIM_TARGET_BOX,
    GeneratorSpec,
    generate,
    mean_function,
    uniform_box_density,
)

__all__ = [
    "POOLED_ORACLE",
    "TARGET_ONLY_ORACLE",
    "POOLED_ADAPTIVE",
    "ExperimentSpec",
    "CellStats",
    "SlopeFit",
    "McResult",
    "run_experiment",
    "fit_slope",
    "emit_results",
    "load_experiment_specs",
    "bundled_spec_path",
]

POOLED_ORACLE = "pooled_oracle"
TARGET_ONLY_ORACLE = "target_only_oracle"
POOLED_ADAPTIVE = "pooled_adaptive"
_ESTIMATORS = (POOLED_ORACLE, TARGET_ONLY_ORACLE, POOLED_ADAPTIVE)

CSV_COLUMNS = [
    "experiment",
    "estimator",
    "n_P",
    "n_Q",
    "rho",
    "mse",
    "se",
    "median",
    "q25",
    "q75",
    "n_failures",
]


@dataclass(frozen=True)
class ExperimentSpec:
    """Declarative experiment configuration."""

    name: str
    generator: GeneratorSpec
    sweep: tuple[tuple[int, int, float], ...]
    estimators: tuple[str, ...]
    replications: int
    x_star: tuple[float, ...]
    beta_for_oracle: float
    d_for_oracle: int
    base_seed: int = 0
    kernel: KernelSpec = KernelSpec(support=CUBE)
    c4: float = 1.0
    adapt_k: int = 10
    adapt_beta_min: float = 1.0
    adapt_beta_max: float = 5.0
    adapt_c_h: float = 1.5
    adapt_c_ell: float = 0.5
    adapt_dim_method: str = "avg"

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError("need at least one replication")
        if not self.sweep:
            raise ValueError("sweep must be nonempty")
        for est in self.estimators:
            if est not in _ESTIMATORS:
                raise ValueError(f"unknown estimator {est!r}")
        object.__setattr__(self, "sweep", tuple((int(a), int(b), float(r)) for a, b, r in self.sweep))
        object.__setattr__(self, "x_star", tuple(float(v) for v in self.x_star))
        object.__setattr__(self, "estimators", tuple(self.estimators))


@dataclass(frozen=True)
class CellStats:
    """Aggregated squared errors for one (sweep point, estimator) cell."""

    experiment: str
    estimator: str
    n_p: int
    n_q: int
    rho: float
    mse: float
    se_of_mse: float
    median_sq_err: float
    q25: float
    q75: float
    n_failures: int


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    stderr: float
    r2: float


@dataclass(frozen=True)
class McResult:
    spec: ExperimentSpec
    cells: tuple[CellStats, ...]
    slopes: dict[str, SlopeFit] = field(default_factory=dict)

    def cell(self, estimator: str, n_p: int, n_q: int, rho: float = 0.0) -> CellStats:
        for c in self.cells:
            if (
                c.estimator == estimator
                and c.n_p == n_p
                and c.n_q == n_q
                and math.isclose(c.rho, rho)
            ):
                return c
        raise KeyError(f"no cell for {estimator} at ({n_p}, {n_q}, {rho})")


def _oracle_bandwidth(spec: ExperimentSpec, gen: GeneratorSpec, target_only: bool) -> float:
    """Recipe bandwidth for the oracle estimators, per generator kind."""
    beta, d = spec.beta_for_oracle, spec.d_for_oracle
    x_star = np.asarray(spec.x_star)
    if gen.kind == SAMEDIM:
        q_dens = uniform_box_density(x_star, SAMEDIM_TARGET_BOX, gen.D)
        if target_only:
            return rates.samedim_bandwidth(gen.n_q, q_dens, beta, gen.D)
        p_dens = uniform_box_density(x_star, SAMEDIM_SOURCE_BOX, gen.D)
        n = gen.n_p + gen.n_q
        weighted = (gen.n_p * p_dens + gen.n_q * q_dens) / n
        return rates.samedim_bandwidth(n, weighted, beta, gen.D)
    if gen.kind == MANIFOLD:
        h_pooled, h_target = rates.manifold_bandwidths(gen.n_p, gen.n_q, beta, d, gen.D)
        return h_target if target_only else h_pooled
    params = rates.RegimeParams(
        n_p=0 if target_only else gen.n_p,
        n_q=gen.n_q,
        beta=beta,
        d=d,
        D=gen.D,
        rho=gen.rho,
    )
    h, _ = rates.oracle_bandwidth(params, c4=spec.c4)
    return h


def _evaluate(spec: ExperimentSpec, gen: GeneratorSpec, data: SampleSet, estimator: str):
    """One estimator on one replication: (value, failed)."""
    x_star = np.asarray(spec.x_star)
    try:
        if estimator == POOLED_ADAPTIVE:
            result = adaptive_estimate(
                data,
                x_star,
                k=spec.adapt_k,
                beta_min=spec.adapt_beta_min,
                beta_max=spec.adapt_beta_max,
                c_h=spec.adapt_c_h,
                c_ell=spec.adapt_c_ell,
                dim_method=spec.adapt_dim_method,
                kernel=spec.kernel,
            )
            return result.value, False
        target_only = estimator == TARGET_ONLY_ORACLE
        subset = data.target_only() if target_only else data
        h = _oracle_bandwidth(spec, gen, target_only)
        cfg = LprConfig(h=h, degree=math.floor(spec.beta_for_oracle), kernel=spec.kernel)
        return lpr_fit(subset, x_star, cfg).value, False
    except (SingularSystemError, AdaptiveFitError):
        # Truncated-to-zero outcome, recorded as a failure.
        return 0.0, True


def _run_replication(spec: ExperimentSpec, point_index: int, rep: int, truth: float):
    n_p, n_q, rho = spec.sweep[point_index]
    seed = spec.base_seed + point_index * spec.replications + rep
    gen = replace(spec.generator, n_p=n_p, n_q=n_q, rho=rho, seed=seed)
    data = generate(gen)
    out = {}
    for est in spec.estimators:
        value, failed = _evaluate(spec, gen, data, est)
        out[est] = ((value - truth) ** 2, failed)
    return out


def run_experiment(spec: ExperimentSpec, threads: int = 1) -> McResult:
    """Run every sweep point and replication; aggregate per cell.

    Replications run in parallel when ``threads > 1``; results are identical
    either way because every replication has its own seed and aggregation
    happens in task order.
    """
    kind = spec.generator.kind
    if any(rho > 0 for _, _, rho in spec.sweep) and kind != APPROX_MANIFOLD:
        raise ValueError(f"sweep rho > 0 requires the approx-manifold generator, got {kind!r}")
    truth = float(
        mean_function(
            np.asarray(spec.x_star), spec.generator.anchor_array(), spec.generator.beta_true
        )
    )
    tasks = [(p, r) for p in range(len(spec.sweep)) for r in range(spec.replications)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(
                pool.map(lambda pr: _run_replication(spec, pr[0], pr[1], truth), tasks)
            )
    else:
        outcomes = [_run_replication(spec, p, r, truth) for p, r in tasks]

    cells = []
    for point_index, (n_p, n_q, rho) in enumerate(spec.sweep):
        rows = outcomes[point_index * spec.replications : (point_index + 1) * spec.replications]
        for est in spec.estimators:
            sq = np.array([row[est][0] for row in rows])
            n_failures = sum(int(row[est][1]) for row in rows)
            se = float(np.std(sq, ddof=1) / math.sqrt(len(sq))) if len(sq) > 1 else 0.0
            cells.append(
                CellStats(
                    experiment=spec.name,
                    estimator=est,
                    n_p=n_p,
                    n_q=n_q,
                    rho=rho,
                    mse=float(np.mean(sq)),
                    se_of_mse=se,
                    median_sq_err=float(np.median(sq)),
                    q25=float(np.percentile(sq, 25)),
                    q75=float(np.percentile(sq, 75)),
                    n_failures=n_failures,
                )
            )
    cells = tuple(cells)

    slopes: dict[str, SlopeFit] = {}
    for est in spec.estimators:
        pts = []
        for c in cells:
            if c.estimator != est or c.mse <= 0:
                continue
            if est == TARGET_ONLY_ORACLE:
                x = float(c.n_q)
            else:
                params = rates.RegimeParams(
                    n_p=c.n_p,
                    n_q=c.n_q,
                    beta=spec.beta_for_oracle,
                    d=spec.d_for_oracle,
                    D=spec.generator.D,
                    rho=c.rho,
                )
                x = rates.effective_sample_size(params)
            pts.append((x, c.mse))
        if len(pts) >= 3 and len({round(math.log(x), 12) for x, _ in pts}) >= 3:
            slopes[est] = fit_slope(pts)
    return McResult(spec=spec, cells=cells, slopes=slopes)


def fit_slope(points) -> SlopeFit:
    """OLS slope of log(mse) on log(x) with its standard error and r^2."""
    if len(points) < 3:
        raise ValueError(f"need at least 3 points, got {len(points)}")
    xs = np.array([p[0] for p in points], dtype=float)
    ys = np.array([p[1] for p in points], dtype=float)
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise ValueError("slope fit needs strictly positive coordinates")
    lx, ly = np.log(xs), np.log(ys)
    n = len(lx)
    sxx = float(np.sum((lx - lx.mean()) ** 2))
    if sxx == 0:
        raise ValueError("slope fit needs at least two distinct x values")
    slope = float(np.sum((lx - lx.mean()) * (ly - ly.mean())) / sxx)
    fitted = ly.mean() + slope * (lx - lx.mean())
    rss = float(np.sum((ly - fitted) ** 2))
    tss = float(np.sum((ly - ly.mean()) ** 2))
    stderr = math.sqrt(rss / (n - 2) / sxx) if n > 2 else 0.0
    r2 = 1.0 if tss == 0 else 1.0 - rss / tss
    return SlopeFit(slope=slope, stderr=stderr, r2=r2)


def _spec_to_json(spec: ExperimentSpec) -> dict:
    blob = asdict(spec)
    blob["kernel"] = {
        "kind": spec.kernel.kind,
        "support": spec.kernel.support,
        "epa_floor": spec.kernel.epa_floor,
    }
    return blob


def _spec_from_json(blob: dict) -> ExperimentSpec:
    try:
        gen = GeneratorSpec(**blob["generator"])
        kernel_blob = blob.get("kernel", {"support": CUBE})
        kernel = KernelSpec(**kernel_blob)
        fields = {
            k: v for k, v in blob.items() if k not in ("generator", "kernel")
        }
        fields["sweep"] = tuple(tuple(p) for p in fields["sweep"])
        return ExperimentSpec(generator=gen, kernel=kernel, **fields)
    except (KeyError, TypeError) as exc:
        raise DataFormatError(f"bad experiment spec: {exc}") from None


def bundled_spec_path(name: str) -> Path:
    """Path of a bundled experiment spec (fig2_samedim, fig3_manifold, fig4_adaptive)."""
    candidate = resources.files("lpshift.specs").joinpath(f"{name}.json")
    if not candidate.is_file():
        raise FileNotFoundError(f"no bundled spec named {name!r}")
    return Path(str(candidate))


def load_experiment_specs(path_or_name) -> list[ExperimentSpec]:
    """Load experiment specs from a JSON file or a bundled spec name.

    The file holds either a single experiment object or a list of them.
    """
    path = Path(path_or_name)
    if not path.exists():
        path = bundled_spec_path(str(path_or_name))
    with open(path) as fh:
        payload = json.load(fh)
    if isinstance(payload, dict):
        payload = [payload]
    return [_spec_from_json(blob) for blob in payload]


def emit_results(results, out_dir, fast: bool = False) -> tuple[Path, Path]:
    """Write the long-format CSV and the JSON summary; returns their paths."""
    if isinstance(results, McResult):
        results = [results]
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "results.csv"
    json_path = out_dir / "summary.json"

    try:
        with open(csv_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for result in results:
                for c in result.cells:
                    writer.writerow(
                        [
                            c.experiment,
                            c.estimator,
                            c.n_p,
                            c.n_q,
                            repr(c.rho),
                            repr(c.mse),
                            repr(c.se_of_mse),
                            repr(c.median_sq_err),
                            repr(c.q25),
                            repr(c.q75),
                            c.n_failures,
                        ]
                    )
        summary = {
            "fast": fast,
            "experiments": [
                {
                    "name": r.spec.name,
                    "base_seed": r.spec.base_seed,
                    "spec": _spec_to_json(r.spec),
                    "slopes": {
                        est: {"slope": s.slope, "stderr": s.stderr, "r2": s.r2}
                        for est, s in r.slopes.items()
                    },
                }
                for r in results
            ],
        }
        with open(json_path, "w") as fh:
            json.dump(summary, fh, indent=2)
    except OSError as exc:
        raise OSError(f"failed writing results under {out_dir}: {exc}") from exc
    return csv_path, json_path
