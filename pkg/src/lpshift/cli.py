"""Command-line entry point.

Subcommands: estimate, adaptive, dim-est, rates, simulate, bench.  Machine
readable output (JSON or CSV) goes to stdout or files; diagnostics go to
stderr.  Exit codes: 0 success, 1 usage error, 2 data/format error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from importlib import metadata

import numpy as np

from . import harness, rates, synthdata
from .dimension import estimate_dim
from .kernels import BALL, BOX, CUBE, EPA, KernelSpec
from .lepski import (
    DEFAULT_BETA_MAX,
    DEFAULT_BETA_MIN,
    DEFAULT_C_ELL,
    DEFAULT_C_H,
    DEFAULT_K,
    AdaptiveFitError,
    adaptive_estimate,
)
from .lpr import LprConfig, SingularSystemError, Truncation, lpr_fit
from .samples import DataFormatError, read_samples_csv, write_samples_csv

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3

DEFAULT_TRUNCATION_EXPONENT = 2.0


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse parser whose usage failures map to exit code 1."""

    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: {message}")


def _version_string() -> str:
    try:
        version = metadata.version("lpshift")
    except metadata.PackageNotFoundError:
        version = "0.1.0"
    defaults = (
        f"C_h={DEFAULT_C_H}, C_ell={DEFAULT_C_ELL}, "
        f"p={DEFAULT_TRUNCATION_EXPONENT}, kernel={BOX}"
    )
    return f"lpshift {version} ({defaults})"


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError:
        raise UsageError(f"expected a comma-separated list of numbers, got {text!r}") from None


def _parse_ints(text: str) -> list[int]:
    vals = _parse_floats(text)
    out = []
    for v in vals:
        if v != int(v):
            raise UsageError(f"expected integers, got {text!r}")
        out.append(int(v))
    return out


def _kernel_from_args(args) -> KernelSpec:
    return KernelSpec(kind=args.kernel, support=args.kernel_support)


def _add_kernel_flags(sub):
    sub.add_argument("--kernel", choices=[BOX, EPA], default=BOX)
    sub.add_argument("--kernel-support", choices=[BALL, CUBE], default=BALL)


def build_parser() -> _Parser:
    parser = _Parser(prog="lpshift", description=__doc__)
    parser.add_argument("--version", action="version", version=_version_string())
    parser.add_argument("--seed", type=int, default=None, help="override spec/file seeds")
    parser.add_argument("--threads", type=int, default=1, help="harness parallelism cap")
    parser.add_argument("--quiet", action="store_true", help="suppress diagnostics")
    commands = parser.add_subparsers(dest="command", required=True)

    est = commands.add_parser("estimate", help="one local polynomial fit")
    est.add_argument("--data", required=True)
    est.add_argument("--x-star", required=True)
    est.add_argument("--h", type=float, required=True)
    est.add_argument("--degree", type=int, required=True)
    _add_kernel_flags(est)
    est.add_argument("--truncate", action=argparse.BooleanOptionalAction, default=False)
    est.add_argument("--rho", type=float, default=0.0, help="manifold distance for the truncation rule")
    est.add_argument("--d", type=int, default=None, help="intrinsic dim for the truncation rule")
    est.add_argument("--tau-exponent", type=float, default=DEFAULT_TRUNCATION_EXPONENT)
    est.add_argument("--ridge", type=float, default=0.0)

    adp = commands.add_parser("adaptive", help="dimension + smoothness adaptive fit")
    adp.add_argument("--data", required=True)
    adp.add_argument("--x-star", required=True)
    adp.add_argument("--k", type=int, default=DEFAULT_K)
    adp.add_argument("--beta-min", type=float, default=DEFAULT_BETA_MIN)
    adp.add_argument("--beta-max", type=float, default=DEFAULT_BETA_MAX)
    adp.add_argument("--C-h", dest="c_h", type=float, default=DEFAULT_C_H)
    adp.add_argument("--C-ell", dest="c_ell", type=float, default=DEFAULT_C_ELL)
    adp.add_argument("--dim-method", choices=["avg", "vote"], default="avg")
    _add_kernel_flags(adp)
    adp.add_argument("--trace", action="store_true", help="include the full candidate trace")

    dim = commands.add_parser("dim-est", help="intrinsic dimension of the target rows")
    dim.add_argument("--data", required=True)
    dim.add_argument("--k", type=int, default=DEFAULT_K)
    dim.add_argument("--method", choices=["avg", "vote"], default="avg")

    rts = commands.add_parser("rates", help="rate/bandwidth table over a parameter grid")
    rts.add_argument("--config", default=None, help="JSON file of grid lists (n_P, n_Q, beta, d, D, rho)")
    rts.add_argument("--n-P", dest="n_p", help="comma list")
    rts.add_argument("--n-Q", dest="n_q", help="comma list")
    rts.add_argument("--beta", help="comma list")
    rts.add_argument("--d", help="comma list")
    rts.add_argument("--D", dest="big_d", help="comma list")
    rts.add_argument("--rho", default="0", help="comma list")
    rts.add_argument("--C4", dest="c4", type=float, default=1.0)
    rts.add_argument("--out", default=None, help="CSV path (default: stdout)")

    sim = commands.add_parser("simulate", help="draw one dataset from a generator spec")
    sim.add_argument("--spec", required=True, help="JSON file of GeneratorSpec fields")
    sim.add_argument("--out", required=True, help="output CSV path")

    ben = commands.add_parser("bench", help="run Monte Carlo experiment specs")
    ben.add_argument("--spec", required=True, help="spec JSON path or bundled name")
    ben.add_argument("--out-dir", required=True)
    ben.add_argument("--fast", action="store_true", help="cap replications at 25")
    return parser


def _cmd_estimate(args) -> int:
    data = read_samples_csv(args.data)
    x_star = _parse_floats(args.x_star)
    if len(x_star) != data.ambient_dim:
        raise UsageError(
            f"--x-star needs {data.ambient_dim} coordinates, got {len(x_star)}"
        )
    truncation = None
    if args.truncate:
        d = args.d if args.d is not None else data.ambient_dim
        params = rates.RegimeParams(
            n_p=data.n_p, n_q=data.n_q, beta=max(args.degree, 1), d=d,
            D=data.ambient_dim, rho=args.rho,
        )
        truncation = Truncation.from_regime(params, args.h, exponent=args.tau_exponent)
    cfg = LprConfig(
        h=args.h,
        degree=args.degree,
        kernel=_kernel_from_args(args),
        truncation=truncation,
        ridge_epsilon=args.ridge,
    )
    fit = lpr_fit(data, np.array(x_star), cfg)
    json.dump(
        {
            "value": fit.value,
            "min_eigenvalue": fit.min_eigenvalue,
            "truncated": fit.truncated,
            "active_count": fit.active_count,
        },
        sys.stdout,
    )
    sys.stdout.write("\n")
    return EXIT_OK


def _cmd_adaptive(args) -> int:
    data = read_samples_csv(args.data)
    x_star = _parse_floats(args.x_star)
    if len(x_star) != data.ambient_dim:
        raise UsageError(f"--x-star needs {data.ambient_dim} coordinates, got {len(x_star)}")
    result = adaptive_estimate(
        data,
        np.array(x_star),
        k=args.k,
        beta_min=args.beta_min,
        beta_max=args.beta_max,
        c_h=args.c_h,
        c_ell=args.c_ell,
        dim_method=args.dim_method,
        kernel=_kernel_from_args(args),
    )
    payload = {
        "value": result.value,
        "d_hat": result.d_hat,
        "selected_beta": result.trace.selected_beta,
        "selected_h": result.trace.selected_h,
    }
    if args.trace:
        payload["trace"] = [
            {
                "beta_tilde": c.beta_tilde,
                "h": c.h,
                "estimate": c.estimate,
                "passed": c.passed,
                "first_violation": c.first_violation,
            }
            for c in result.trace.candidates
        ]
    json.dump(payload, sys.stdout)
    sys.stdout.write("\n")
    return EXIT_OK


def _cmd_dim_est(args) -> int:
    data = read_samples_csv(args.data)
    points = data.target_x()
    if points.shape[0] == 0:
        raise DataFormatError("no target (origin Q) rows in the data file")
    est = estimate_dim(points, k=args.k, method=args.method)
    histogram = {str(d): int(c) for d, c in zip(*np.unique(est.local, return_counts=True))}
    json.dump({"d_avg": est.d_avg, "d_vote": est.d_vote, "histogram": histogram}, sys.stdout)
    sys.stdout.write("\n")
    return EXIT_OK


def _cmd_rates(args) -> int:
    if args.config is not None:
        with open(args.config) as fh:
            try:
                grid = json.load(fh)
            except json.JSONDecodeError as exc:
                raise DataFormatError(f"invalid JSON in {args.config}: {exc}") from None
        def pull(key, fallback):
            vals = grid.get(key, fallback)
            return vals if isinstance(vals, list) else [vals]
        n_p_list = [int(v) for v in pull("n_P", [])]
        n_q_list = [int(v) for v in pull("n_Q", [])]
        beta_list = [float(v) for v in pull("beta", [])]
        d_list = [int(v) for v in pull("d", [])]
        big_d_list = [int(v) for v in pull("D", [])]
        rho_list = [float(v) for v in pull("rho", [0.0])]
        if not all([n_p_list, n_q_list, beta_list, d_list, big_d_list]):
            raise DataFormatError(f"{args.config} must list n_P, n_Q, beta, d, D")
    else:
        missing = [
            flag
            for flag, value in
            [("--n-P", args.n_p), ("--n-Q", args.n_q), ("--beta", args.beta),
             ("--d", args.d), ("--D", args.big_d)]
            if value is None
        ]
        if missing:
            raise UsageError(f"rates: missing {', '.join(missing)} (or pass --config)")
        n_p_list = _parse_ints(args.n_p)
        n_q_list = _parse_ints(args.n_q)
        beta_list = _parse_floats(args.beta)
        d_list = _parse_ints(args.d)
        big_d_list = _parse_ints(args.big_d)
        rho_list = _parse_floats(args.rho)
    rows = ["n_P,n_Q,beta,d,D,rho,regime,kappa_star,h_oracle,theoretical_rate"]
    for n_p in n_p_list:
        for n_q in n_q_list:
            for beta in beta_list:
                for d in d_list:
                    for big_d in big_d_list:
                        for rho in rho_list:
                            p = rates.RegimeParams(
                                n_p=n_p, n_q=n_q, beta=beta, d=d, D=big_d, rho=rho
                            )
                            h, label = rates.oracle_bandwidth(p, c4=args.c4)
                            rate = rates.theoretical_rate(p)
                            rows.append(
                                f"{n_p},{n_q},{beta},{d},{big_d},{rho},"
                                f"{label.regime.value},{label.kappa_star!r},{h!r},{rate!r}"
                            )
    text = "\n".join(rows) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_simulate(args) -> int:
    with open(args.spec) as fh:
        try:
            blob = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataFormatError(f"invalid JSON in {args.spec}: {exc}") from None
    try:
        spec = synthdata.GeneratorSpec(**blob)
    except TypeError as exc:
        raise DataFormatError(f"bad generator spec: {exc}") from None
    if args.seed is not None:
        spec = dataclasses.replace(spec, seed=args.seed)
    data = synthdata.generate(spec)
    write_samples_csv(args.out, data, comments=[json.dumps(dataclasses.asdict(spec))])
    if not args.quiet:
        print(f"wrote {data.n} rows to {args.out}", file=sys.stderr)
    return EXIT_OK


def _cmd_bench(args) -> int:
    specs = harness.load_experiment_specs(args.spec)
    results = []
    for spec in specs:
        if args.fast and spec.replications > 25:
            spec = dataclasses.replace(spec, replications=25)
        if args.seed is not None:
            spec = dataclasses.replace(spec, base_seed=args.seed)
        if not args.quiet:
            print(
                f"running {spec.name}: {len(spec.sweep)} sweep points x "
                f"{spec.replications} replications",
                file=sys.stderr,
            )
        results.append(harness.run_experiment(spec, threads=max(1, args.threads)))
    csv_path, json_path = harness.emit_results(results, args.out_dir, fast=args.fast)
    if not args.quiet:
        print(f"wrote {csv_path} and {json_path}", file=sys.stderr)
    return EXIT_OK


_COMMANDS = {
    "estimate": _cmd_estimate,
    "adaptive": _cmd_adaptive,
    "dim-est": _cmd_dim_est,
    "rates": _cmd_rates,
    "simulate": _cmd_simulate,
    "bench": _cmd_bench,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except (DataFormatError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (SingularSystemError, AdaptiveFitError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
