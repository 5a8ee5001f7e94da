#!/usr/bin/env python3
"""Timing comparison of the compiled core against the numpy fallback.

Runs the two hot kernels (moment-system accumulation and kNN radii) on
synthetic problems of growing size and prints a table of per-call times and
speedups.  Usage:

    python benchmarks/bench_backends.py [--repeats 5]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from lpshift._core import _fallback
from lpshift.poly import build_basis

try:
    from lpshift._core import _speedups
except ImportError:
    _speedups = None


def _time(fn, *args, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        tick = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - tick)
    return best


def bench_moment_system(repeats: int) -> None:
    print("\nmoment_system (box kernel, ball support)")
    print(f"{'n':>8} {'dim':>4} {'deg':>4} {'numpy':>10} {'compiled':>10} {'speedup':>8}")
    rng = np.random.default_rng(0)
    for n, dim, degree in [(2_000, 5, 2), (20_000, 5, 2), (100_000, 5, 2), (20_000, 5, 5)]:
        basis = build_basis(dim, degree)
        x = rng.uniform(0, 1, size=(n, dim))
        y = rng.standard_normal(n)
        x_star = np.full(dim, 0.4)
        args = (x, y, x_star, 0.3, basis.exponents, basis.inv_factorial, 0, 0, 0.05)
        t_py = _time(_fallback.moment_system, *args, repeats=repeats)
        if _speedups is None:
            print(f"{n:>8} {dim:>4} {degree:>4} {t_py * 1e3:>9.2f}ms {'n/a':>10} {'n/a':>8}")
            continue
        t_cy = _time(_speedups.moment_system, *args, repeats=repeats)
        print(
            f"{n:>8} {dim:>4} {degree:>4} {t_py * 1e3:>9.2f}ms {t_cy * 1e3:>9.2f}ms "
            f"{t_py / t_cy:>7.1f}x"
        )


def bench_knn(repeats: int) -> None:
    print("\nknn_radii_pair (k=10, k/2=5)")
    print(f"{'n':>8} {'dim':>4} {'numpy':>10} {'compiled':>10} {'speedup':>8}")
    rng = np.random.default_rng(1)
    for n, dim in [(1_000, 5), (5_000, 5), (20_000, 5)]:
        x = rng.standard_normal((n, dim))
        t_py = _time(_fallback.knn_radii_pair, x, 10, 5, repeats=repeats)
        if _speedups is None:
            print(f"{n:>8} {dim:>4} {t_py * 1e3:>9.1f}ms {'n/a':>10} {'n/a':>8}")
            continue
        t_cy = _time(_speedups.knn_radii_pair, x, 10, 5, repeats=repeats)
        print(f"{n:>8} {dim:>4} {t_py * 1e3:>9.1f}ms {t_cy * 1e3:>9.1f}ms {t_py / t_cy:>7.1f}x")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()
    if _speedups is None:
        print("compiled extension not built; timing the numpy fallback only")
    bench_moment_system(args.repeats)
    bench_knn(args.repeats)


if __name__ == "__main__":
    main()
