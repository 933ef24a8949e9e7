"""Benchmark the numba kernels against their pure-numpy fallbacks.

For each hot kernel: warm up both backends (also triggers JIT), time
several repetitions, report the median, cross-check the outputs with
np.allclose (bit-equality for integer tables), and print the speedup.

Usage: python3 benchmarks/bench_backends.py [--n-max 2e6] [--reps 5]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from primelab import build_tables, build_weights
from primelab._backend import HAS_NUMBA
from primelab.approximants import biglambda_R_range, lambda_R_range
from primelab.correlations import pair_kernel_scan
from primelab.lemmas import multiplicative_values
from primelab.tables import bv_sum


def median_time(fn, reps: int) -> tuple[float, object]:
    """Median wall time over reps calls; returns (seconds, last result)."""
    times = []
    result = None
    for _ in range(reps):
        t0 = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t0)
    return float(np.median(times)), result


def check_tables(a, b) -> bool:
    return (np.array_equal(a.spf, b.spf) and np.array_equal(a.mu, b.mu)
            and np.array_equal(a.phi, b.phi)
            and np.allclose(a.lam, b.lam, rtol=1e-14, atol=0))


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n-max", type=float, default=2e6)
    parser.add_argument("--reps", type=int, default=5)
    args = parser.parse_args()
    n_max = int(args.n_max)
    reps = args.reps

    if not HAS_NUMBA:
        print("numba is not importable; nothing to compare (numpy fallback "
              "is the only backend). Exiting.")
        return 0

    print(f"# n_max = {n_max}, reps = {reps}, median wall times")
    print(f"{'kernel':<28} {'numpy':>10} {'numba':>10} {'speedup':>9}  agree")

    tables = build_tables(n_max)
    weights = build_weights(1000)
    rng = np.random.default_rng(0)
    fvals = np.zeros(n_max + 1)
    prime_mask = tables.spf[2:n_max + 1] == np.arange(2, n_max + 1)
    primes = np.arange(2, n_max + 1)[prime_mask]
    fvals[primes] = rng.normal(size=primes.size)

    cases = [
        ("build_tables", lambda be: (lambda: build_tables(n_max, backend=be)),
         check_tables),
        ("lambda_R_range",
         lambda be: (lambda: lambda_R_range(n_max, weights, backend=be)),
         lambda a, b: np.allclose(a, b, rtol=1e-12, atol=1e-12)),
        ("biglambda_R_range",
         lambda be: (lambda: biglambda_R_range(n_max, 1000, backend=be)),
         lambda a, b: np.allclose(a, b, rtol=1e-12, atol=1e-12)),
        ("multiplicative_values",
         lambda be: (lambda: multiplicative_values(fvals, n_max,
                                                   tables=tables, backend=be)),
         lambda a, b: np.array_equal(a, b)),
        ("bv_sum",
         lambda be: (lambda: bv_sum(n_max // 2, 300, tables, backend=be)),
         lambda a, b: np.isclose(a, b, rtol=1e-12)),
        ("pair_kernel_scan",
         lambda be: (lambda: pair_kernel_scan(150, -10, 10, backend=be)),
         lambda a, b: a == b),
    ]

    for name, make, agree in cases:
        make("numpy")()   # warmup
        make("numba")()   # warmup + JIT
        t_np, r_np = median_time(make("numpy"), reps)
        t_nb, r_nb = median_time(make("numba"), reps)
        ok = agree(r_np, r_nb)
        print(f"{name:<28} {t_np:>9.4f}s {t_nb:>9.4f}s {t_np / t_nb:>8.2f}x  "
              f"{'yes' if ok else 'NO'}")
        if not ok:
            print(f"  MISMATCH in {name}: backends disagree")
            return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
