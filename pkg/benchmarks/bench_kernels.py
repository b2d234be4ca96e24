#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Usage:
    python benchmarks/bench_kernels.py [--records 5000] [--buckets 60] [--policies 20]

The same arrays are fed to both backends; reported times are best-of-5 after
a warmup call (which also triggers jit compilation for the numba path).
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from arenakit.ranking import pack_dataset
from arenakit.ranking import _kernels_numba as knb
from arenakit.ranking import _kernels_numpy as knp
from arenakit.ranking.types import Outcome, PreferenceRecord


def build_instance(m, n, t, seed=0):
    rng = np.random.default_rng(seed)
    records = []
    for k in range(m):
        i, j = rng.choice(n, size=2, replace=False)
        records.append(PreferenceRecord(f"b{k}", int(i), int(j), Outcome(int(rng.integers(0, 3))),
                                        progress_i=float(rng.uniform()), progress_j=float(rng.uniform())))
    packed = pack_dataset(records, n)
    theta = rng.normal(0, 0.7, n)
    psi = rng.normal(0, 0.4, (n, t))
    tau = rng.normal(0, 0.7, t)
    gamma = rng.dirichlet(np.ones(t), size=m)
    return packed, theta, psi, tau, gamma


def best_of(fn, repeats=5):
    fn()  # warmup / compile
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--records", type=int, default=5000)
    parser.add_argument("--policies", type=int, default=20)
    parser.add_argument("--buckets", type=int, default=60)
    args = parser.parse_args()

    packed, theta, psi, tau, gamma = build_instance(args.records, args.policies, args.buckets)
    nu_tie, c_partial = 0.4, 2.0
    print(f"instance: M={args.records} N={args.policies} T={args.buckets}")
    print(f"{'kernel':<18} {'numpy':>10} {'numba':>10} {'speedup':>9}")
    cases = {
        "bucket_logliks": lambda k: k.bucket_logliks(
            theta, psi, tau, nu_tie, packed.i, packed.j, packed.y,
            packed.s_i, packed.s_j, c_partial),
        "grad_hess_accum": lambda k: k.grad_hess_accum(
            theta, psi, tau, nu_tie, gamma, packed.i, packed.j, packed.y,
            packed.s_i, packed.s_j, c_partial),
        "tie_win_sums": lambda k: k.tie_win_sums(
            theta, psi, tau, nu_tie, gamma, packed.i, packed.j),
    }
    for name, call in cases.items():
        t_np = best_of(lambda: call(knp))
        t_nb = best_of(lambda: call(knb))
        print(f"{name:<18} {t_np * 1e3:>8.2f}ms {t_nb * 1e3:>8.2f}ms {t_np / t_nb:>8.1f}x")


if __name__ == "__main__":
    main()
