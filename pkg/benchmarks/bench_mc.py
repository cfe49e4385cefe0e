#!/usr/bin/env python3
"""Benchmark the Monte Carlo kernels: numba JIT vs pure NumPy.

Runs the same sample batches through both backends, checks the outputs are
bit-identical, and reports throughput.  Usage:

    python benchmarks/bench_mc.py [--samples 4000] [--depth 8] [--n 3]
"""

import argparse
import time
from fractions import Fraction

import numpy as np

from branchgas import BranchingLaw
from branchgas._mc_numpy import base_key
from branchgas.simulate import frontier_bounds, law_arrays, level_weight_table


def bench(fn, *args, repeat=3):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--samples", type=int, default=4000)
    parser.add_argument("--depth", type=int, default=8)
    parser.add_argument("--n", type=int, default=3)
    parser.add_argument("--beta", type=float, default=1.0)
    parser.add_argument("--seed", type=int, default=42)
    args = parser.parse_args()

    from branchgas import _mc_numpy as backend_np

    try:
        from branchgas import _mc_numba as backend_nb
    except ImportError:
        backend_nb = None

    law = BranchingLaw.from_pairs([(2, Fraction(1, 2)), (3, Fraction(1, 2))])
    qs, cdf = law_arrays(law)
    factors = level_weight_table(qs, args.n, args.beta)
    front_lo, front_hi = frontier_bounds(args.n)
    base = np.uint64(base_key(args.seed))
    call = (qs, cdf, factors, front_lo, front_hi, args.n, args.depth, base, 0, args.samples)

    print(f"law {law}, n={args.n}, beta={args.beta}, depth={args.depth}, "
          f"samples={args.samples}")

    t_np, (mids_np, widths_np) = bench(backend_np.mc_batch, *call)
    print(f"numpy : {t_np:8.3f}s  ({args.samples / t_np:10.0f} trees/s)")

    if backend_nb is None:
        print("numba : unavailable")
        return

    backend_nb.mc_batch(*call[:-1], 8)  # warm the JIT outside the timing
    t_nb, (mids_nb, widths_nb) = bench(backend_nb.mc_batch, *call)
    print(f"numba : {t_nb:8.3f}s  ({args.samples / t_nb:10.0f} trees/s)")
    print(f"speedup: {t_np / t_nb:.1f}x")

    identical = np.array_equal(mids_np, mids_nb) and np.array_equal(widths_np, widths_nb)
    print(f"bit-identical outputs: {identical}")
    if not identical:
        raise SystemExit(1)


if __name__ == "__main__":
    main()
