"""Benchmark the compiled ball-count kernel against the pure-numpy fallback.

Run:  python3 benchmarks/bench_kernels.py [--samples N] [--dims D] [--scales K]
"""

import argparse
import time

import numpy as np

from hierbayes.kernels import BACKEND, ball_counts
from hierbayes.kernels._pure import ball_counts as pure_ball_counts


def bench(fn, samples, center, thresholds, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(samples, center, thresholds)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--samples", type=int, default=2_000_000)
    parser.add_argument("--dims", type=int, default=5)
    parser.add_argument("--scales", type=int, default=12)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    samples = rng.standard_normal((args.samples, args.dims))
    center = np.zeros(args.dims)
    thresholds = np.sort(rng.uniform(0.01, 2.0 * args.dims, args.scales))

    t_pure, out_pure = bench(pure_ball_counts, samples, center, thresholds)
    t_sel, out_sel = bench(ball_counts, samples, center, thresholds)
    assert np.array_equal(out_pure, out_sel), "backends disagree"

    print(f"samples={args.samples} dims={args.dims} scales={args.scales}")
    print(f"pure-numpy fallback : {t_pure * 1e3:9.2f} ms")
    print(f"selected ({BACKEND:>6}): {t_sel * 1e3:9.2f} ms")
    if BACKEND != "pure":
        print(f"speedup             : {t_pure / t_sel:9.2f}x")


if __name__ == "__main__":
    main()
