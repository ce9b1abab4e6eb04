#!/usr/bin/env python3
"""Benchmark the panel kernels: numba vs vectorized numpy vs bare loops.

The two kernels measured here (mixture log-density and posterior-weight
moments) are the inner loops of every likelihood, gradient, and EM call.
Run:

    python3 benchmarks/bench_kernels.py [--sizes small,large]

Numba timings exclude compilation (one warm-up call per shape).
"""

import argparse
import time

import numpy as np

from lowsnr import _kernels

CASES = {
    "small": dict(n=7_200, k=3, d=2),     # quadrature panel, d=2, 60 nodes
    "large": dict(n=216_000, k=6, d=3),   # quadrature panel, d=3, 60 nodes
    "mc": dict(n=1_000_000, k=4, d=2),    # Monte Carlo panel
}


def make_panel(n, k, d, seed=0):
    g = np.random.default_rng(seed)
    points = g.normal(size=(n, d)) * 2.0
    omega = np.full(n, 1.0 / n)
    centers = g.normal(size=(k, d))
    w = g.uniform(0.2, 1.0, size=k)
    w /= w.sum()
    return points, omega, centers, np.log(w), 3.0


def time_call(fn, args, repeats=5):
    fn(*args)  # warm-up (JIT compile / cache touch)
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--sizes", default="small,large,mc")
    parser.add_argument("--with-loops", action="store_true",
                        help="also time the pure-python reference (slow)")
    args = parser.parse_args()

    backends = ["numpy"]
    if "numba" in _kernels._BACKENDS:
        backends.append("numba")
    if args.with_loops:
        backends.append("loops")

    print(f"active backend: {_kernels.backend_name()}")
    header = f"{'case':>8} {'kernel':>16}" + "".join(f"{b:>12}" for b in backends)
    print(header)
    print("-" * len(header))
    for case in args.sizes.split(","):
        n, k, d = CASES[case]["n"], CASES[case]["k"], CASES[case]["d"]
        points, omega, centers, logw, sigma = make_panel(n, k, d)
        row_l, row_w = [], []
        for name in backends:
            logdens, weight_moments = _kernels.get_backend(name)
            if name == "loops" and n > 50_000:
                row_l.append(float("nan"))
                row_w.append(float("nan"))
                continue
            row_l.append(time_call(logdens, (points, centers, logw, sigma)))
            row_w.append(time_call(weight_moments, (points, omega, centers, logw, sigma)))
        print(f"{case:>8} {'logdens':>16}" + "".join(f"{t * 1e3:>10.2f}ms" for t in row_l))
        print(f"{case:>8} {'weight_moments':>16}" + "".join(f"{t * 1e3:>10.2f}ms" for t in row_w))


if __name__ == "__main__":
    main()
