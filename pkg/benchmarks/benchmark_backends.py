#!/usr/bin/env python3
"""Timing comparison of the numba and NumPy kernel backends.

Measures the per-call cost of the stencil kernels and the fused explicit
advance on the two grids the acceptance runs use (200 cells in 1D, 64x64 in
2D). The two backends produce bit-identical results; this script is about
speed only.

Usage: python benchmarks/benchmark_backends.py [--repeat N]
"""

from __future__ import annotations

import argparse
import math
import time

import numpy as np

from crossdiff.kernels import get_backend, numba_backend, numpy_backend


def time_call(fn, repeat):
    fn()  # warm-up / JIT
    tic = time.perf_counter()
    for _ in range(repeat):
        fn()
    return (time.perf_counter() - tic) / repeat


def make_cases():
    rng = np.random.default_rng(0)
    h1 = 10.0 / 200
    ra1 = rng.uniform(0.1, 1.5, 200)
    rb1 = rng.uniform(0.1, 1.5, 200)
    hx = hy = 10.0 / 64
    ra2 = rng.uniform(0.1, 1.5, (64, 64))
    rb2 = rng.uniform(0.1, 1.5, (64, 64))
    d0, kappa = 1.0, 1.0

    def advance_1d(k):
        a, b = ra1.copy(), rb1.copy()
        return lambda: k.advance_explicit_1d(a.copy(), b.copy(), h1, d0, kappa,
                                             0.0, 0.1, 0.4, math.inf, math.inf, 0.0)

    def advance_2d(k):
        return lambda: k.advance_explicit_2d(ra2.copy(), rb2.copy(), hx, hy, d0,
                                             kappa, 0.0, 0.05, 0.4, math.inf,
                                             math.inf, 0.0)

    return [
        ("rhs_pair_1d (200 cells)",
         lambda k: (lambda: k.rhs_pair_1d(ra1, rb1, h1, d0, kappa)), 2000),
        ("rhs_pair_2d (64x64)",
         lambda k: (lambda: k.rhs_pair_2d(ra2, rb2, hx, hy, d0, kappa)), 500),
        ("laplacian_2d (64x64)",
         lambda k: (lambda: k.laplacian_2d(ra2, hx, hy)), 2000),
        ("thomas_helmholtz_1d (200)",
         lambda k: (lambda: k.thomas_helmholtz_1d(ra1, 1e-3, h1)), 2000),
        ("advance to t=0.1 (1D, 200)", advance_1d, 5),
        ("advance to t=0.05 (2D, 64x64)", advance_2d, 3),
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=None,
                    help="override the per-case repeat count")
    args = ap.parse_args()

    if numba_backend is None:
        print("numba not importable; nothing to compare")
        return

    print(f"active backend (CROSSDIFF_BACKEND): {get_backend().NAME}")
    print(f"{'case':34s} {'numpy':>12s} {'numba':>12s} {'speedup':>9s}")
    for name, make, repeat in make_cases():
        n = args.repeat or repeat
        t_np = time_call(make(numpy_backend), n)
        t_nb = time_call(make(numba_backend), n)
        print(f"{name:34s} {t_np * 1e3:10.3f}ms {t_nb * 1e3:10.3f}ms "
              f"{t_np / t_nb:8.1f}x")


if __name__ == "__main__":
    main()
