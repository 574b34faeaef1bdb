#!/usr/bin/env python3
"""Benchmark the jit-compiled kernels against the pure-numpy fallback.

Run:  python benchmarks/bench_kernels.py [N]

The jit backend is the default import path; SL3INV_NUMBA=0 switches the
package to the numpy implementations, so this script imports both
modules directly and times them on identical inputs.
"""

from __future__ import annotations

import sys
import time

import numpy as np

from sl3inv.kernels import _numpy as knp

try:
    from sl3inv.kernels import _numba as knb
except ImportError:
    knb = None


def timeit(fn, *args, repeat=5):
    fn(*args)  # warm up (and compile, for the jit path)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 1_000_000
    rng = np.random.default_rng(0)
    alpha = rng.uniform(-1.4, 1.4, n)
    beta = rng.uniform(-0.95, 0.95, n)
    gamma = rng.uniform(-1.4, 1.4, n)
    z = rng.uniform(-1.0, 1.0, (3, n))
    lam = rng.uniform(0.5, 2.0, (2, n))
    mats = knp.chart_embed(np.eye(3), alpha, beta, gamma, *z, *lam)
    sl3 = rng.uniform(-0.6, 0.6, (n, 3, 3))
    sl3 -= np.trace(sl3, axis1=1, axis2=2)[:, None, None] * np.eye(3) / 3
    r = rng.uniform(0.0, 3.0, n)

    cases = [
        ("rotation_from_euler", "rotation_from_euler", (alpha, beta, gamma)),
        ("euler_from_rotation", "euler_from_rotation", (mats[:, :3, :3],)),
        ("iwasawa", "iwasawa", (mats,)),
        ("chart_coords", "chart_coords", (np.eye(3), mats)),
        ("chart_embed", "chart_embed", (np.eye(3), alpha, beta, gamma, *z, *lam)),
        ("mat_exp", "mat_exp", (sl3,)),
        ("cutoff_profile_d1", "xi_d1", (r,)),
    ]

    print(f"batch size: {n}")
    print(f"{'kernel':24s} {'numpy':>10s} {'numba':>10s} {'speedup':>8s}")
    for label, name, args in cases:
        t_np = timeit(getattr(knp, name), *args)
        if knb is None:
            print(f"{label:24s} {t_np*1e3:9.1f}ms {'n/a':>10s}")
            continue
        t_nb = timeit(getattr(knb, name), *args)
        print(
            f"{label:24s} {t_np*1e3:9.1f}ms {t_nb*1e3:9.1f}ms "
            f"{t_np / t_nb:7.1f}x"
        )

    # single-matrix path: what the nested stencil evaluations actually hit
    one = sl3[0]

    def many_single(mod):
        def run(m):
            for _ in range(2000):
                mod.mat_exp(m)
        return run

    t_np = timeit(many_single(knp), one)
    if knb is not None:
        t_nb = timeit(many_single(knb), one)
        print(
            f"{'mat_exp (single x2000)':24s} {t_np*1e3:9.1f}ms "
            f"{t_nb*1e3:9.1f}ms {t_np / t_nb:7.1f}x"
        )
    else:
        print(f"{'mat_exp (single x2000)':24s} {t_np*1e3:9.1f}ms {'n/a':>10s}")


if __name__ == "__main__":
    main()
