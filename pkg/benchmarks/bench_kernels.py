#!/usr/bin/env python3
"""Timing comparison of the compiled and pure-numpy model kernels.

The kernel evaluates the model vector and its four derivatives; the
refinement loop calls it once per iteration, so it dominates Monte Carlo
sweep runtime. Run after installing the package:

    python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from risloc import SystemConfig, refine
from risloc.kernels import available_backends
from risloc.refinement import _plan, model_vector
from risloc.signaling import Observation

SETUPS = [
    ("N=64  K=8", SystemConfig(n_y=8, n_z=8, k_ue=8)),
    ("N=100 K=12", SystemConfig(n_y=10, n_z=10, k_ue=12)),
    ("N=256 K=16", SystemConfig(n_y=16, n_z=16, k_ue=16)),
]


def time_call(fn, repeats=2000):
    fn()  # warm up
    start = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - start) / repeats


def main():
    impls = available_backends()
    print(f"backends: {', '.join(impls)}")
    print(f"{'setup':<12} " + " ".join(f"{name:>14}" for name in impls) + "   speedup")
    for label, cfg in SETUPS:
        pl = _plan(cfg)
        times = {}
        for name, impl in impls.items():
            times[name] = time_call(
                lambda impl=impl: impl.model_terms(
                    pl.gy, pl.weights, pl.big_delta, pl.small_delta,
                    pl.wavelength, pl.d_u, 2.37, 0.41,
                )
            )
        cols = " ".join(f"{times[name] * 1e6:>11.1f} us" for name in impls)
        speedup = (
            f"{times['python'] / times['compiled']:.1f}x"
            if {"python", "compiled"} <= times.keys()
            else "-"
        )
        print(f"{label:<12} {cols}   {speedup}")

    # whole-pipeline effect: one refinement from a displaced start
    print("\nfull refine() call (includes python-side loop overhead):")
    import risloc.kernels as k

    cfg = SystemConfig()
    obs = Observation(model_vector(cfg, 2.8374, 0.4123), float("inf"), 0.0)
    original = k.model_terms
    try:
        for name in impls:
            # swap the selected implementation in place; a subprocess with
            # RISLOC_BACKEND set would measure the same thing
            k.model_terms = impls[name].model_terms
            t = time_call(lambda: refine(obs, cfg, (3.3, 0.35)), repeats=50)
            print(f"  {name:>9}: {t * 1e3:7.2f} ms")
    finally:
        k.model_terms = original


if __name__ == "__main__":
    main()
