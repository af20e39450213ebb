#!/usr/bin/env python3
"""Benchmark the quadrature kernel: numba @njit path vs pure-numpy twin.

Usage:
    python benchmarks/bench_kernels.py [--samples N] [--repeat R]

The numba path must be importable for the comparison; otherwise only the
numpy path is timed.  Timings exclude JIT compilation (one warmup call).
"""

from __future__ import annotations

import argparse
import time

import numpy as np

import liestab as ls
from liestab import _kernels as kernels


def _case_su2(samples: int):
    alg, met = ls.registry("su2")
    h = ls.Homomorphism(alg, met, alg, met, np.eye(3))
    w = np.broadcast_to(np.array([1.0, 0.0, 0.0]), (samples, 3)).copy()
    dw = np.zeros((samples, 3, 3))
    return "su2, invariant field", h.frame_images(), met.g, alg.c, w, dw, 1e-3


def _case_su2xsu2(samples: int):
    alg, met = ls.registry("su2xsu2")
    dom, dom_m = ls.registry("su2")
    h = ls.Homomorphism(dom, ls.Metric(2.0 * np.eye(3)), alg, met, np.vstack([np.eye(3)] * 2))
    rng = np.random.default_rng(1)
    w = rng.normal(size=(samples, 6))
    dw = rng.normal(size=(samples, 3, 6))
    return "su2xsu2, random field", h.frame_images(), met.g, alg.c, w, dw, 0.05


def _time(fn, args, repeat: int) -> float:
    fn(*args)  # warmup (JIT compile on the numba path)
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--samples", type=int, default=200_000)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    print(f"active backend: {kernels.backend()}  (samples={args.samples}, best of {args.repeat})")
    for case in (_case_su2, _case_su2xsu2):
        label, a, g2, c2, w, dw, t = case(args.samples)
        kargs = (
            np.ascontiguousarray(a), np.ascontiguousarray(g2), np.ascontiguousarray(c2),
            np.ascontiguousarray(w), np.ascontiguousarray(dw), t,
        )
        t_numpy = _time(kernels.energy_deviation_numpy, kargs, args.repeat)
        line = f"{label:<24} numpy {t_numpy * 1e3:9.2f} ms"
        if kernels.NUMBA_ENABLED:
            t_numba = _time(kernels._energy_deviation_numba, kargs, args.repeat)
            line += f"   numba {t_numba * 1e3:9.2f} ms   speedup x{t_numpy / t_numba:.1f}"
            check = np.allclose(
                kernels.energy_deviation_numpy(*kargs),
                kernels._energy_deviation_numba(*kargs),
                rtol=1e-12, atol=1e-13,
            )
            line += f"   paths agree: {check}"
        else:
            line += "   (numba path unavailable)"
        print(line)


if __name__ == "__main__":
    main()
