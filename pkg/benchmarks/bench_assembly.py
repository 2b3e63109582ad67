"""Compare the element-matrix kernel backends on a realistic assembly load.

Usage: python benchmarks/bench_assembly.py [n_elements] [repeats]

Times each available backend (compiled and pure numpy) on the same batch of
randomly perturbed quad elements with spatially varying materials, for both
the plain 2x2 Gauss rule and the 4x subdivided composite rule used by the
cloak experiment.
"""

import sys
import time

import numpy as np

from fieldshaper import kernels
from fieldshaper.meshing import composite_gauss


def make_inputs(ne, nq, seed=0):
    rng = np.random.default_rng(seed)
    unit = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    coords = np.ascontiguousarray(
        unit[None] + 0.1 * rng.standard_normal((ne, 4, 2)) + rng.uniform(0, 50, (ne, 1, 2))
    )
    fields = tuple(
        np.ascontiguousarray(rng.uniform(lo, hi, (ne, nq)))
        for lo, hi in ((0.1, 2), (0.5, 3), (-0.2, 0.2), (0.5, 3), (0, 2), (-1, 1))
    )
    # keep the tensor PSD: shrink the off-diagonal below sqrt(a11*a22)
    rho, a11, a12, a22, beta, f = fields
    a12 *= 0.5 * np.sqrt(a11 * a22) / np.abs(a12).max()
    return coords, (rho, a11, a12, a22, beta, f)


def bench(fn, coords, fields, qpts, qwts, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(coords, *fields, qpts, np.ascontiguousarray(qwts))
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ne = int(sys.argv[1]) if len(sys.argv) > 1 else 20_000
    repeats = int(sys.argv[2]) if len(sys.argv) > 2 else 5
    backends = kernels.available_backends()
    print(f"active backend: {kernels.BACKEND}; elements: {ne}; repeats: {repeats}")
    for sub in (1, 4):
        qpts, qwts = composite_gauss(sub)
        coords, fields = make_inputs(ne, qpts.shape[0])
        times = {}
        for name, fn in sorted(backends.items()):
            times[name] = bench(fn, coords, fields, qpts, qwts, repeats)
        base = times.get("python")
        print(f"\nquadrature subdivision {sub} ({qpts.shape[0]} points/element):")
        for name, t in sorted(times.items()):
            speedup = f"  ({base / t:.1f}x vs python)" if base and name != "python" else ""
            print(f"  {name:8s} {t * 1e3:8.2f} ms{speedup}")


if __name__ == "__main__":
    main()
