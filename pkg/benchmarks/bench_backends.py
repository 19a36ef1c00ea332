#!/usr/bin/env python3
"""Benchmark the numba-compiled hot loops against the pure-numpy fallback.

Run:  python benchmarks/bench_backends.py [n]

Times the two costliest paths: the leave-one-out bandwidth CV score
(O(n^2) per grid value) and a sweep of expectile bisections. The numba
path pays a one-off JIT compile, reported separately.
"""

import sys
import time

import numpy as np

from rectm import _loops_numba, _loops_numpy
from rectm.burr import BURR
from rectm.kernels import biquadratic_kernel


def timed(fn, *args, repeat=3):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main() -> None:
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 2000
    sample = BURR.sample(n, 123)
    spec = biquadratic_kernel()
    h = 0.1
    scale = spec.norm_const / h

    order = np.lexsort((sample.covariates[:, 0], sample.responses))
    Xs = np.ascontiguousarray(sample.covariates[order])
    Ys = np.ascontiguousarray(sample.responses[order])
    pos = np.searchsorted(Ys, Ys, side="right").astype(np.int64)

    print(f"n = {n}, bandwidth = {h}")

    t0 = time.perf_counter()
    _loops_numba.cv_score(Xs[:50], Ys[:50], pos[:50].copy(), h, 0, scale)
    w_warm = _loops_numba.weights_radial(Xs, Xs[0], h, 0, scale)
    _loops_numba.expectile_root(w_warm, Ys, 0.05, float(Ys.mean()), float(Ys.max()), 1e-10, 200)
    print(f"numba JIT compile/warmup: {time.perf_counter() - t0:.2f} s")

    for name, mod in (("numba", _loops_numba), ("numpy", _loops_numpy)):
        t, (score, empt) = timed(mod.cv_score, Xs, Ys, pos, h, 0, scale, repeat=1)
        print(f"cv_score        [{name}]: {t * 1e3:10.1f} ms   (score={score:.6g}, empties={empt})")

    x_points = np.linspace(0.05, 0.95, 19)
    results = {}
    for name, mod in (("numba", _loops_numba), ("numpy", _loops_numpy)):
        def sweep():
            vals = []
            for x in x_points:
                w = mod.weights_radial(Xs, np.array([x]), h, 0, scale)
                keep = w > 0
                ws, ys = w[keep], Ys[keep]
                mhat = float(ws @ ys / ws.sum())
                for alpha in (0.9, 0.95, 0.975, 0.99):
                    vals.append(mod.expectile_root(ws, ys, 1 - alpha, mhat, float(ys.max()), 1e-10, 200)[0])
            return vals

        t, vals = timed(sweep)
        results[name] = vals
        print(f"expectile sweep [{name}]: {t * 1e3:10.1f} ms   ({len(vals)} roots)")

    diff = np.max(np.abs(np.array(results["numba"]) - np.array(results["numpy"])))
    print(f"max |numba - numpy| over roots: {diff:.3e}")


if __name__ == "__main__":
    main()
