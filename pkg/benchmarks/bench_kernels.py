"""Time the compiled SGD sweep against the NumPy fallback.

    python benchmarks/bench_kernels.py --iters 20000

Both backends run the same sweep from the same start; the script reports
microseconds per step, the speed-up and the largest difference between the
resulting bases.
"""

import argparse
import time

import numpy as np

from mkflats import _kernels
from mkflats.geometry import normalize_to_sphere
from mkflats.initializers import random_init
from mkflats.synth import generate_hlm

SETTINGS = [(2, 1, 3), (3, 4, 6), (2, 10, 15), (2, 15, 20)]


def time_sweep(backend, X, order, init, dt, repeats):
    best = np.inf
    for _ in range(repeats):
        bases = init.copy()
        t0 = time.perf_counter()
        _kernels.sgd_sweep(X, order, bases, dt, 1e-8, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, bases


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--iters", type=int, default=20000, help="steps per sweep")
    parser.add_argument("--repeats", type=int, default=3, help="best of this many runs")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    backends = ["python"] + (["cython"] if _kernels.BACKEND == "cython" else [])
    if len(backends) == 1:
        print("compiled kernel not available; timing the NumPy fallback only")
    rng = np.random.default_rng(args.seed)
    print(f"{'setting':>12} {'python us/step':>15} {'cython us/step':>15} {'speed-up':>9} {'max diff':>9}")
    for K, d, D in SETTINGS:
        ds = generate_hlm(K, d, D, outlier_frac=0.3, rng=rng)
        X = normalize_to_sphere(ds.points)
        order = rng.integers(len(X), size=args.iters)
        init = random_init(K, d, D, rng)
        times, results = {}, {}
        for b in backends:
            times[b], results[b] = time_sweep(b, X, order, init, 0.01, args.repeats)
        per_step = {b: 1e6 * t / args.iters for b, t in times.items()}
        label = f"{d}^{K} in R^{D}"
        if "cython" in per_step:
            diff = np.abs(results["python"] - results["cython"]).max()
            print(f"{label:>12} {per_step['python']:15.2f} {per_step['cython']:15.2f} "
                  f"{per_step['python'] / per_step['cython']:8.1f}x {diff:9.1e}")
        else:
            print(f"{label:>12} {per_step['python']:15.2f} {'-':>15} {'-':>9} {'-':>9}")


if __name__ == "__main__":
    main()
