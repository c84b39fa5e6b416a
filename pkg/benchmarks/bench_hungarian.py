"""Benchmark: compiled assignment kernel vs. the pure-Python fallback.

The assignment subproblem is the inner loop of the doubly-stochastic
oracle, so it dominates wall time on that preset.  Run after an in-place
build (`pip install -e . --no-build-isolation`):

    python benchmarks/bench_hungarian.py [--sizes 10,20,50,100] [--repeats 20]
"""

import argparse
import time

import numpy as np

from cgkit import _core


def time_kernel(kernel, matrices, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        for matrix in matrices:
            kernel(matrix)
        best = min(best, time.perf_counter() - start)
    return best / len(matrices)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="10,20,50,100")
    parser.add_argument("--repeats", type=int, default=20)
    parser.add_argument("--matrices", type=int, default=10)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    fast, fast_name = _core.assignment_kernel(prefer_compiled=True)
    slow, slow_name = _core.assignment_kernel(prefer_compiled=False)
    if fast_name == slow_name:
        print("compiled kernel not built; benchmarking the fallback only")

    rng = np.random.default_rng(0)
    print(f"{'n':>6} {slow_name + ' (s)':>16} {fast_name + ' (s)':>16} {'speedup':>9}")
    for n in sizes:
        matrices = [rng.random((n, n)) for _ in range(args.matrices)]
        # agreement check first: both kernels must return the same assignment
        for matrix in matrices:
            a = np.asarray(fast(matrix))
            b = np.asarray(slow(matrix))
            if not np.array_equal(a, b):
                raise AssertionError(f"kernel disagreement at n={n}")
        t_slow = time_kernel(slow, matrices, args.repeats)
        t_fast = time_kernel(fast, matrices, args.repeats)
        ratio = t_slow / t_fast if t_fast > 0 else float("inf")
        print(f"{n:>6} {t_slow:>16.3e} {t_fast:>16.3e} {ratio:>8.1f}x")


if __name__ == "__main__":
    main()
