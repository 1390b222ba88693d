"""Compiled vs pure-Python kernels: timing of the assignment and 2-factor
kernels, and of a full exact solve under each backend.

    python benchmarks/bench_kernels.py [--sizes 10 30 60] [--repeat 5]
"""

import argparse
import time

import numpy as np

from jra import kernels
from jra.exact import solve
from jra.instance import generate


def timeit(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=[10, 30, 60, 120])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--solve-n", type=int, default=20)
    args = ap.parse_args()

    backends = kernels.available_backends()
    if len(backends) < 2:
        print("compiled kernels not built; only the Python backend is timed")
    rng = np.random.default_rng(0)
    print(f"{'kernel':<12}{'n':>6}" + "".join(f"{b:>14}" for b in backends) + f"{'speedup':>10}")
    for n in args.sizes:
        C = rng.random((n, n))
        avail = np.ones((n, n), dtype=bool)
        b = np.full(n, 2)
        for name, fn in (
            ("lap", lambda: kernels.lap(C)),
            ("two_factor", lambda: kernels.two_factor(C, avail, b, b)),
        ):
            times = []
            for be in backends:
                kernels.use_backend(be)
                times.append(timeit(fn, args.repeat))
            sp = f"{times[1] / times[0]:9.1f}x" if len(times) == 2 else ""
            print(f"{name:<12}{n:>6}" + "".join(f"{t * 1e3:>12.3f}ms" for t in times) + sp)

    inst = generate(args.solve_n, 0)
    times = []
    costs = []
    for be in backends:
        kernels.use_backend(be)
        t0 = time.perf_counter()
        costs.append(solve(inst).cost)
        times.append(time.perf_counter() - t0)
    sp = f"{times[1] / times[0]:9.1f}x" if len(times) == 2 else ""
    print(f"{'solve':<12}{args.solve_n:>6}" + "".join(f"{t * 1e3:>12.1f}ms" for t in times) + sp)
    assert max(costs) - min(costs) < 1e-9, "backends disagree"
    kernels.use_backend(backends[0])


if __name__ == "__main__":
    main()
