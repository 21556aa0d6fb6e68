"""Compiled kernels vs the numpy fallback.

    python3 benchmarks/bench_kernels.py [--sizes 256 1024 4096] [--repeat 3]

Times the dense weight matrix and the fused all-nodes integral for each
backend and checks the two agree.
"""

import argparse
import time

import numpy as np

from katufrac import _kernels_py

try:
    from katufrac import _kernels
except ImportError:
    _kernels = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - start)
    return min(times), out


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[256, 1024, 2048, 4096])
    parser.add_argument("--alpha", type=float, default=0.5)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)
    if _kernels is None:
        print("compiled extension not built; only the fallback is available")

    print(f"{'n':>6}  {'kernel':<14}  {'python s':>10}  {'compiled s':>10}  {'speedup':>8}  {'max rel diff':>12}")
    for n in args.sizes:
        u = (np.arange(n + 1) / n) ** 2.0
        v = np.cos(3 * u)
        cases = [
            ("weight_matrix", lambda: _kernels_py.weight_matrix(u, args.alpha),
             lambda: np.asarray(_kernels.weight_matrix(u, args.alpha, args.threads))),
            ("integrate_all", lambda: _kernels_py.integrate_all(u, v, args.alpha),
             lambda: np.asarray(_kernels.integrate_all(u, v, args.alpha, args.threads))),
        ]
        for name, py, cy in cases:
            tp, ref = best_of(py, args.repeat)
            if _kernels is None:
                print(f"{n:>6}  {name:<14}  {tp:10.4f}  {'-':>10}  {'-':>8}  {'-':>12}")
                continue
            tc, got = best_of(cy, args.repeat)
            scale = np.maximum(np.abs(ref), 1e-300)
            diff = float(np.max(np.abs(got - ref) / scale))
            print(f"{n:>6}  {name:<14}  {tp:10.4f}  {tc:10.4f}  {tp / tc:8.1f}  {diff:12.1e}")


if __name__ == "__main__":
    main()
