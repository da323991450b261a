#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Runs the same chunks through both backends, checks the outputs are
bit-identical, and prints trajectories/second for each engine.

    python3 benchmarks/bench_backends.py [--discrete N] [--continuous N]
"""

import argparse
import time

import numpy as np

from bornsim import _pykernels

try:
    from bornsim import _kernels
except ImportError:
    _kernels = None


def _time_chunk(fn, args, repeat=3):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench(name, compiled_fn, python_fn, args, count):
    t_py, out_py = _time_chunk(python_fn, args, repeat=1)
    print(f"{name:>11}  python   {count / t_py:>12.0f} traj/s  ({t_py:.3f} s)")
    if compiled_fn is None:
        print(f"{name:>11}  compiled        (extension not built)")
        return
    t_c, out_c = _time_chunk(compiled_fn, args)
    print(f"{name:>11}  compiled {count / t_c:>12.0f} traj/s  ({t_c:.3f} s)  "
          f"speedup x{t_py / t_c:.0f}")
    for key in ("outcomes", "taus", "inc_sum", "inc_sumsq"):
        assert np.array_equal(out_py[key], out_c[key]), f"{name}: {key} differs"
    print(f"{name:>11}  outputs bit-identical")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--discrete", type=int, default=20_000,
                        help="discrete trajectories per backend")
    parser.add_argument("--continuous", type=int, default=1_000,
                        help="continuous trajectories per backend")
    args = parser.parse_args()

    d_args = ((2, 3, 5), 6, 12345, 0, args.discrete, 10**9, 0)
    c_args = ((0.3, 0.7), 0.5, 1e-3, 999, 0, args.continuous, 10**9, 0)

    bench(
        "discrete",
        _kernels.run_discrete_chunk if _kernels else None,
        _pykernels.run_discrete_chunk,
        d_args,
        args.discrete,
    )
    bench(
        "continuous",
        _kernels.run_continuous_chunk if _kernels else None,
        _pykernels.run_continuous_chunk,
        c_args,
        args.continuous,
    )


if __name__ == "__main__":
    main()
