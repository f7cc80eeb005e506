"""Compare the compiled and pure-Python kernel backends.

Both backends consume the random stream identically, so this also doubles
as a large-scale parity check: the traces must match exactly.

Run: python3 benchmarks/bench_kernels.py
"""
import time

import numpy as np

from alohasim._core import _kernels_py
from alohasim import ExponentialPackets, FiniteModelParams
from alohasim._core import BACKEND, finite_kernel
from alohasim.rng import replicate_stream


def run_finite(kernel, n_successes, rep):
    stream = replicate_stream(1234, "bench", rep)
    t0 = time.perf_counter()
    out = kernel(
        stream.bit_generator, 3, 2 / 3, 2 / 3, 1, 1.0, 0.0,
        n_successes, float("inf"), -1, False, False, 2**63 - 1,
    )
    return time.perf_counter() - t0, out


def main():
    n = 20_000
    if BACKEND != "cython":
        print("compiled backend unavailable; timing pure Python only")
        t_py, _ = run_finite(_kernels_py.finite_kernel, n, 0)
        print(f"python: {n} departures in {t_py:.2f} s")
        return

    t_cy, out_cy = run_finite(finite_kernel, n, 0)
    t_py, out_py = run_finite(_kernels_py.finite_kernel, n, 0)
    same = np.array_equal(out_cy["departures"], out_py["departures"]) and np.array_equal(
        out_cy["retx"], out_py["retx"]
    )
    print(f"{n} departures (M=3, lambda=nu=2/3, exponential packets)")
    print(f"  cython: {t_cy:8.3f} s  ({out_cy['n_events'] / t_cy:12.0f} events/s)")
    print(f"  python: {t_py:8.3f} s  ({out_py['n_events'] / t_py:12.0f} events/s)")
    print(f"  speedup: {t_py / t_cy:.1f}x, traces identical: {same}")


if __name__ == "__main__":
    main()
