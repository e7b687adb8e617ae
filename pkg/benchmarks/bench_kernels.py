#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Times the two hot paths - single train evaluation (the synthesis /
verification inner loop) and batched jittered-train evaluation (the
Monte Carlo inner loop) - under both backends and prints the speedups.

Usage:
    python benchmarks/bench_kernels.py [--batch 20000] [--repeats 5]
"""

from __future__ import annotations

import argparse
import math
import time

import numpy as np

from sagnac_switch import _kernels

TRAIN_LEN = 9  # reduced gadget train: 6 waveplates + 2 rotators + midplate


def time_call(fn, *args, repeats: int) -> float:
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--batch", type=int, default=20_000,
                        help="jitter samples per batched call")
    parser.add_argument("--singles", type=int, default=5_000,
                        help="single-train evaluations per timing")
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    kinds, base = _kernels.as_arrays(
        rng.integers(0, 3, TRAIN_LEN), rng.uniform(-math.pi, math.pi, TRAIN_LEN))
    batch_angles = base + rng.normal(0, 0.002, size=(args.batch, TRAIN_LEN))

    numpy_impl = _kernels.get_backend("numpy")
    try:
        numba_impl = _kernels.get_backend("numba")
    except ImportError:
        print("numba unavailable; nothing to compare")
        return

    # trigger JIT compilation before timing
    numba_impl["train_matrix"](kinds, base, True)
    numba_impl["train_matrices_batch"](kinds, batch_angles[:2], True)

    def singles(impl):
        f = impl["train_matrix"]
        for _ in range(args.singles):
            f(kinds, base, False)

    def batch(impl):
        impl["train_matrices_batch"](kinds, batch_angles, True)

    rows = []
    for name, work, arg_desc in (
        ("train_matrix x%d" % args.singles, singles, "len-9 train"),
        ("train_matrices_batch", batch, f"{args.batch} x len-9"),
    ):
        t_np = time_call(work, numpy_impl, repeats=args.repeats)
        t_nb = time_call(work, numba_impl, repeats=args.repeats)
        rows.append((name, arg_desc, t_np, t_nb, t_np / t_nb))

    # consistency spot check between the backends
    a = numpy_impl["train_matrices_batch"](kinds, batch_angles[:64], True)
    b = numba_impl["train_matrices_batch"](kinds, batch_angles[:64], True)
    max_dev = float(np.max(np.abs(a - b)))

    print(f"{'kernel':<28} {'workload':<18} {'numpy [s]':>10} "
          f"{'numba [s]':>10} {'speedup':>8}")
    for name, desc, t_np, t_nb, speedup in rows:
        print(f"{name:<28} {desc:<18} {t_np:>10.4f} {t_nb:>10.4f} "
              f"{speedup:>7.1f}x")
    print(f"\nbackend agreement (64-sample batch): max |delta| = {max_dev:.2e}")
    print(f"active backend at import: {_kernels.backend()} "
          f"(set SWITCH_KERNELS=numpy|numba to override)")


if __name__ == "__main__":
    main()
