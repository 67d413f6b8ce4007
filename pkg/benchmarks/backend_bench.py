"""Timing comparison of the compiled and NumPy compute kernels.

The SGMCMC sweep spends nearly all its time in minibatch sse_and_grad calls
on small MLPs, so per-call overhead dominates. This script times forward and
sse_and_grad for both backends over the network shapes the benchmark
actually runs and prints per-call times plus the speedup.

Usage: python3 benchmarks/backend_bench.py [--repeats 5]
"""

import argparse
import timeit

import numpy as np

from bnnbench._kernels import npkernels

try:
    from bnnbench._kernels import cykernels
except ImportError:
    cykernels = None

CASES = [
    # (label, layer sizes, batch)
    ("desk surrogate, minibatch", [1, 20, 20, 1], 32),
    ("desk surrogate, full train", [1, 20, 20, 1], 100),
    ("paper-width surrogate, minibatch", [1, 100, 100, 1], 32),
    ("deep teacher, minibatch", [1, 100, 100, 100, 1], 32),
]


def param_count(sizes):
    return sum((sizes[l - 1] + 1) * sizes[l] for l in range(1, len(sizes)))


def bench(fn, number):
    # best-of-repeats guards against scheduler noise on a shared box
    return min(timeit.repeat(fn, number=number, repeat=5)) / number


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--number", type=int, default=2000,
                    help="calls per timing sample")
    args = ap.parse_args()

    if cykernels is None:
        print("compiled extension not importable; timing numpy only")

    rng = np.random.default_rng(0)
    rows = []
    for label, sizes, batch in CASES:
        sz = np.asarray(sizes, dtype=np.int64)
        w = rng.standard_normal(param_count(sizes))
        x = rng.uniform(-2.0, 2.0, size=(batch, sizes[0]))
        y = rng.standard_normal((batch, sizes[-1]))

        for op, call in (
            ("forward", lambda impl: impl.forward(sz, w, x)),
            ("sse_and_grad", lambda impl: impl.sse_and_grad(sz, w, x, y)),
        ):
            t_np = bench(lambda: call(npkernels), args.number)
            if cykernels is not None:
                s, g = npkernels.sse_and_grad(sz, w, x, y)
                s2, g2 = cykernels.sse_and_grad(sz, w, x, y)
                assert abs(s - s2) <= 1e-9 * max(1.0, abs(s))
                assert np.allclose(g, g2, rtol=1e-12, atol=1e-12)
                t_cy = bench(lambda: call(cykernels), args.number)
            else:
                t_cy = float("nan")
            rows.append((label, op, t_np, t_cy))

    width = max(len(r[0]) for r in rows)
    print(f"{'case':<{width}}  {'op':<12}  {'numpy us':>9}  {'cython us':>9}  {'speedup':>7}")
    for label, op, t_np, t_cy in rows:
        speed = t_np / t_cy if t_cy == t_cy else float("nan")
        print(f"{label:<{width}}  {op:<12}  {t_np * 1e6:9.1f}  {t_cy * 1e6:9.1f}  {speed:6.1f}x")


if __name__ == "__main__":
    main()
