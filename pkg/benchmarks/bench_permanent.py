"""Compare the compiled and numpy permanent kernels.

    python3 benchmarks/bench_permanent.py [--sizes 4 8 12 16] [--batch 3003]

Times a single permanent per size, then one batched table of N=5 matrices
(the size of a full n=11, N=5 bosonic distribution).
"""
import argparse
import timeit

import numpy as np

from permsym import _ryser_py
from permsym import kernels


def _best(fn, repeat=5):
    number = 1
    while timeit.timeit(fn, number=number) < 0.05:
        number *= 2
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=[4, 8, 12, 16])
    ap.add_argument("--batch", type=int, default=3003)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    try:
        from permsym import _ryser_ext as ext
    except ImportError:
        ext = None
        print("compiled extension not available; timing the fallback only")

    rng = np.random.default_rng(args.seed)
    print(f"{'case':<22}{'compiled':>14}{'fallback':>14}{'speedup':>10}")
    for N in args.sizes:
        M = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
        t_py = _best(lambda: _ryser_py.permanent(M), repeat=3)
        t_ext = _best(lambda: ext.permanent(M)) if ext else float("nan")
        print(f"{'permanent N=' + str(N):<22}{t_ext:>14.3e}{t_py:>14.3e}{t_py / t_ext:>10.1f}")

    stack = rng.standard_normal((args.batch, 5, 5)) + 1j * rng.standard_normal((args.batch, 5, 5))
    t_py = _best(lambda: _ryser_py.permanent_batch(stack), repeat=3)
    t_ext = _best(lambda: ext.permanent_batch(stack)) if ext else float("nan")
    print(f"{'batch ' + str(args.batch) + 'x5x5':<22}{t_ext:>14.3e}{t_py:>14.3e}{t_py / t_ext:>10.1f}")

    A = np.abs(stack) ** 2
    t_py = _best(lambda: _ryser_py.permanent_nonneg_batch(A), repeat=3)
    t_ext = _best(lambda: ext.permanent_nonneg_batch(A)) if ext else float("nan")
    print(f"{'nonneg batch':<22}{t_ext:>14.3e}{t_py:>14.3e}{t_py / t_ext:>10.1f}")
    print(f"active backend: {kernels.BACKEND}")


if __name__ == "__main__":
    main()
