"""Gram-matrix timing: numba kernel against the numpy fallback and the exact path.

    python3 benchmarks/bench_gram.py [--repeat 3] [--exact]

The numba time excludes compilation (one warm-up call first).  Set
ADELION_NUMBA=0 to check that the default backend falls back to numpy.
"""

import argparse
import time

import numpy as np

from adelion import _kernels
from adelion.wavelets import gram_matrix, kozyrev
from adelion.padic import enumerate_shifts

CASES = [(2, range(-3, 4), 3), (3, range(-3, 4), 3), (5, range(-2, 3), 2), (2, range(-4, 5), 5), (3, range(-3, 4), 5)]


def family(p, js, depth):
    return [kozyrev(p, k, j, a) for k in range(1, p) for j in js for a in enumerate_shifts(p, depth)]


def best_of(fn, repeat):
    out, best = None, float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return out, best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--exact", action="store_true", help="also time the pure-Python exact path")
    args = ap.parse_args()

    print(f"numba available: {_kernels.HAS_NUMBA}, enabled: {_kernels.numba_enabled()}")
    if _kernels.HAS_NUMBA:
        gram_matrix(family(2, [0], 1), backend="numba")  # compile

    head = f"{'p':>3} {'n':>6} {'numba s':>9} {'numpy s':>9} {'speedup':>8} {'max |diff|':>11}"
    if args.exact:
        head += f" {'exact s':>9}"
    print(head)
    for p, js, depth in CASES:
        fns = family(p, js, depth)
        G_np, t_np = best_of(lambda: gram_matrix(fns, backend="numpy"), args.repeat)
        if _kernels.HAS_NUMBA:
            G_nb, t_nb = best_of(lambda: gram_matrix(fns, backend="numba"), args.repeat)
            diff = float(np.abs(G_nb - G_np).max())
        else:
            t_nb, diff = float("nan"), float("nan")
        line = f"{p:>3} {len(fns):>6} {t_nb:>9.4f} {t_np:>9.4f} {t_np / t_nb:>8.1f} {diff:>11.2e}"
        if args.exact:
            if len(fns) <= 400:
                _, t_ex = best_of(lambda: gram_matrix(fns, backend="exact"), 1)
                line += f" {t_ex:>9.3f}"
            else:
                line += f" {'skipped':>9}"
        print(line)


if __name__ == "__main__":
    main()
