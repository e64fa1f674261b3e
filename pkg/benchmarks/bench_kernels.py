"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 3] [--quick]

Reports the best wall time per kernel and backend and whether the outputs
agree (bit-for-bit for the sign sweeps and p in {1, 2}).
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from qcomplexity import _kernels_py as fallback

try:
    from qcomplexity import _kernels as compiled
except ImportError:  # pragma: no cover
    compiled = None


def cases(quick: bool):
    rng = np.random.default_rng(0)
    n = 4 if quick else 6
    M = rng.standard_normal((4**n, 4**n))
    m = 14 if quick else 18
    F = rng.standard_normal((m, 27))
    draws = 4096
    words = rng.integers(0, 2**64, size=(draws, 1), dtype=np.uint64)
    total = 1 << (m - 1)
    return [
        (f"row_power_sums p=1   {M.shape[0]}x{M.shape[1]}", "row_power_sums", (M, 1.0), True),
        (f"row_power_sums p=1.5 {M.shape[0]}x{M.shape[1]}", "row_power_sums", (M, 1.5), False),
        (f"sup_abs_exact m={m} C=27 ({total} signs)", "sup_abs_exact", (F, 0, total), True),
        (f"sup_abs_words m={m} C=27 ({draws} draws)", "sup_abs_words", (F, words), True),
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="smaller problem sizes")
    args = ap.parse_args()
    if compiled is None:
        raise SystemExit("compiled extension not built; run `pip install -e . --no-build-isolation`")
    print(f"{'kernel':45s} {'compiled':>10s} {'fallback':>10s} {'speedup':>8s}  agree")
    for label, fn, argv, exact in cases(args.quick):
        fc, fp = getattr(compiled, fn), getattr(fallback, fn)
        tc = min(timeit.repeat(lambda: fc(*argv), number=1, repeat=args.repeat))
        tp = min(timeit.repeat(lambda: fp(*argv), number=1, repeat=args.repeat))
        a, b = fc(*argv), fp(*argv)
        agree = np.array_equal(a, b) if exact else bool(np.allclose(a, b, rtol=1e-13, atol=0))
        print(f"{label:45s} {tc * 1e3:9.2f}ms {tp * 1e3:9.2f}ms {tp / tc:7.1f}x  {'bitwise' if exact and agree else agree}")


if __name__ == "__main__":
    main()
