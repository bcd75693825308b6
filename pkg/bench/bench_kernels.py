"""Compare the compiled and pure-Python maximin-share kernels.

    python bench/bench_kernels.py [--repeat 3]

Both kernels are run on identical inputs and must agree; the table shows
the best wall time of each and the speedup.
"""
import argparse
import random
import time

from fairshare import _mms_py
from fairshare.shares import partition_count

try:
    from fairshare._mms_kernel import mms_int as compiled
except ImportError:
    compiled = None

CASES = [
    # (label, n, m, max value, seed)
    ("units n=4", 4, 7, 1, 0),
    ("random n=3 m=12", 3, 12, 100, 1),
    ("random n=4 m=12", 4, 12, 100, 2),
    ("random n=4 m=14", 4, 14, 1000, 3),
    ("random n=5 m=13", 5, 13, 1000, 4),
    ("wide n=3 m=16", 3, 16, 10**6, 5),
]

# value vectors with no near-equal split, so the search cannot stop early
HARD = [
    ("powers of 2 n=3", 3, [2**k for k in range(18, 0, -1)]),
    ("squares n=4 m=20", 4, [k * k for k in range(20, 0, -1)]),
    ("squares n=5 m=22", 5, [k * k for k in range(22, 0, -1)]),
]


def best_of(fn, values, n, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn(values, n)
        best = min(best, time.perf_counter() - t)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if compiled is None:
        print("compiled kernel not built; only the Python kernel is available")
    print(f"{'case':<20}{'partitions':>12}{'python s':>12}{'compiled s':>12}{'speedup':>9}")
    inputs = []
    for label, n, m, hi, seed in CASES:
        rng = random.Random(seed)
        inputs.append((label, n, sorted((rng.randint(1, hi) for _ in range(m)), reverse=True)))
    inputs += HARD
    for label, n, values in inputs:
        m = len(values)
        t_py, r_py = best_of(_mms_py.mms_int, values, n, args.repeat)
        if compiled is None:
            print(f"{label:<20}{partition_count(m, n):>12}{t_py:>12.4f}{'-':>12}{'-':>9}")
            continue
        t_c, r_c = best_of(compiled, values, n, args.repeat)
        assert r_py == r_c, (label, r_py, r_c)
        print(f"{label:<20}{partition_count(m, n):>12}{t_py:>12.4f}{t_c:>12.4f}{t_py / max(t_c, 1e-9):>8.0f}x")


if __name__ == "__main__":
    main()
