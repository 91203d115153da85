"""Compare the compiled kernels with the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Both implementations are imported directly, so the comparison does not depend
on DELTATEST_PURE_PYTHON. Outputs are checked for bit-identity first.
"""
import argparse
import sys
import timeit

import numpy as np

from deltatest import _pykernels

try:
    from deltatest import _ckernels
except ImportError:
    _ckernels = None

CASES = [
    # (label, n, k, replicates)
    ("resample n=2000 k=100 N=1e4", 2000, 100, 10_000),
    ("resample n=2000 k=150 N=4000", 2000, 150, 4_000),
    ("resample n=20000 k=1000 N=2000", 20_000, 1000, 2_000),
]


def _best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def bench_subsample(repeat):
    rows = []
    rng = np.random.default_rng(0)
    for label, n, k, N in CASES:
        values = rng.normal(size=n)
        u = rng.random((N, k))
        py = _best(lambda: _pykernels.subsample_sums(values, u), repeat)
        if _ckernels is None:
            rows.append((label, py, None))
            continue
        assert np.array_equal(_pykernels.subsample_sums(values, u),
                              _ckernels.subsample_sums(values, u))
        cy = _best(lambda: _ckernels.subsample_sums(values, u), repeat)
        rows.append((label, py, cy))
    return rows


def bench_ks(repeat):
    rng = np.random.default_rng(1)
    rows = []
    for size in (10_000, 1_000_000):
        a, b = np.sort(rng.normal(size=size)), np.sort(rng.normal(size=size))
        label = f"two-sample KS, {size} vs {size}"
        py = _best(lambda: _pykernels.ks_two_sample(a, b), repeat)
        if _ckernels is None:
            rows.append((label, py, None))
            continue
        assert _pykernels.ks_two_sample(a, b) == _ckernels.ks_two_sample(a, b)
        cy = _best(lambda: _ckernels.ks_two_sample(a, b), repeat)
        rows.append((label, py, cy))
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if _ckernels is None:
        print("compiled extension not built; timing the numpy fallback only", file=sys.stderr)
    print(f"{'case':<36}{'numpy [s]':>12}{'cython [s]':>12}{'speed-up':>10}")
    for label, py, cy in bench_subsample(args.repeat) + bench_ks(args.repeat):
        if cy is None:
            print(f"{label:<36}{py:>12.4f}{'-':>12}{'-':>10}")
        else:
            print(f"{label:<36}{py:>12.4f}{cy:>12.4f}{py / cy:>9.1f}x")


if __name__ == "__main__":
    main()
