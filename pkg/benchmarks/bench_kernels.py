"""Time the numba kernels against their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each kernel is warmed up once (JIT compile) before timing. Results are
checked for equality before any time is reported.
"""

import argparse
import time

import numpy as np

from mrflist import kernels
from mrflist.dag import build_dag
from mrflist.offline import _extensions


def _best(fn, args, repeat):
    fn(*args)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def _config_matrix(n):
    configs = _extensions(range(n), build_dag(range(n), [(n - 1, 0)]).edges, None)
    return np.array([[c.index(u) + 1 for u in range(n)] for c in configs], dtype=np.int64)


def cases(rng):
    seq = rng.permutation(400).astype(np.int64)
    bits = rng.integers(0, 2, size=400).astype(np.uint8)
    pos = _config_matrix(7)
    mat = rng.integers(0, 20, size=(pos.shape[0], pos.shape[0])).astype(np.int64)
    vec = rng.integers(0, 20, size=pos.shape[0]).astype(np.int64)
    return [
        ("count_inversions n=400", kernels.count_inversions_numba, kernels.count_inversions_numpy, (seq,)),
        ("typed_inversions n=400", kernels.typed_inversions_numba, kernels.typed_inversions_numpy, (seq, bits)),
        (f"kendall_matrix {pos.shape[0]}x{pos.shape[1]}", kernels.kendall_matrix_numba,
         kernels.kendall_matrix_numpy, (pos,)),
        (f"minplus_rows {mat.shape[0]}^2", kernels.minplus_rows_numba, kernels.minplus_rows_numpy, (mat, vec)),
    ]


def _same(a, b):
    if isinstance(a, tuple):
        return all(np.array_equal(x, y) for x, y in zip(a, b))
    return np.array_equal(a, b)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    rng = np.random.default_rng(0)
    print(f"{'kernel':32s} {'numba ms':>10s} {'numpy ms':>10s} {'speedup':>8s}")
    for name, fast, slow, fargs in cases(rng):
        assert _same(fast(*fargs), slow(*fargs)), name
        t_fast = _best(fast, fargs, args.repeat)
        t_slow = _best(slow, fargs, args.repeat)
        print(f"{name:32s} {t_fast * 1e3:10.3f} {t_slow * 1e3:10.3f} {t_slow / t_fast:8.1f}x")


if __name__ == "__main__":
    main()
