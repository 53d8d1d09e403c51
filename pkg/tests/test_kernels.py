import itertools
import os
import subprocess
import sys

import numpy as np
import pytest

from mrflist import kernels

needs_numba = pytest.mark.skipif(not kernels.HAVE_NUMBA, reason="numba not installed")


def _inv_oracle(seq):
    return sum(1 for i, j in itertools.combinations(range(len(seq)), 2) if seq[i] > seq[j])


def _typed_oracle(seq, bits):
    i0 = i1 = 0
    for i, j in itertools.combinations(range(len(seq)), 2):
        if seq[i] > seq[j]:
            if bits[j]:
                i1 += 1
            else:
                i0 += 1
    return i0, i1


IMPLS = [kernels.count_inversions_numpy] + ([kernels.count_inversions_numba] if kernels.HAVE_NUMBA else [])


@pytest.mark.parametrize("impl", IMPLS)
def test_count_inversions(impl):
    rng = np.random.default_rng(0)
    for n in [0, 1, 2, 5, 9, 30]:
        seq = rng.permutation(n).astype(np.int64)
        assert impl(seq) == _inv_oracle(seq.tolist())


@pytest.mark.parametrize("impl", [kernels.typed_inversions_numpy]
                         + ([kernels.typed_inversions_numba] if kernels.HAVE_NUMBA else []))
def test_typed_inversions(impl):
    rng = np.random.default_rng(1)
    for n in [0, 1, 3, 8, 20]:
        seq = rng.permutation(n).astype(np.int64)
        bits = rng.integers(0, 2, size=n).astype(np.uint8)
        assert tuple(int(v) for v in impl(seq, bits)) == _typed_oracle(seq.tolist(), bits.tolist())


def _configs(rng, m, n):
    return np.array([rng.permutation(n) + 1 for _ in range(m)], dtype=np.int64)


def test_kendall_numpy_against_pairs():
    rng = np.random.default_rng(2)
    pos = _configs(rng, 12, 6)
    got = kernels.kendall_matrix_numpy(pos)
    for a in range(12):
        for b in range(12):
            want = sum(1 for i, j in itertools.combinations(range(6), 2)
                       if (pos[a, i] < pos[a, j]) != (pos[b, i] < pos[b, j]))
            assert got[a, b] == want


@needs_numba
def test_numba_matches_numpy():
    rng = np.random.default_rng(3)
    pos = _configs(rng, 1500, 7)  # more rows than one numpy block
    assert np.array_equal(kernels.kendall_matrix_numba(pos), kernels.kendall_matrix_numpy(pos))
    wide = _configs(rng, 30, 12)  # 66 pairs: too many for one packed word
    assert np.array_equal(kernels.kendall_matrix_numba(wide), kernels.kendall_matrix_numpy(wide))
    mat = rng.integers(0, 5, size=(40, 60)).astype(np.int64)
    vec = rng.integers(0, 5, size=60).astype(np.int64)
    v1, i1 = kernels.minplus_rows_numba(mat, vec)
    v2, i2 = kernels.minplus_rows_numpy(mat, vec)
    assert np.array_equal(v1, v2) and np.array_equal(i1, i2)


def test_minplus_ties_go_to_first():
    mat = np.array([[1, 0, 0], [2, 2, 2]], dtype=np.int64)
    vec = np.array([0, 1, 1], dtype=np.int64)
    vals, idx = kernels.minplus_rows_numpy(mat, vec)
    assert vals.tolist() == [1, 2] and idx.tolist() == [0, 0]
    if kernels.HAVE_NUMBA:
        vals, idx = kernels.minplus_rows_numba(mat, vec)
        assert vals.tolist() == [1, 2] and idx.tolist() == [0, 0]


def test_env_flag_selects_numpy():
    env = dict(os.environ, MRFLIST_NO_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", "from mrflist import kernels; print(kernels.backend())"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
