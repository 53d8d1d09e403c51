"""Hot numeric kernels.

Each kernel has a numba implementation and a vectorized numpy
implementation. The module-level names point at the numba versions unless
numba is missing or ``MRFLIST_NO_NUMBA`` is set to a truthy value, in which
case the numpy versions are used. Both paths are importable directly
(``*_numba`` / ``*_numpy``) so tests and benchmarks can compare them.

Conventions: a list configuration is described by ``seq``, the reference
positions of the subject's nodes taken in subject order. A pair ``i < j``
with ``seq[i] > seq[j]`` is an inversion.
"""

import os

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is optional
    numba = None
    HAVE_NUMBA = False


def _flag_disabled():
    return os.environ.get("MRFLIST_NO_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")


USE_NUMBA = HAVE_NUMBA and not _flag_disabled()

# rows of the configuration matrix processed per block in kendall_matrix_numpy
_BLOCK = 1024


def _jit(fn):
    if HAVE_NUMBA:
        return numba.njit(cache=True, nogil=True)(fn)
    return fn


# --------------------------------------------------------------------------
# numba


@_jit
def count_inversions_numba(seq):
    n = seq.shape[0]
    total = 0
    for i in range(n):
        si = seq[i]
        for j in range(i + 1, n):
            if si > seq[j]:
                total += 1
    return total


@_jit
def typed_inversions_numba(seq, bits):
    n = seq.shape[0]
    i0 = 0
    i1 = 0
    for i in range(n):
        si = seq[i]
        for j in range(i + 1, n):
            if si > seq[j]:
                if bits[j]:
                    i1 += 1
                else:
                    i0 += 1
    return i0, i1


@_jit
def _popcount64(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return (x * np.uint64(0x0101010101010101)) >> np.uint64(56)


@_jit
def _kendall_packed(pos):
    # one bit per node pair: set when the pair is in index order
    m, n = pos.shape
    masks = np.zeros(m, dtype=np.uint64)
    for a in range(m):
        w = np.uint64(0)
        bit = np.uint64(1)
        for i in range(n):
            for j in range(i + 1, n):
                if pos[a, i] < pos[a, j]:
                    w |= bit
                bit <<= np.uint64(1)
        masks[a] = w
    # full rows instead of mirroring: row-major writes beat halving the work
    out = np.empty((m, m), dtype=np.int64)
    for a in range(m):
        ma = masks[a]
        for b in range(m):
            out[a, b] = np.int64(_popcount64(ma ^ masks[b]))
    return out


@_jit
def _kendall_loop(pos):
    m, n = pos.shape
    out = np.zeros((m, m), dtype=np.int64)
    for a in range(m):
        for b in range(a + 1, m):
            d = 0
            for i in range(n):
                pa = pos[a, i]
                pb = pos[b, i]
                for j in range(i + 1, n):
                    if (pa < pos[a, j]) != (pb < pos[b, j]):
                        d += 1
            out[a, b] = d
            out[b, a] = d
    return out


def kendall_matrix_numba(pos):
    pos = np.ascontiguousarray(pos, dtype=np.int64)
    n = pos.shape[1]
    if n * (n - 1) // 2 <= 64:
        return _kendall_packed(pos)
    return _kendall_loop(pos)


@_jit
def minplus_rows_numba(mat, vec):
    m, k = mat.shape
    vals = np.empty(m, dtype=np.int64)
    idx = np.empty(m, dtype=np.int64)
    for i in range(m):
        best = mat[i, 0] + vec[0]
        arg = 0
        for j in range(1, k):
            c = mat[i, j] + vec[j]
            if c < best:
                best = c
                arg = j
        vals[i] = best
        idx[i] = arg
    return vals, idx


# --------------------------------------------------------------------------
# numpy


def count_inversions_numpy(seq):
    seq = np.asarray(seq)
    if seq.shape[0] < 2:
        return 0
    gt = seq[:, None] > seq[None, :]
    return int(np.triu(gt, 1).sum())


def typed_inversions_numpy(seq, bits):
    seq = np.asarray(seq)
    bits = np.asarray(bits, dtype=bool)
    if seq.shape[0] < 2:
        return 0, 0
    inv = np.triu(seq[:, None] > seq[None, :], 1)
    per_second = inv.sum(axis=0)
    i1 = int(per_second[bits].sum())
    return int(per_second.sum()) - i1, i1


def _pair_signs(pos):
    n = pos.shape[1]
    iu, ju = np.triu_indices(n, 1)
    return (pos[:, iu] < pos[:, ju]).astype(np.float32)


def kendall_matrix_numpy(pos):
    pos = np.asarray(pos)
    m, n = pos.shape
    npairs = n * (n - 1) // 2
    if npairs == 0:
        return np.zeros((m, m), dtype=np.int64)
    s = _pair_signs(pos)
    t = 1.0 - s
    out = np.empty((m, m), dtype=np.int64)
    for lo in range(0, m, _BLOCK):
        hi = min(lo + _BLOCK, m)
        agree = s[lo:hi] @ s.T + t[lo:hi] @ t.T
        out[lo:hi] = npairs - np.rint(agree).astype(np.int64)
    return out


def minplus_rows_numpy(mat, vec):
    tot = np.asarray(mat, dtype=np.int64) + np.asarray(vec, dtype=np.int64)[None, :]
    idx = tot.argmin(axis=1)
    return tot[np.arange(tot.shape[0]), idx], idx


if USE_NUMBA:
    count_inversions = count_inversions_numba
    typed_inversions = typed_inversions_numba
    kendall_matrix = kendall_matrix_numba
    minplus_rows = minplus_rows_numba
else:
    count_inversions = count_inversions_numpy
    typed_inversions = typed_inversions_numpy
    kendall_matrix = kendall_matrix_numpy
    minplus_rows = minplus_rows_numpy


def backend():
    return "numba" if USE_NUMBA else "numpy"
