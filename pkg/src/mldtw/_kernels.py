"""Compiled inner loops for cost-matrix fill and backtracking.

All matrices are (n+1, m+1) float64 with row 0 / column 0 acting as the
infinite border, so cell (i, j) addresses points a[i-1] and b[j-1].
"""

import numpy as np
from numba import njit

INF = np.inf


@njit(cache=True, nogil=True)
def _dist(a, b, i, j):
    d = a.shape[1]
    if d == 1:
        return abs(a[i, 0] - b[j, 0])
    s = 0.0
    for k in range(d):
        t = a[i, k] - b[j, k]
        s += t * t
    return np.sqrt(s)


@njit(cache=True, nogil=True)
def fill_full(a, b):
    n = a.shape[0]
    m = b.shape[0]
    D = np.full((n + 1, m + 1), INF)
    D[0, 0] = 0.0
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            best = D[i - 1, j - 1]
            if D[i - 1, j] < best:
                best = D[i - 1, j]
            if D[i, j - 1] < best:
                best = D[i, j - 1]
            D[i, j] = _dist(a, b, i - 1, j - 1) + best
    return D


@njit(cache=True, nogil=True)
def fill_region(a, b, lo, hi):
    """Fill only columns lo[i]..hi[i] (inclusive, 1-based) of each row i.

    lo/hi have length n+1; index 0 is ignored. Cells whose predecessors are
    all infinite stay infinite and are not counted.
    """
    n = a.shape[0]
    m = b.shape[0]
    D = np.full((n + 1, m + 1), INF)
    D[0, 0] = 0.0
    count = 0
    for i in range(1, n + 1):
        for j in range(lo[i], hi[i] + 1):
            best = D[i - 1, j - 1]
            if D[i - 1, j] < best:
                best = D[i - 1, j]
            if D[i, j - 1] < best:
                best = D[i, j - 1]
            if best < INF:
                D[i, j] = _dist(a, b, i - 1, j - 1) + best
                count += 1
    return D, count


@njit(cache=True, nogil=True)
def backtrack(D):
    """Walk from (n, m) to (1, 1); ties go diagonal, then left, then up."""
    i = D.shape[0] - 1
    j = D.shape[1] - 1
    out = np.empty((i + j, 2), dtype=np.int64)
    k = 0
    out[k, 0] = i
    out[k, 1] = j
    k += 1
    while i != 1 or j != 1:
        diag = D[i - 1, j - 1]
        left = D[i, j - 1]
        up = D[i - 1, j]
        if diag <= left and diag <= up:
            i -= 1
            j -= 1
        elif left <= up:
            j -= 1
        else:
            i -= 1
        out[k, 0] = i
        out[k, 1] = j
        k += 1
    return out[:k][::-1].copy()
