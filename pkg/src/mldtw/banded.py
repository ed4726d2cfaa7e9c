"""Cost-matrix fill restricted to a per-row column interval set.

The Sakoe-Chiba band is one such region; the learned search region built in
:mod:`mldtw.region` is another. Both share the fill, the connectivity repair
and the backtracking here.
"""

from __future__ import annotations

import math
import time
from typing import Iterable, List, Tuple

import numpy as np

from . import _kernels
from .core import Alignment, CostMatrix, WarpPath, _check_dims, as_series
from .errors import DimensionMismatchError, DisconnectedRegionError


class SearchRegion:
    """Inclusive 1-based column interval ``[lo[i], hi[i]]`` for every row i in 1..n.

    ``lo`` and ``hi`` are stored with a dummy slot 0 so they index by row
    directly, which is also the layout the fill kernel expects.
    """

    __slots__ = ("n", "m", "lo", "hi")

    def __init__(self, n: int, m: int, lo, hi):
        lo = np.asarray(lo, dtype=np.int64)
        hi = np.asarray(hi, dtype=np.int64)
        if lo.shape != (n,) or hi.shape != (n,):
            raise ValueError(f"need {n} intervals, got {lo.shape[0]} / {hi.shape[0]}")
        if np.any(lo < 1) or np.any(hi > m) or np.any(lo > hi):
            raise ValueError("every interval must satisfy 1 <= lo <= hi <= m")
        self.n = n
        self.m = m
        self.lo = np.concatenate(([0], lo))
        self.hi = np.concatenate(([0], hi))
        self.lo.flags.writeable = False
        self.hi.flags.writeable = False

    @classmethod
    def full(cls, n: int, m: int) -> "SearchRegion":
        return cls(n, m, np.ones(n, dtype=np.int64), np.full(n, m, dtype=np.int64))

    @property
    def intervals(self) -> List[Tuple[int, int]]:
        return [(int(self.lo[i]), int(self.hi[i])) for i in range(1, self.n + 1)]

    @property
    def area(self) -> int:
        return int(np.sum(self.hi[1:] - self.lo[1:] + 1))

    def contains(self, i: int, j: int) -> bool:
        return 1 <= i <= self.n and self.lo[i] <= j <= self.hi[i]

    def is_connected(self) -> bool:
        """True when each row has a cell reachable from the previous row."""
        if not (self.contains(1, 1) and self.contains(self.n, self.m)):
            return False
        for i in range(2, self.n + 1):
            if self.lo[i] > self.hi[i - 1] + 1 or self.hi[i] < self.lo[i - 1]:
                return False
        return True

    def mask(self) -> np.ndarray:
        """Boolean (n, m) mask, 0-based, for plotting and tests."""
        out = np.zeros((self.n, self.m), dtype=bool)
        for i in range(1, self.n + 1):
            out[i - 1, self.lo[i] - 1 : self.hi[i]] = True
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, SearchRegion):
            return NotImplemented
        return (
            self.n == other.n
            and self.m == other.m
            and np.array_equal(self.lo, other.lo)
            and np.array_equal(self.hi, other.hi)
        )

    def __repr__(self) -> str:
        return f"SearchRegion(n={self.n}, m={self.m}, area={self.area})"


def repair_region(n: int, m: int, lo: Iterable[int], hi: Iterable[int]) -> SearchRegion:
    """Clamp raw intervals and make every kept cell reachable from (1, 1).

    Row 1 is pinned to start at column 1 and row n to end at column m. Going
    down the rows, an interval that starts past the previous row's end + 1 is
    extended leftward to the previous row's start; one that ends before the
    previous row's start is extended rightward to it. Cells left of the
    previous row's start can never be reached by a monotone path, so the
    interval start is raised to it. After this pass every cell in the region
    gets a finite value, so the region area equals the computed cell count.
    """
    lo = np.clip(np.asarray(list(lo), dtype=np.int64), 1, m)
    hi = np.clip(np.asarray(list(hi), dtype=np.int64), 1, m)
    if lo.shape != (n,) or hi.shape != (n,):
        raise ValueError("interval arrays must have one entry per row")
    hi = np.maximum(hi, lo)
    lo[0] = 1
    hi[-1] = m
    for i in range(1, n):
        plo, phi = lo[i - 1], hi[i - 1]
        if lo[i] > phi + 1:
            lo[i] = plo
        if hi[i] < plo:
            hi[i] = plo
        if lo[i] < plo:
            lo[i] = plo
    return SearchRegion(n, m, lo, hi)


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def sakoe_chiba_region(n: int, m: int, radius: int) -> SearchRegion:
    """Band of half-width ``radius`` around the stretched diagonal j = i*m/n."""
    if radius < 1:
        raise ValueError(f"radius must be >= 1, got {radius}")
    if n < 2 or m < 2:
        raise ValueError("matrix dimensions must be >= 2")
    centers = np.array([_round_half_up(i * m / n) for i in range(1, n + 1)], dtype=np.int64)
    return repair_region(n, m, centers - radius, centers + radius)


def constrained_cost_matrix(A, B, region: SearchRegion) -> CostMatrix:
    """Fill only the cells inside ``region``; everything else stays infinite."""
    A, B = as_series(A), as_series(B)
    _check_dims(A, B)
    if (region.n, region.m) != (len(A), len(B)):
        raise DimensionMismatchError(
            f"region is {region.n}x{region.m} but series are {len(A)}x{len(B)}"
        )
    cells, count = _kernels.fill_region(A.values, B.values, region.lo, region.hi)
    return CostMatrix(cells, int(count))


def constrained_dtw(A, B, region: SearchRegion, keep_matrix: bool = False) -> Alignment:
    A, B = as_series(A), as_series(B)
    _check_dims(A, B)
    if (region.n, region.m) != (len(A), len(B)):
        raise DimensionMismatchError(
            f"region is {region.n}x{region.m} but series are {len(A)}x{len(B)}"
        )
    t0 = time.perf_counter()
    cells, count = _kernels.fill_region(A.values, B.values, region.lo, region.hi)
    if not np.isfinite(cells[-1, -1]):
        raise DisconnectedRegionError("bottom-right cell is infinite: disconnected region")
    raw = _kernels.backtrack(cells)
    elapsed = time.perf_counter() - t0
    path = WarpPath(tuple((int(r), int(c)) for r, c in raw))
    M = CostMatrix(cells, int(count))
    return Alignment(M.distance, path, M.computed_count, elapsed, M if keep_matrix else None)


def banded_dtw(A, B, radius: int, keep_matrix: bool = False) -> Alignment:
    A, B = as_series(A), as_series(B)
    region = sakoe_chiba_region(len(A), len(B), radius)
    return constrained_dtw(A, B, region, keep_matrix=keep_matrix)
