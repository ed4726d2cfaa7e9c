"""Exact dynamic time warping: point distance, cost matrix, warp path."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .errors import DimensionMismatchError, DisconnectedRegionError

INF = np.inf
MIN_LENGTH = 2


class TimeSeries:
    """An ordered run of sample points, stored as an (n, dim) float64 array.

    1-D input is promoted to dim 1. The array is made read-only so instances
    can be shared freely.
    """

    __slots__ = ("values", "id")

    def __init__(self, values, id: Optional[str] = None):
        arr = np.array(values, dtype=np.float64)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.ndim != 2 or arr.shape[1] < 1:
            raise ValueError(f"expected 1-D or (n, dim) data, got shape {arr.shape}")
        if arr.shape[0] < MIN_LENGTH:
            raise ValueError(f"series needs at least {MIN_LENGTH} points, got {arr.shape[0]}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("series contains non-finite values")
        arr.flags.writeable = False
        self.values = arr
        self.id = id

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @property
    def points(self) -> np.ndarray:
        return self.values

    def __len__(self) -> int:
        return self.values.shape[0]

    def __repr__(self) -> str:
        return f"TimeSeries(len={len(self)}, dim={self.dim}, id={self.id!r})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return self.id == other.id and np.array_equal(self.values, other.values)

    __hash__ = None


def as_series(x) -> TimeSeries:
    return x if isinstance(x, TimeSeries) else TimeSeries(x)


@dataclass(frozen=True)
class CostMatrix:
    """Accumulated-distance grid of shape (n+1, m+1).

    Row 0 and column 0 form the infinite border except for cell (0, 0) = 0.
    ``computed_count`` is the number of finite cells with i, j >= 1.
    """

    cells: np.ndarray
    computed_count: int

    @property
    def rows(self) -> int:
        return self.cells.shape[0]

    @property
    def cols(self) -> int:
        return self.cells.shape[1]

    @property
    def distance(self) -> float:
        return float(self.cells[-1, -1])


@dataclass(frozen=True)
class WarpPath:
    """1-based (row, col) pairs from (1, 1) to (n, m)."""

    pairs: tuple

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.pairs, dtype=np.int64).reshape(-1, 2)

    def validate(self, n: int, m: int) -> None:
        """Raise ValueError unless the boundary, step and monotonicity rules hold."""
        if not self.pairs:
            raise ValueError("empty warp path")
        if self.pairs[0] != (1, 1):
            raise ValueError(f"path starts at {self.pairs[0]}, not (1, 1)")
        if self.pairs[-1] != (n, m):
            raise ValueError(f"path ends at {self.pairs[-1]}, not ({n}, {m})")
        for (r0, c0), (r1, c1) in zip(self.pairs, self.pairs[1:]):
            if (r1 - r0, c1 - c0) not in ((0, 1), (1, 0), (1, 1)):
                raise ValueError(f"illegal step {(r0, c0)} -> {(r1, c1)}")


@dataclass(frozen=True)
class Alignment:
    distance: float
    path: WarpPath
    cells_computed: int
    fill_time: float
    matrix: Optional[CostMatrix] = field(default=None, repr=False, compare=False)


def point_distance(a, b) -> float:
    """Euclidean distance between two points; |a - b| in one dimension."""
    a = np.atleast_1d(np.asarray(a, dtype=np.float64))
    b = np.atleast_1d(np.asarray(b, dtype=np.float64))
    if a.shape != b.shape:
        raise DimensionMismatchError(f"point dims differ: {a.shape[0]} vs {b.shape[0]}")
    if a.shape[0] == 1:
        return float(abs(a[0] - b[0]))
    return float(np.sqrt(np.sum((a - b) ** 2)))


def _check_dims(A: TimeSeries, B: TimeSeries) -> None:
    if A.dim != B.dim:
        raise DimensionMismatchError(f"series dims differ: {A.dim} vs {B.dim}")


def full_cost_matrix(A, B) -> CostMatrix:
    A, B = as_series(A), as_series(B)
    _check_dims(A, B)
    cells = _kernels.fill_full(A.values, B.values)
    return CostMatrix(cells, len(A) * len(B))


def backtrack(M: CostMatrix) -> WarpPath:
    """Recover the warp path by walking minimal predecessors from (n, m).

    Ties are broken diagonal first, then column decrement, then row decrement.
    """
    if not np.isfinite(M.cells[-1, -1]):
        raise DisconnectedRegionError("bottom-right cell is infinite: disconnected region")
    raw = _kernels.backtrack(M.cells)
    return WarpPath(tuple((int(r), int(c)) for r, c in raw))


def path_cost(A, B, path: WarpPath) -> float:
    """Sum of point distances over the path pairs, computed independently of any matrix."""
    A, B = as_series(A), as_series(B)
    p = path.as_array() - 1
    diff = A.values[p[:, 0]] - B.values[p[:, 1]]
    return float(np.sum(np.sqrt(np.sum(diff * diff, axis=1))))


def full_dtw(A, B, keep_matrix: bool = False) -> Alignment:
    A, B = as_series(A), as_series(B)
    _check_dims(A, B)
    t0 = time.perf_counter()
    cells = _kernels.fill_full(A.values, B.values)
    raw = _kernels.backtrack(cells)
    elapsed = time.perf_counter() - t0
    M = CostMatrix(cells, len(A) * len(B))
    path = WarpPath(tuple((int(r), int(c)) for r, c in raw))
    return Alignment(M.distance, path, M.computed_count, elapsed, M if keep_matrix else None)


def dtw_distance(A: Sequence, B: Sequence) -> float:
    """Convenience wrapper returning only the exact distance."""
    return full_dtw(A, B).distance
