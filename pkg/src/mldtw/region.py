"""Turn predicted waypoints and their confidences into a search region.

Three steps: rasterize a staircase center path through the waypoints, derive
a per-row width from the confidences (low confidence -> wide search), then
convert path + widths into per-row column intervals.
"""

from __future__ import annotations

from typing import List, NamedTuple, Sequence, Tuple

import numpy as np

from .banded import SearchRegion, repair_region

ENDPOINT_WIDTH = 14
N_WAYPOINTS = 5
DEFAULT_QUANT = 5


class Waypoint(NamedTuple):
    """0-based (row, col) matrix cell the warp path is predicted to cross."""

    row: int
    col: int


def quantize(x: float, base: int = DEFAULT_QUANT) -> int:
    """Round to the nearest multiple of ``base``."""
    return int(base * round(x / base))


def waypoint_columns(m: int, count: int = N_WAYPOINTS) -> List[int]:
    """Equally spaced interior columns round(k*m/(count+1)), k = 1..count."""
    return [int(np.floor(k * m / (count + 1) + 0.5)) for k in range(1, count + 1)]


def center_path(waypoints: Sequence[Tuple[int, int]], n: int, m: int) -> List[Tuple[int, int]]:
    """Rasterize a monotone staircase from (0, 0) through the waypoints to (n-1, m-1).

    Each target is clamped to at least one row and one column past the
    current position and at most the last row/column. Within a segment the
    row advances by ``round(step * slope)`` per column. Segments end one row
    and one column short of their target, and the next segment picks up from
    there; the final cell (n-1, m-1) is appended explicitly.
    """
    path = [(0, 0)]
    targets = [tuple(int(v) for v in wp) for wp in waypoints] + [(n - 1, m - 1)]
    for wp_row, wp_col in targets:
        cur_row, cur_col = path[-1]
        target_row = min(max(cur_row + 1, wp_row), n - 1)
        target_col = min(max(cur_col + 1, wp_col), m - 1)
        span = target_col - cur_col
        if span <= 0:
            while cur_row != target_row:
                path.append((cur_row, cur_col))
                cur_row += 1
            continue
        slope = max(0.0, (target_row - cur_row) / span)
        last_row = cur_row
        for step in range(span):
            col = step + cur_col
            path.append((last_row, col))
            stop = target_row if step == span - 1 else round(step * slope) + cur_row
            for r in range(last_row, stop):
                path.append((r, col))
                last_row = r
    path.append((n - 1, m - 1))

    seen = set()
    out = []
    for cell in path:
        if cell not in seen:
            seen.add(cell)
            out.append(cell)
    return out


def anchor_widths(
    confidences: Sequence[float], m: int, endpoint_width: int = ENDPOINT_WIDTH
) -> List[int]:
    """Endpoint width, then int((2 - c) * m / 10) per confidence, then endpoint width."""
    for c in confidences:
        if not 0.0 < c <= 1.0:
            raise ValueError(f"confidence {c} outside (0, 1]")
    inner = [max(1, int((2 - c) * (m / 10))) for c in confidences]
    return [endpoint_width] + inner + [endpoint_width]


def width_profile(
    confidences: Sequence[float], n: int, m: int, endpoint_width: int = ENDPOINT_WIDTH
) -> List[int]:
    """Per-row search width, linearly interpolated between confidence anchors.

    Each anchor-to-anchor segment spans n // 6 rows. The result is cut or
    padded (repeating the final anchor) to exactly n entries and the last row
    is pinned to ``endpoint_width``.
    """
    anchors = anchor_widths(confidences, m, endpoint_width)
    seg = n // 6
    if seg < 1:
        raise ValueError(f"need n >= 6 rows for width interpolation, got {n}")
    widths = []
    for a, b in zip(anchors, anchors[1:]):
        widths.append(a)
        slope = (b - a) / seg
        for j in range(seg - 1):
            widths.append(int(a + slope * j))
    widths += [anchors[-1], anchors[-1]]
    widths = widths[:n] + [anchors[-1]] * max(0, n - len(widths))
    widths[-1] = endpoint_width
    return [max(1, w) for w in widths]


def raw_intervals(path: Sequence[Tuple[int, int]], widths: Sequence[int], n: int, m: int):
    """Per-row (lo, hi) 1-based intervals before clamping and repair."""
    cols_by_row: List[List[int]] = [[] for _ in range(n)]
    for r, c in path:
        if 0 <= r < n:
            cols_by_row[r].append(c)
    lo = np.empty(n, dtype=np.int64)
    hi = np.empty(n, dtype=np.int64)
    for i in range(1, n + 1):
        cols = cols_by_row[i - 1]
        middle = sum(cols) // len(cols) if cols else 0
        width = widths[i - 1]
        if len(cols) >= width:
            width = len(cols) + 1
        if middle - width // 2 < 0:
            xi = 1
            xf = min(m, xi + width)
        else:
            xf = min(m, middle + (width // 2 + 1))
            xi = xf - width
        if i == 1:
            xi = 1
            xf = min(m, xi + width)
        elif i == n:
            xf = m
            xi = xf - width
        lo[i - 1] = xi
        hi[i - 1] = xf
    return lo, hi


def region_from_path(
    path: Sequence[Tuple[int, int]], widths: Sequence[int], n: int, m: int
) -> SearchRegion:
    """Center each row's interval on the mean path column of that row.

    A row holding at least ``width`` path cells is widened to hold them all.
    The result is clamped to the matrix and passed through the same
    connectivity repair the band uses.
    """
    if len(widths) != n:
        raise ValueError(f"need {n} widths, got {len(widths)}")
    lo, hi = raw_intervals(path, widths, n, m)
    return repair_region(n, m, lo, hi)


def build_region(
    waypoints: Sequence[Tuple[int, int]],
    confidences: Sequence[float],
    n: int,
    m: int,
    endpoint_width: int = ENDPOINT_WIDTH,
) -> SearchRegion:
    """Waypoints + confidences (anchor confidence first) -> search region."""
    path = center_path(waypoints, n, m)
    widths = width_profile(confidences, n, m, endpoint_width)
    return region_from_path(path, widths, n, m)
