"""Grayscale PGM rendering of cost matrices (dark = small, uncomputed = white)."""

import re
from pathlib import Path

import numpy as np

from .core import CostMatrix, WarpPath

UNCOMPUTED = 255
PATH_LEVEL = 0
FLAT_LEVEL = 128


def heatmap_pixels(M: CostMatrix, path: WarpPath = None) -> np.ndarray:
    """(n+1, m+1) uint8 image of the matrix, border row/column included."""
    cells = M.cells
    finite = np.isfinite(cells)
    interior = finite.copy()
    interior[0, :] = False
    interior[:, 0] = False
    img = np.full(cells.shape, UNCOMPUTED, dtype=np.uint8)
    if interior.any():
        vals = cells[interior]
        lo, hi = vals.min(), vals.max()
        if hi > lo:
            scaled = np.clip((cells[finite] - lo) / (hi - lo), 0.0, 1.0)
            img[finite] = np.round(scaled * 254).astype(np.uint8)
        else:
            img[finite] = FLAT_LEVEL
    if path is not None:
        p = path.as_array()
        img[p[:, 0], p[:, 1]] = PATH_LEVEL
    return img


def heatmap_export(M: CostMatrix, path, warp_path: WarpPath = None) -> None:
    """Write a binary (P5) PGM whose width is m+1 and height n+1."""
    img = heatmap_pixels(M, warp_path)
    height, width = img.shape
    with open(Path(path), "wb") as fh:
        fh.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
        fh.write(img.tobytes())


def read_pgm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    match = re.match(rb"P5\s+(\d+)\s+(\d+)\s+255\s", data)
    if match is None:
        raise ValueError("not an 8-bit P5 PGM")
    width, height = int(match.group(1)), int(match.group(2))
    return np.frombuffer(data[match.end() :], dtype=np.uint8).reshape(height, width)
