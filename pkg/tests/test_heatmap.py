import numpy as np

from mldtw.banded import banded_dtw
from mldtw.core import CostMatrix, full_cost_matrix, full_dtw
from mldtw.heatmap import heatmap_export, heatmap_pixels, read_pgm


def test_header_and_size(tmp_path):
    al = full_dtw(np.arange(5.0), np.arange(8.0), keep_matrix=True)
    heatmap_export(al.matrix, tmp_path / "h.pgm", al.path)
    data = (tmp_path / "h.pgm").read_bytes()
    assert data.startswith(b"P5\n9 6\n255\n")
    img = read_pgm(tmp_path / "h.pgm")
    assert img.shape == (6, 9)


def test_dark_is_small():
    M = full_cost_matrix([0.0, 1.0, 2.0, 3.0], [3.0, 2.0, 1.0, 0.0])
    img = heatmap_pixels(M)
    interior = M.cells[1:, 1:]
    lo = np.unravel_index(np.argmin(interior), interior.shape)
    hi = np.unravel_index(np.argmax(interior), interior.shape)
    assert img[1:, 1:][lo] == 0
    assert img[1:, 1:][hi] == 254
    assert img[0, 1] == 255 and img[1, 0] == 255


def test_flat_matrix_mid_gray():
    cells = np.full((4, 4), 2.0)
    cells[0, 1:] = np.inf
    cells[1:, 0] = np.inf
    cells[0, 0] = 0.0
    img = heatmap_pixels(CostMatrix(cells, 9))
    assert np.all(img[1:, 1:] == 128)


def test_band_margins_white_and_path_black():
    a = np.sin(np.linspace(0, 6, 30))
    b = np.sin(np.linspace(0.5, 6.5, 30))
    al = banded_dtw(a, b, 3, keep_matrix=True)
    img = heatmap_pixels(al.matrix, al.path)
    assert img[1, 30] == 255 and img[30, 1] == 255
    for i, j in al.path:
        assert img[i, j] == 0
    assert np.sum(img[1:, 1:] == 255) == 30 * 30 - al.cells_computed
