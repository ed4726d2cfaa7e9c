import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mldtw.region import (
    anchor_widths,
    build_region,
    center_path,
    quantize,
    raw_intervals,
    region_from_path,
    waypoint_columns,
    width_profile,
)


def assert_staircase(path, n, m):
    assert path[0] == (0, 0)
    assert path[-1] == (n - 1, m - 1)
    assert len(set(path)) == len(path)
    for (r0, c0), (r1, c1) in zip(path, path[1:]):
        assert (r1 - r0, c1 - c0) in ((0, 1), (1, 0), (1, 1))


class TestCenterPath:
    def test_diagonal_waypoints_hug_diagonal(self):
        wps = [(10, 10), (20, 20), (30, 30), (40, 40), (50, 50)]
        path = center_path(wps, 60, 60)
        assert_staircase(path, 60, 60)
        # the slope-stepping loop trails the target row, so the staircase
        # sits up to two columns right of the diagonal
        assert all(0 <= c - r <= 2 for r, c in path[:-1])
        for k in (9, 19, 29, 39, 49):
            assert (k, k) in path

    def test_hand_traced_off_diagonal(self):
        wps = [(8, 4), (9, 9), (10, 10), (10, 10), (10, 10)]
        path = center_path(wps, 12, 12)
        expected = [
            (0, 0), (0, 1), (1, 1), (1, 2), (2, 2), (3, 2), (3, 3), (4, 3),
            (5, 3), (6, 3), (7, 3), (7, 4), (7, 5), (7, 6), (7, 7), (7, 8),
            (8, 8), (8, 9), (9, 9), (9, 10), (10, 10), (11, 11),
        ]  # fmt: skip
        assert path == expected
        lead = [r - c for r, c in path]
        assert path[int(np.argmax(lead))][1] == 3  # one column before the waypoint

    def test_zero_predictions_clamp_forward(self):
        path = center_path([(0, 0)] * 5, 12, 12)
        assert_staircase(path, 12, 12)
        assert all(abs(r - c) <= 2 for r, c in path)

    def test_vertical_segment_at_last_column(self):
        path = center_path([(2, 11), (5, 11), (7, 11), (8, 11), (9, 11)], 12, 12)
        assert_staircase(path, 12, 12)
        # the climb happens one column short of the last column
        assert [r for r, c in path if c == 10] == list(range(1, 11))

    @settings(max_examples=200, deadline=None)
    @given(
        st.integers(7, 80),
        st.integers(7, 80),
        st.lists(st.tuples(st.integers(-5, 90), st.integers(-5, 90)), min_size=5, max_size=5),
    )
    def test_always_valid_staircase(self, n, m, wps):
        wps = sorted(wps, key=lambda w: w[1])
        assert_staircase(center_path(wps, n, m), n, m)


class TestWidths:
    def test_anchor_full_confidence(self):
        assert anchor_widths([1.0], 200)[1] == 20

    def test_anchor_half_confidence(self):
        assert anchor_widths([0.5], 200)[1] == 30

    def test_endpoint_width(self):
        w = width_profile([0.3, 0.9, 0.2, 0.6, 0.4, 0.8], 200, 200)
        assert w[0] == 14 and w[-1] == 14
        assert len(w) == 200

    def test_interpolation_between_anchors(self):
        # n=60 -> 10 rows per segment; anchors 14, 20, 20, ...
        w = width_profile([1.0] * 6, 60, 200)
        assert w[0] == 14 and w[10] == 20
        assert w[:11] == sorted(w[:11])

    def test_padding_short_profile(self):
        # n=11: segments of one row each give 7 + 2 = 9 entries, padded to 11
        w = width_profile([1.0] * 6, 11, 100)
        assert len(w) == 11 and w[-1] == 14

    def test_rejects_bad_confidence(self):
        with pytest.raises(ValueError):
            anchor_widths([0.0], 100)
        with pytest.raises(ValueError):
            anchor_widths([1.2], 100)

    @given(st.integers(20, 2000), st.floats(0.001, 1.0), st.floats(0.001, 1.0))
    def test_inverse_width_law(self, m, c1, c2):
        lo, hi = sorted((c1, c2))
        w_lo, w_hi = anchor_widths([lo, hi], m)[1:3]
        assert w_lo >= w_hi
        if hi - lo >= 10 / m:
            assert w_lo > w_hi


class TestRegionFromPath:
    def test_diagonal_constant_width(self):
        path = [(k, k) for k in range(10)]
        R = region_from_path(path, [3] * 10, 10, 10)
        assert R.intervals == [
            (1, 4), (1, 3), (1, 4), (2, 5), (3, 6), (4, 7), (5, 8), (6, 9), (7, 10), (7, 10),
        ]  # fmt: skip
        for i in range(1, 11):
            for j in (i - 1, i, i + 1):
                if 1 <= j <= 10:
                    assert R.contains(i, j)

    def test_wide_row_gets_widened(self):
        path = [(0, 0)] + [(1, c) for c in range(1, 5)] + [(4, c) for c in range(5, 11)]
        lo, hi = raw_intervals(path, [4] * 10, 10, 20)
        # row 5 (1-based) holds 6 path cells: width 7 centred on column 7 (0-based)
        assert (lo[4], hi[4]) == (4, 11)
        assert hi[4] - lo[4] == 7

    def test_corners_always_inside(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            n, m = rng.integers(7, 60, size=2)
            cols = np.sort(rng.integers(0, m, size=5))
            rows = rng.integers(0, n, size=5)
            conf = [1.0] + list(rng.uniform(0.05, 1.0, size=5))
            R = build_region(list(zip(rows, cols)), conf, n, m)
            assert R.contains(1, 1) and R.contains(n, m)
            assert R.is_connected()
            assert R.area <= n * m


def test_quantize():
    assert quantize(13, 5) == 15
    assert quantize(12, 5) == 10


def test_waypoint_columns():
    assert waypoint_columns(60) == [10, 20, 30, 40, 50]
    assert waypoint_columns(200) == [33, 67, 100, 133, 167]
    assert len(waypoint_columns(7)) == 5
