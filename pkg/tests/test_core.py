import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import all_paths, branch_and_bound_dtw, brute_force_dtw

from mldtw.core import (
    CostMatrix,
    TimeSeries,
    WarpPath,
    backtrack,
    full_cost_matrix,
    full_dtw,
    path_cost,
    point_distance,
)
from mldtw.errors import DimensionMismatchError, DisconnectedRegionError

values = st.floats(-5, 5, allow_nan=False, allow_infinity=False)
short_series = st.lists(values, min_size=2, max_size=7)


def as_points(xs):
    return [(x,) for x in xs]


class TestPointDistance:
    def test_identical(self):
        assert point_distance([3], [3]) == 0

    def test_one_dimensional(self):
        assert point_distance([1], [4]) == 3

    def test_two_dimensional(self):
        assert point_distance([0, 0], [3, 4]) == 5

    def test_dim_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            point_distance([0, 0], [1])


class TestTimeSeries:
    def test_rejects_short(self):
        with pytest.raises(ValueError):
            TimeSeries([5.0])

    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            TimeSeries([1.0, np.nan])

    def test_promotes_1d(self):
        s = TimeSeries([1, 2, 3])
        assert s.dim == 1 and len(s) == 3
        assert s.values.shape == (3, 1)

    def test_immutable(self):
        s = TimeSeries([1, 2, 3])
        with pytest.raises(ValueError):
            s.values[0, 0] = 9


class TestCostMatrix:
    def test_identical_series(self):
        M = full_cost_matrix([1, 2, 3], [1, 2, 3])
        assert M.cells[-1, -1] == 0

    def test_constant_offset(self):
        # the 3 paths through a 2x2 grid cost 2, 3, 3
        M = full_cost_matrix([0, 0], [1, 1])
        assert M.cells[-1, -1] == 2
        assert brute_force_dtw(as_points([0, 0]), as_points([1, 1])) == 2

    def test_worked_example(self):
        M = full_cost_matrix([1, 2, 3], [2, 2, 2, 3, 4])
        expected = np.array(
            [
                [1, 2, 3, 5, 8],
                [1, 1, 1, 2, 4],
                [2, 2, 2, 1, 2],
            ],
            dtype=float,
        )
        np.testing.assert_array_equal(M.cells[1:, 1:], expected)
        assert brute_force_dtw(as_points([1, 2, 3]), as_points([2, 2, 2, 3, 4])) == 2

    def test_border(self):
        M = full_cost_matrix([1, 5, 2], [0, 3])
        assert M.cells[0, 0] == 0
        assert np.all(np.isinf(M.cells[0, 1:]))
        assert np.all(np.isinf(M.cells[1:, 0]))
        assert M.computed_count == 6 == np.isfinite(M.cells[1:, 1:]).sum()

    def test_recurrence_holds(self):
        rng = np.random.default_rng(3)
        a, b = rng.normal(size=9), rng.normal(size=7)
        D = full_cost_matrix(a, b).cells
        for i in range(1, 10):
            for j in range(1, 8):
                pred = min(D[i - 1, j], D[i, j - 1], D[i - 1, j - 1])
                assert D[i, j] == pytest.approx(abs(a[i - 1] - b[j - 1]) + pred, abs=1e-12)

    def test_dim_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            full_cost_matrix(np.zeros((3, 2)), np.zeros((3, 1)))


class TestBacktrack:
    def test_diagonal(self):
        assert backtrack(full_cost_matrix([1, 2, 3], [1, 2, 3])).pairs == ((1, 1), (2, 2), (3, 3))

    def test_tie_break_order(self):
        path = backtrack(full_cost_matrix([1, 2, 3], [2, 2, 2, 3, 4]))
        assert path.pairs == ((1, 1), (2, 2), (2, 3), (3, 4), (3, 5))

    def test_two_by_two(self):
        assert backtrack(full_cost_matrix([1, 2], [1, 2])).pairs == ((1, 1), (2, 2))

    def test_infinite_corner(self):
        cells = np.full((3, 3), np.inf)
        cells[0, 0] = 0
        with pytest.raises(DisconnectedRegionError):
            backtrack(CostMatrix(cells, 0))


class TestFullDtw:
    def test_identical_sines(self):
        x = np.sin(np.linspace(0, 4 * np.pi, 200))
        assert full_dtw(x, x).distance == 0

    def test_worked_example(self):
        al = full_dtw([1, 2, 3], [2, 2, 2, 3, 4])
        assert al.distance == 2
        assert len(al.path) == 5
        assert al.cells_computed == 15

    def test_multidimensional(self):
        a = [(0, 0), (1, 1), (2, 2)]
        b = [(0, 0), (2, 2)]
        assert full_dtw(a, b).distance == pytest.approx(branch_and_bound_dtw(a, b))

    @settings(max_examples=150, deadline=None)
    @given(short_series, short_series)
    def test_matches_enumeration(self, a, b):
        assert full_dtw(a, b).distance == pytest.approx(
            brute_force_dtw(as_points(a), as_points(b)), rel=1e-9, abs=1e-12
        )

    @settings(max_examples=150, deadline=None)
    @given(st.lists(values, min_size=2, max_size=25), st.lists(values, min_size=2, max_size=25))
    def test_path_properties(self, a, b):
        al = full_dtw(a, b)
        al.path.validate(len(a), len(b))
        assert len(set(al.path.pairs)) == len(al.path)
        assert path_cost(a, b, al.path) == pytest.approx(al.distance, rel=1e-9, abs=1e-12)
        assert full_dtw(b, a).distance == pytest.approx(al.distance, rel=1e-12, abs=1e-12)
        assert full_dtw(a, a).distance == 0


def test_enumeration_counts():
    # Delannoy numbers D(1,1)=3, D(2,2)=13, D(2,3)=25
    assert sum(1 for _ in all_paths(2, 2)) == 3
    assert sum(1 for _ in all_paths(3, 3)) == 13
    assert sum(1 for _ in all_paths(3, 4)) == 25


def test_branch_and_bound_agrees_with_enumeration():
    rng = np.random.default_rng(11)
    for _ in range(40):
        n, m = rng.integers(2, 7, size=2)
        a = as_points(rng.uniform(-5, 5, n))
        b = as_points(rng.uniform(-5, 5, m))
        assert branch_and_bound_dtw(a, b) == pytest.approx(brute_force_dtw(a, b), abs=1e-12)


def test_warp_path_validate_rejects_jump():
    with pytest.raises(ValueError):
        WarpPath(((1, 1), (3, 3))).validate(3, 3)
    with pytest.raises(ValueError):
        WarpPath(((1, 1), (2, 2))).validate(3, 3)
