import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from warpflow.dtw import (
    DTW,
    BandConstraint,
    cost_matrix,
    dtw_bruteforce,
    dtw_distance,
    enumerate_paths,
    local_distance,
    path_cost,
    warp_path,
)
from warpflow.errors import EmptySeries, InfeasibleBand, TooLarge


def delannoy(n, m):
    """Number of monotone king-move paths on an n x m grid, counted independently."""
    table = [[1] * m for _ in range(n)]
    for i in range(1, n):
        for j in range(1, m):
            table[i][j] = table[i - 1][j] + table[i][j - 1] + table[i - 1][j - 1]
    return table[n - 1][m - 1]


@pytest.mark.parametrize("a,b,expected", [(0.3, 0.3, 0.0), (0.0, 1.0, 1.0), (0.25, 0.75, 0.5)])
def test_local_distance(a, b, expected):
    assert local_distance(a, b) == expected


@pytest.mark.parametrize(
    "x,y,expected",
    [
        ([0, 0.5, 1], [0, 0.5, 1], 0.0),
        ([4], [9], 5.0),
        ([0, 0, 1], [0, 1, 1], 0.0),
        ([0, 1], [1, 0], 2.0),
    ],
)
def test_distance_examples(x, y, expected):
    assert dtw_distance(x, y) == expected
    assert dtw_bruteforce(x, y) == expected


def test_two_by_two_paths_all_cost_two():
    x, y = [0, 1], [1, 0]
    paths = enumerate_paths(2, 2)
    assert len(paths) == 3
    assert [path_cost(x, y, p) for p in paths] == [2.0, 2.0, 2.0]


@pytest.mark.parametrize("n,m", [(1, 1), (1, 4), (3, 3), (4, 2), (5, 5)])
def test_path_enumeration_count(n, m):
    paths = enumerate_paths(n, m)
    assert len(paths) == len(set(paths)) == delannoy(n, m)
    for p in paths:
        assert p[0] == (0, 0) and p[-1] == (n - 1, m - 1)
        for (i0, j0), (i1, j1) in zip(p, p[1:]):
            assert (i1 - i0, j1 - j0) in {(1, 0), (0, 1), (1, 1)}


def test_bruteforce_limit():
    with pytest.raises(TooLarge):
        dtw_bruteforce(np.zeros(9), np.zeros(3))


def test_empty_series_rejected():
    with pytest.raises(EmptySeries):
        dtw_distance([], [1.0])


def test_warp_path_examples():
    assert warp_path([4], [9]) == [(0, 0)]
    x = [0.1, 0.7, 0.3, 0.9]
    assert warp_path(x, x) == [(i, i) for i in range(4)]
    p = warp_path([0, 0, 1], [0, 1, 1])
    assert path_cost([0, 0, 1], [0, 1, 1], p) == 0.0


def test_warp_path_prefers_diagonal_then_vertical():
    # every path costs the same here, so the tie-break alone decides
    assert warp_path([0, 0, 0], [0, 0]) == [(0, 0), (1, 0), (2, 1)]
    assert warp_path([0, 0], [0, 0, 0]) == [(0, 0), (0, 1), (1, 2)]


def test_cost_matrix_origin_and_band_sentinels():
    x = np.array([0.0, 1.0, 2.0, 3.0])
    y = np.array([1.0, 1.0, 2.0, 2.0])
    D = cost_matrix(x, y, BandConstraint.sakoe_chiba(1))
    assert D[0, 0] == abs(x[0] - y[0])
    for i, j in itertools.product(range(4), range(4)):
        assert np.isinf(D[i, j]) == (abs(i - j) > 1)


def test_infeasible_band():
    with pytest.raises(InfeasibleBand):
        dtw_distance([1, 2, 3, 4], [1, 2], band=1)
    assert dtw_distance([1, 2, 3, 4], [1, 2], band=2) >= 0


def test_full_matrix_and_two_row_agree():
    rng = np.random.default_rng(5)
    for _ in range(50):
        x = rng.random(rng.integers(1, 30))
        y = rng.random(rng.integers(1, 30))
        assert dtw_distance(x, y) == cost_matrix(x, y)[-1, -1]


def test_band_monotone_and_wide_band_matches_unconstrained():
    rng = np.random.default_rng(11)
    for _ in range(30):
        n = int(rng.integers(2, 25))
        m = int(rng.integers(2, 25))
        x, y = rng.random(n), rng.random(m)
        free = dtw_distance(x, y)
        previous = np.inf
        for r in range(abs(n - m), max(n, m)):
            d = dtw_distance(x, y, band=r)
            assert d <= previous + 1e-12
            previous = d
        assert dtw_distance(x, y, band=max(n, m) - 1) == free


def test_callable_wrapper():
    metric = DTW(band=3)
    assert metric([0, 1, 2], [0, 1, 2]) == 0.0
    assert metric.path([1], [2]) == [(0, 0)]


small = st.lists(st.sampled_from([0.0, 0.5, 1.0]), min_size=1, max_size=6)
reals = st.lists(
    st.floats(min_value=-50, max_value=50, allow_nan=False, allow_infinity=False),
    min_size=1,
    max_size=40,
)


@given(small, small)
def test_matches_bruteforce(x, y):
    assert dtw_distance(x, y) == dtw_bruteforce(x, y)


@given(st.lists(st.integers(-5, 5), min_size=1, max_size=6),
       st.lists(st.integers(-5, 5), min_size=1, max_size=6))
def test_matches_bruteforce_on_integers(x, y):
    assert dtw_distance(x, y) == dtw_bruteforce(x, y)


@settings(max_examples=200)
@given(reals, reals)
def test_symmetry_and_nonnegativity(x, y):
    d = dtw_distance(x, y)
    assert d >= 0
    assert abs(d - dtw_distance(y, x)) <= 1e-9


@settings(max_examples=200)
@given(reals)
def test_self_distance_zero(x):
    assert dtw_distance(x, x) == 0.0


@settings(max_examples=200)
@given(reals, reals)
def test_path_cost_matches_distance(x, y):
    p = warp_path(x, y)
    assert p[0] == (0, 0) and p[-1] == (len(x) - 1, len(y) - 1)
    assert abs(path_cost(x, y, p) - dtw_distance(x, y)) <= 1e-9


@given(st.integers(1, 30).flatmap(
    lambda n: st.tuples(
        st.lists(st.floats(-10, 10), min_size=n, max_size=n),
        st.lists(st.floats(-10, 10), min_size=n, max_size=n),
    )
))
def test_bounded_by_diagonal(pair):
    x, y = pair
    diagonal = sum(abs(a - b) for a, b in zip(x, y))
    assert dtw_distance(x, y) <= diagonal + 1e-9
