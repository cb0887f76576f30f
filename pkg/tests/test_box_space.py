import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import box_grid, linf
from orbitfix.box_space import (DIM_CAP, Box, BoxSpace, box_ball_hull, box_cov, box_delta,
                                box_radius_from, chebyshev_center, dist_inf)
from orbitfix.maps import sample_point
from strategies import boxes


def test_box_validation():
    with pytest.raises(ValueError):
        Box((F(1),), (F(0),))
    with pytest.raises(ValueError):
        Box((0, 0), (1,))
    with pytest.raises(ValueError):
        Box((), ())
    with pytest.raises(ValueError):
        BoxSpace(Box.cube(DIM_CAP + 1, 0, 1))
    assert Box.point((1, "1/2")).is_point


def test_delta_examples():
    assert box_delta(Box.point((F(1, 3),))) == 0
    assert box_delta(Box.cube(1, -1, 1)) == 2
    assert box_delta(Box((0, 0), (1, 3))) == 3


def test_radius_examples():
    A = Box((0, 0), (1, 3))
    assert box_radius_from((F(0),), Box.cube(1, -1, 1)) == 1
    assert box_radius_from((F(0), F(0)), A) == 3
    assert box_radius_from(chebyshev_center(A), A) == F(3, 2)
    # farthest grid point of A from the origin: the corner (1, 3)
    assert max(linf((0, 0), p) for p in box_grid(A.lo, A.hi, 6)) == 3


def test_ball_hull_examples():
    I = Box.cube(1, -1, 1)
    assert box_ball_hull(I, 1, I) == Box.point((0,))
    assert box_ball_hull(I, F(1, 2), I) is None
    U = Box.cube(1, 0, 1)
    assert box_ball_hull(U, F(3, 4), U) == Box((F(1, 4),), (F(3, 4),))
    with pytest.raises(ValueError):
        box_ball_hull(U, -1, U)


def test_cov_examples():
    assert box_cov([(F(1, 2),)]) == Box.point((F(1, 2),))
    assert box_cov([(F(-1, 3),), (F(1),)]) == Box((F(-1, 3),), (F(1),))
    assert box_cov([Box.cube(2, 0, 1), Box((2, 0), (3, 1))]) == Box((0, 0), (3, 1))
    with pytest.raises(ValueError):
        box_cov([])


def test_center_examples():
    p = Box.point((F(2), F(-1)))
    assert chebyshev_center(p) == (2, -1)
    assert chebyshev_center(Box.cube(1, -1, 1)) == (0,)
    assert chebyshev_center(Box((0, 0), (1, 3))) == (F(1, 2), F(3, 2))


def test_lattice_operations():
    a, b = Box((0, 0), (2, 2)), Box((1, 1), (3, 3))
    assert a & b == Box((1, 1), (2, 2))
    assert a | b == Box((0, 0), (3, 3))
    assert a.intersect(Box((5, 5), (6, 6))) is None
    assert Box((1, 1), (2, 2)) <= a
    assert sorted(Box((0, 1), (1, 1)).corners()) == [(0, 1), (1, 1)]


@settings(max_examples=80, deadline=None)
@given(boxes(), st.integers(0, 2**31))
def test_center_is_optimal_on_samples(A, seed):
    rng = random.Random(seed)
    amb = A | Box(tuple(v - 1 for v in A.lo), tuple(v + 1 for v in A.hi))
    z = chebyshev_center(A)
    dA = box_delta(A)
    assert box_radius_from(z, A) == dA / 2
    for _ in range(100):
        y = sample_point(rng, amb, 32)
        assert box_radius_from(y, A) >= dA / 2


@settings(max_examples=80, deadline=None)
@given(boxes(max_dim=2), st.integers(0, 8), st.sampled_from([1, 2, 4]))
def test_ball_hull_matches_grid_membership(A, num, den):
    r = F(num, den)
    amb = Box(tuple(v - 2 for v in A.lo), tuple(v + 2 for v in A.hi))
    H = box_ball_hull(A, r, amb)
    corners = list(A.corners())
    for p in box_grid(amb.lo, amb.hi, 16):
        inside = all(dist_inf(p, c) <= r for c in corners)
        assert inside == (H is not None and H.contains(p))


@settings(max_examples=60, deadline=None)
@given(boxes(max_dim=2))
def test_radius_is_the_farthest_point(A):
    x = tuple(v - F(1, 3) for v in A.lo)
    assert box_radius_from(x, A) == max(linf(x, p) for p in box_grid(A.lo, A.hi, 4))
