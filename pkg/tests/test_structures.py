from fractions import Fraction as F

import pytest
from hypothesis import given, settings

from oracles import brute_admissible, diam, far, hull
from orbitfix.box_space import Box, BoxSpace
from orbitfix.finite_space import build_finite_space, cov
from orbitfix.generators import gen_named
from orbitfix.structures import (box_structure_report, check_metric_ns, check_one_local_retract,
                                 check_pq_urns, check_urns, pq_hulls, recheck, uns_constant)
from strategies import metric_spaces


def test_one_point_space_is_vacuous():
    one = build_finite_space(None, [[0]])
    assert check_metric_ns(one).holds
    assert check_pq_urns(one, F(1, 2), F(1, 2)).holds
    with pytest.raises(ValueError):
        uns_constant(one)


def test_ns_counterexamples(path3, equilateral3):
    r = check_metric_ns(equilateral3)
    assert not r.holds and r.counterexample["set"] == {0, 1, 2}
    assert all(far(equilateral3.dist, z, {0, 1, 2}) == 1 for z in range(3))
    r = check_metric_ns(path3)
    assert not r.holds
    assert r.counterexample == {"set": frozenset({0, 1}), "delta": 1, "radii": {0: 1, 1: 1}}
    assert recheck(path3, r)


def test_uns_constants(path3, equilateral3):
    c, r = uns_constant(path3)
    assert c == 1 and not r.holds and r.counterexample["set"] == {0, 1}
    c, _ = uns_constant(equilateral3)
    assert c == 1
    star = gen_named("star", 5).space
    c, r = uns_constant(star)
    assert c == 1 and len(r.counterexample["set"]) == 2


def test_pq_examples(path3):
    r = check_pq_urns(path3, F(1, 2), F(1, 2))
    assert not r.holds and r.counterexample["set"] == {0, 1}
    assert r.counterexample["hull1"] == frozenset()
    r = check_pq_urns(path3, F(3, 2), F(1, 2))
    assert not r.holds
    assert r.counterexample == {"set": frozenset({0, 1}), "delta": 1,
                                "hull1": frozenset({0, 1}), "hull2": frozenset()}
    assert recheck(path3, r)
    assert not check_urns(path3, F(3, 4)).holds
    with pytest.raises(ValueError):
        check_pq_urns(path3, 0, F(1, 2))
    with pytest.raises(ValueError):
        check_pq_urns(path3, 1, 1)


def test_pq_hulls_on_path3(path3):
    assert pq_hulls(path3, frozenset({0, 1, 2}), F(1, 2), F(1, 2)) == (2, {1}, {0, 1, 2})


def test_one_local_retract(path3):
    assert check_one_local_retract(path3, path3.universe).holds
    assert check_one_local_retract(path3, {1}).holds
    r = check_one_local_retract(path3, {0, 2})
    assert not r.holds
    assert r.counterexample["set"] == {1}
    assert set(r.counterexample["balls"]) == {(0, 1), (2, 1)}
    assert recheck(path3, r)
    with pytest.raises(ValueError):
        check_one_local_retract(path3, [])


def test_box_reports():
    r = box_structure_report(BoxSpace(Box.cube(1, -1, 1)), samples=50)
    assert r.holds and r.witnesses[0] == {"set": Box.cube(1, -1, 1), "center": (0,),
                                          "radius": 1, "delta": 2}
    A = Box((0, 0), (1, 3))
    r = box_structure_report(BoxSpace(A), samples=50)
    assert r.holds and r.witnesses[0]["center"] == (F(1, 2), F(3, 2))
    assert r.witnesses[0]["radius"] == F(3, 2) and r.params["ratio"] == F(1, 2)
    assert box_structure_report(BoxSpace(Box.point((1, 2)))).holds
    bad = box_structure_report(BoxSpace(Box.cube(2, -1, 1)), samples=5, p=F(1, 4), q=F(3, 4))
    assert not bad.holds and bad.counterexample["hull1"] is None


@settings(max_examples=80, deadline=None)
@given(metric_spaces(min_n=2, max_n=6))
def test_closest_pair_obstruction(space):
    d = space.dist
    dist = [list(r) for r in d]
    n = space.n
    m = min(d[i][j] for i in range(n) for j in range(n) if i != j)
    x, y = next((i, j) for i in range(n) for j in range(n) if i != j and d[i][j] == m)
    C = cov(space, {x, y})
    # every pair inside cov({x, y}) sits at distance m, so no point is a strict center
    assert all(d[a][b] == m for a in C for b in C if a != b)
    assert all(far(dist, z, C) == diam(dist, C) for z in C)
    assert C in brute_admissible(dist)
    assert not check_metric_ns(space).holds


@settings(max_examples=60, deadline=None)
@given(metric_spaces(min_n=2, max_n=6))
def test_reports_agree_with_brute_force(space):
    dist = [list(r) for r in space.dist]
    lat = [A for A in brute_admissible(dist) if len(A) > 1]
    ns = any(all(far(dist, z, A) >= diam(dist, A) for z in A) for A in lat)
    assert check_metric_ns(space).holds == (not ns)
    worst = max(min(far(dist, z, A) for z in A) / diam(dist, A) for A in lat)
    c, rep = uns_constant(space)
    assert c == worst
    p, q = F(1), F(1, 2)
    fails = any(not (hull(dist, A, p * diam(dist, A))
                     & hull(dist, hull(dist, A, p * diam(dist, A)), q * diam(dist, A)))
                for A in lat if hull(dist, A, p * diam(dist, A)))
    empty_h1 = any(not hull(dist, A, p * diam(dist, A)) for A in lat)
    r = check_pq_urns(space, p, q)
    assert r.holds == (not (fails or empty_h1))
    if not r.holds:
        assert recheck(space, r)
