import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orbitfix.box_space import Box, BoxSpace, box_delta
from orbitfix.engine import (CONTRACT, ENCLOSED, EXACT, CommonFixedPoint, EpsilonFixedPoint,
                             PreconditionError, Stall, cov_F, invariant_descend, ns_shrink_step,
                             phi, pq_shrink_step, solve_fixed_point, verify_certificate)
from orbitfix.finite_space import radius_from
from orbitfix.generators import gen_box, gen_named, generated_group, rotation
from orbitfix.maps import BoxMap, MapFamily, MapTable, clip, fixed_set, var
from strategies import spaces_with_map
from tamper import outcome_tamperings, step_tamperings

TO1 = MapTable((1, 1, 1))
I1 = BoxSpace(Box.cube(1, -1, 1))
THIRD = BoxMap((var(0) / 3,))


def test_descend_examples(path3):
    assert invariant_descend(path3, [MapTable.identity(3)], path3.universe) == path3.universe
    assert invariant_descend(path3, [TO1], path3.universe) == {1}
    A = invariant_descend(I1, [THIRD], I1.ambient, tol=F(1, 1000))
    n = round(math.log(2 / box_delta(A), 3))
    assert A == Box((-F(1, 3 ** n),), (F(1, 3 ** n),)) and box_delta(A) <= F(1, 500)


def test_descend_needs_an_invariant_start(path3):
    with pytest.raises(PreconditionError) as info:
        invariant_descend(path3, [MapTable((2, 2, 2))], frozenset({0, 1}))
    assert info.value.witness == {"map": 0, "point": 0, "image": 2}
    with pytest.raises(PreconditionError):
        invariant_descend(I1, [BoxMap((var(0) / 2 + F(1, 2),))], Box.cube(1, -1, 0))


def test_cov_F_examples(path3):
    assert cov_F(path3, [TO1], frozenset({0, 1})) == (frozenset({0, 1}), True)
    assert cov_F(path3, [TO1], frozenset({0})) == (frozenset({0, 1}), True)
    box, minimal = cov_F(I1, [THIRD], Box.point((1,)))
    assert minimal and box == Box((F(0),), (F(1),))


def test_ns_shrink_examples(equilateral3):
    res = ns_shrink_step(I1, [THIRD], I1.ambient)
    assert res.ok and res.new == Box.point((0,)) and res.radius == 1
    space = BoxSpace(Box((0, 0), (1, 3)))
    res = ns_shrink_step(space, [BoxMap((var(0), var(1)))], space.ambient)
    # per coordinate [hi - 3/2, lo + 3/2] clipped to A
    assert res.base == Box((0, F(3, 2)), (1, F(3, 2)))
    assert res.new == res.base and box_delta(res.new) <= F(3, 2)
    assert res.certification == ENCLOSED
    res = ns_shrink_step(equilateral3, [rotation(3)], equilateral3.universe)
    assert res.stall.reason == "ns_violation" and res.radius == 1
    assert res.stall.witness["set"] == {0, 1, 2}


def test_ns_shrink_on_a_finite_space(path3):
    res = ns_shrink_step(path3, [TO1], path3.universe)
    assert res.center == 1 and res.radius == 1
    assert res.base == {1} and res.new == {1} and res.certification == EXACT


def test_pq_shrink_examples(path3):
    res = pq_shrink_step(I1, [THIRD], I1.ambient, F(1, 2), F(1, 2))
    assert res.ok and res.base == Box.point((0,)) and res.new == Box.point((0,))
    assert res.cond1 and res.cond2
    U = BoxSpace(Box.cube(1, 0, 1))
    towards_half = BoxMap(((var(0) + F(1, 2)) / 2,))
    res = pq_shrink_step(U, [towards_half], U.ambient, F(3, 4), F(3, 4))
    assert res.base == Box((F(1, 4),), (F(3, 4),))
    assert res.ok and res.cond1 and res.cond2 and box_delta(res.new) <= F(3, 4)
    for p, q in [(F(1, 2), F(1, 2)), (F(3, 2), F(1, 2)), (F(19, 10), F(9, 10))]:
        res = pq_shrink_step(path3, [TO1], frozenset({0, 1}), p, q)
        assert res.stall.reason == "pq_urns_violation"
        w = res.stall.witness
        assert w["hull1"] is None or w["hull2"] is None or not (w["hull1"] & w["hull2"])


def test_solve_path3(path3):
    cert = solve_fixed_point(path3, [TO1])
    assert cert.outcome == CommonFixedPoint(1)
    assert cert.shrink_rounds == 0
    assert cert.fix_set == {1} and cert.one_local_retract.holds
    assert verify_certificate(path3, [TO1], cert)


def test_solve_identity_family_shrinks_to_the_center(path3):
    fam = [MapTable.identity(3)]
    cert = solve_fixed_point(path3, fam)
    assert cert.fix_set == path3.universe
    assert cert.one_local_retract.holds
    # M ∩ B[M, 1] = {1}, reached by one ns step
    assert cert.outcome == CommonFixedPoint(1) and cert.shrink_rounds == 1
    assert verify_certificate(path3, fam, cert)


def test_solve_third_on_the_interval():
    eps = F(1, 1000)
    cert = solve_fixed_point(I1, [THIRD], eps=eps)
    out = cert.outcome
    assert isinstance(out, EpsilonFixedPoint)
    x = out.point[0]
    assert out.residual == abs(x - x / 3) <= 2 * abs(x) / 3 <= eps
    assert out.radius <= eps / 2
    assert verify_certificate(I1, [THIRD], cert)


def test_rotation_group_stalls(equilateral3):
    fam = generated_group([rotation(3)])
    cert = solve_fixed_point(equilateral3, fam)
    assert cert.outcome.reason == "ns_violation"
    assert cert.outcome.witness["set"] == equilateral3.universe
    assert cert.fix_set == frozenset() and cert.one_local_retract is None
    assert verify_certificate(equilateral3, fam, cert)


def test_hypothesis_failures_stall(path3):
    # sends the closest pair apart: not orbit-nonexpansive
    fam = [MapTable((0, 2, 0))]
    cert = solve_fixed_point(path3, fam)
    assert cert.outcome.reason == "not_orbit_nonexpansive"
    assert verify_certificate(path3, fam, cert)
    fam = [MapTable.constant(3, 0), MapTable.constant(3, 2)]
    cert = solve_fixed_point(path3, fam)
    assert cert.outcome.reason == "not_interlaced"
    assert verify_certificate(path3, fam, cert)


def test_box_contract_refuted():
    fam = [BoxMap((clip(4 * var(0), -1, 1),))]
    cert = solve_fixed_point(I1, fam, samples=200)
    assert cert.outcome.reason == "contract_refuted"
    assert verify_certificate(I1, fam, cert)


def test_solver_preconditions(path3):
    with pytest.raises(PreconditionError):
        solve_fixed_point(I1, [BoxMap((var(0) + 1,))])
    with pytest.raises(PreconditionError):
        solve_fixed_point(path3, [MapTable((0, 1))])
    with pytest.raises(ValueError):
        solve_fixed_point(I1, [THIRD], method="pq")
    with pytest.raises(ValueError):
        solve_fixed_point(I1, [THIRD], eps=0)
    with pytest.raises(ValueError):
        solve_fixed_point(I1, [THIRD], method="pq", p=1, q=1)


def test_budget_stall():
    b = gen_box("contraction", k=1, ratio=F(9, 10), shift=[F(1, 20)])
    cert = solve_fixed_point(b.space, b.maps, budget=3)
    assert cert.outcome.reason == "budget"
    assert verify_certificate(b.space, b.maps, cert)


def test_tampering_is_detected(path3):
    cert = solve_fixed_point(path3, [TO1])
    for i, name, bad in step_tamperings(cert):
        assert not verify_certificate(path3, [TO1], bad), (i, name)
    for name, bad in outcome_tamperings(cert):
        assert not verify_certificate(path3, [TO1], bad), name
    bad = solve_fixed_point(path3, [TO1])
    bad.trace[1].delta = F(5)
    res = verify_certificate(path3, [TO1], bad)
    assert not res and res.step == 1


@pytest.mark.parametrize("method", ["ns", "pq"])
def test_box_certificates_re_verify(method):
    b = gen_box("contraction", k=2, ratio=F(9, 10))
    kw = {"p": F(3, 4), "q": F(3, 4)} if method == "pq" else {}
    cert = solve_fixed_point(b.space, b.maps, method=method, **kw)
    assert verify_certificate(b.space, b.maps, cert)
    x = cert.outcome.point
    assert cert.outcome.residual == max(abs(a - c) for a, c in zip(x, b.maps[0](x)))
    for i, name, bad in step_tamperings(cert):
        assert not verify_certificate(b.space, b.maps, bad), (i, name)


def _trace_laws(space, cert):
    for prev, s in zip(cert.trace, cert.trace[1:]):
        assert s.set <= prev.set and s.delta <= prev.delta
        if s.kind == "pq":
            assert s.delta <= s.q * prev.delta and s.cond1 and s.cond2
        if s.kind == "ns" and isinstance(space, BoxSpace):
            assert s.delta <= prev.delta / 2
    if isinstance(cert.outcome, EpsilonFixedPoint):
        last = cert.trace[-1]
        assert cert.outcome.residual <= 2 * cert.outcome.radius + 2 * last.delta


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 3), st.sampled_from([F(1, 3), F(1, 2), F(9, 10)]),
       st.lists(st.sampled_from([F(0), F(1, 20), F(-1, 10)]), min_size=3, max_size=3),
       st.sampled_from(["ns", "pq"]))
def test_contraction_runs(k, ratio, shift, method):
    b = gen_box("contraction", k=k, ratio=ratio, shift=shift[:k])
    kw = {"p": F(3, 4), "q": F(3, 4)} if method == "pq" else {}
    eps = F(1, 1000)
    cert = solve_fixed_point(b.space, b.maps, method=method, eps=eps, **kw)
    assert isinstance(cert.outcome, EpsilonFixedPoint)
    fp = b.expected["fixed_point"]
    assert max(abs(a - c) for a, c in zip(cert.outcome.point, fp)) <= eps / 2
    _trace_laws(b.space, cert)
    if method == "ns":
        assert cert.shrink_rounds <= math.ceil(math.log2(box_delta(b.space.ambient) / eps))
    assert verify_certificate(b.space, b.maps, cert)


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 3), st.integers(0, 50))
def test_tropical_runs_are_explained(k, seed):
    b = gen_box("tropical", k=k, seed=seed)
    for method, kw in (("ns", {}), ("pq", {"p": F(3, 4), "q": F(3, 4)})):
        cert = solve_fixed_point(b.space, b.maps, method=method, **kw)
        assert verify_certificate(b.space, b.maps, cert)
        _trace_laws(b.space, cert)
        if isinstance(cert.outcome, Stall):
            assert cert.outcome.reason in ("descent_stagnated", "shrink_check_failed",
                                           "contract_refuted")


@settings(max_examples=150, deadline=None)
@given(spaces_with_map(max_n=6))
def test_finite_runs_are_explained(sm):
    space, T = sm
    cert = solve_fixed_point(space, [T])
    assert verify_certificate(space, [T], cert)
    _trace_laws(space, cert)
    out = cert.outcome
    if isinstance(out, CommonFixedPoint):
        assert T(out.point) == out.point and out.point in cert.fix_set
        # a fixed point never moves anything farther away
        assert all(space.dist[T(x)][out.point] <= space.dist[x][out.point] for x in space.points)
    else:
        assert out.reason in ("ns_violation", "not_orbit_nonexpansive", "not_interlaced")
        if out.reason == "ns_violation":
            A = out.witness["set"]
            dA = max(space.dist[a][b] for a in A for b in A)
            assert all(radius_from(space, z, A) == dA for z in A)
    assert cert.fix_set == fixed_set([T])


def test_pq_on_a_finite_space(path3):
    cert = solve_fixed_point(path3, [TO1], method="pq", p=F(3, 4), q=F(3, 4))
    assert cert.outcome == CommonFixedPoint(1)
    assert verify_certificate(path3, [TO1], cert)


def test_descent_image_helper(path3):
    assert phi(path3, MapFamily((TO1,)), path3.universe) == {1}
    assert phi(I1, MapFamily((THIRD,)), I1.ambient) == Box((F(-1, 3),), (F(1, 3),))
