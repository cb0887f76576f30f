"""Common fixed points by shrinking invariant admissible sets.

The solver alternates two moves on an invariant admissible set ``A``:

* descend: ``A <- cov(⋃_T T(A))`` (exact on finite spaces, interval
  enclosures on boxes), which never leaves an invariant set;
* shrink: one of two set-shrinking constructions --

  - ``ns``: with ``z`` the best center of ``A`` and ``r = D(z, A) < δ(A)``,
    replace ``A`` by ``A ∩ B[A, r]``;
  - ``pq``: replace ``A`` by ``cov_F(B[A, pδ] ∩ B[B[A, pδ], qδ])``, which must
    lie in ``B[A, pδ]`` and have diameter at most ``qδ``.

Both constructions are invariant when ``A`` is a fixpoint of the descent map;
every accepted step is re-checked and recorded in the certificate trace.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Union

from .box_space import (Box, BoxSpace, box_ball_hull, box_cov, box_delta, box_radius_from,
                        chebyshev_center, dist_inf)
from .finite_space import FiniteSpace, PointSet, ball_hull, cov, delta, radius_from
from .maps import (MapFamily, MapTable, as_family, check_interlaced, check_orbit_nonexpansive,
                   falsify_box_interlaced, family_image, fixed_set, invariant_hull,
                   is_post_fixpoint, is_self_map, orbit_sequence)
from .rational import RatLike, rat
from .structures import StructureReport, check_one_local_retract

Space = Union[FiniteSpace, BoxSpace]
AnySet = Union[PointSet, Box]

EXACT = "exact"
ENCLOSED = "enclosure-certified"
CONTRACT = "contract-dependent"

DEFAULT_EPS = Fraction(1, 1000)
DEFAULT_BUDGET = 10_000
# forced descent steps tolerated before a run is declared stagnant
FORCED_CAP = 400
MONITOR_CORNERS = 64


class PreconditionError(ValueError):
    def __init__(self, message: str, witness: dict | None = None):
        super().__init__(message)
        self.witness = witness or {}


@dataclass
class Step:
    index: int
    kind: str
    set: Any
    delta: Fraction
    certification: str
    nested: bool = True
    center: Any = None
    radius: Fraction | None = None
    base: Any = None
    p: Fraction | None = None
    q: Fraction | None = None
    cond1: bool | None = None
    cond2: bool | None = None


@dataclass
class CommonFixedPoint:
    point: Any
    kind: str = "common_fixed_point"


@dataclass
class EpsilonFixedPoint:
    point: Any
    radius: Fraction
    residual: Fraction
    kind: str = "epsilon_fixed_point"


@dataclass
class Stall:
    reason: str
    witness: dict[str, Any] = field(default_factory=dict)
    kind: str = "stall"


Outcome = Union[CommonFixedPoint, EpsilonFixedPoint, Stall]


@dataclass
class Certificate:
    model: str
    method: str
    outcome: Outcome
    trace: list[Step]
    eps: Fraction
    budget: int
    p: Fraction | None = None
    q: Fraction | None = None
    fix_set: PointSet | None = None
    one_local_retract: StructureReport | None = None
    notes: list[dict[str, Any]] = field(default_factory=list)

    @property
    def shrink_rounds(self) -> int:
        return sum(1 for s in self.trace if s.kind in ("ns", "pq"))

    @property
    def succeeded(self) -> bool:
        return not isinstance(self.outcome, Stall)


# -- shared set algebra -------------------------------------------------------


def _is_finite(space: Space) -> bool:
    return isinstance(space, FiniteSpace)


def set_delta(space: Space, A: AnySet) -> Fraction:
    return delta(space, A) if _is_finite(space) else box_delta(A)


def subset(A: AnySet, B: AnySet) -> bool:
    return A <= B


def intersect(A: AnySet, B: AnySet) -> AnySet | None:
    if isinstance(A, Box):
        return A.intersect(B)
    return (A & B) or None


def hull_of(space: Space, A: AnySet, r: Fraction) -> AnySet | None:
    """``B[A, r]`` inside the whole space; None when empty."""
    if _is_finite(space):
        return ball_hull(space, A, r) or None
    return box_ball_hull(A, r, space.ambient)


def image_escape(space: Space, fam: MapFamily, A: AnySet):
    """First ``(map index, point)`` of ``A`` whose exact image leaves ``A``.

    Finite sets are scanned completely. For boxes the center and up to
    ``MONITOR_CORNERS`` corners are evaluated, which can refute invariance but
    never prove it.
    """
    if _is_finite(space):
        for a in sorted(A):
            for i, T in enumerate(fam):
                if T(a) not in A:
                    return i, a, T(a)
        return None
    pts = [chebyshev_center(A)] + list(itertools.islice(A.corners(), MONITOR_CORNERS))
    for x in pts:
        for i, T in enumerate(fam):
            y = T(x)
            if not A.contains(y):
                return i, x, y
    return None


def certification_of(space: Space, fam: MapFamily, A: AnySet) -> str:
    if _is_finite(space):
        return EXACT if image_escape(space, fam, A) is None else CONTRACT
    return ENCLOSED if is_post_fixpoint(fam, A, space.ambient) else CONTRACT


# -- the four operations ------------------------------------------------------


def phi(space: Space, family, A: AnySet) -> AnySet | None:
    """One descent step ``cov(⋃ T(A))``, kept inside ``A``; None if that is empty."""
    fam = as_family(family)
    if _is_finite(space):
        img = frozenset().union(*(T.image(A) for T in fam))
        return intersect(cov(space, img), A)
    return family_image(fam, A).intersect(A)


def _check_invariant_start(space: Space, fam: MapFamily, start: AnySet) -> None:
    if _is_finite(space):
        esc = image_escape(space, fam, start)
        if esc is not None:
            i, a, b = esc
            raise PreconditionError("start set is not invariant",
                                    {"map": i, "point": a, "image": b})
    else:
        for i, T in enumerate(fam):
            img = T.image(start)
            if not img.issubset(start):
                raise PreconditionError("enclosure of the image leaves the start box",
                                        {"map": i, "image": img})


def invariant_descend(space: Space, family, start: AnySet, tol: RatLike = 0,
                      budget: int = DEFAULT_BUDGET) -> AnySet:
    """Iterate the descent map from an invariant set.

    Finite spaces: runs to the exact fixpoint. Boxes: stops at an exact
    fixpoint, when no endpoint moves more than ``tol``, or after ``budget``
    steps.
    """
    fam = as_family(family)
    if not _is_finite(space):
        start = start if isinstance(start, Box) else box_cov([start])
    _check_invariant_start(space, fam, start)
    tol = rat(tol)
    A = start
    for _ in range(budget):
        B = phi(space, fam, A)
        if B is None or B == A:
            return A
        if not _is_finite(space):
            move = max(max(abs(a - b) for a, b in zip(A.lo, B.lo)),
                       max(abs(a - b) for a, b in zip(A.hi, B.hi)))
            if move <= tol:
                return B
        A = B
    return A


def cov_F(space: Space, family, E, budget: int = 512) -> tuple[AnySet, bool]:
    """Least admissible superset of ``E`` invariant under every map.

    Returns ``(set, minimal)``. Exact on finite spaces. On boxes the result is
    the certified invariant hull, or the ambient box with ``minimal=False``
    once the budget runs out.
    """
    fam = as_family(family)
    if _is_finite(space):
        A = cov(space, E)
        while True:
            img = frozenset().union(*(T.image(A) for T in fam))
            B = cov(space, A | img)
            if B == A:
                return A, True
            A = B
    E = E if isinstance(E, Box) else box_cov(E)
    return invariant_hull(fam, E, space.ambient, budget)


@dataclass
class ShrinkResult:
    new: AnySet | None
    base: AnySet | None
    certification: str | None = None
    center: Any = None
    radius: Fraction | None = None
    cond1: bool | None = None
    cond2: bool | None = None
    stall: Stall | None = None

    @property
    def ok(self) -> bool:
        return self.stall is None and self.new is not None


def _finish_shrink(space: Space, fam: MapFamily, res: ShrinkResult, container: AnySet,
                   cov_budget: int) -> ShrinkResult:
    """Close ``res.base`` under the family and classify the evidence."""
    if _is_finite(space):
        res.new, _ = cov_F(space, fam, res.base)
        res.certification = EXACT
        return res
    hull, ok = invariant_hull(fam, res.base, container, cov_budget)
    if ok:
        res.new, res.certification = hull, ENCLOSED
        return res
    # invariance rests on the hypotheses alone; the solver decides whether to use it
    res.new, res.certification = res.base, CONTRACT
    return res


def ns_shrink_step(space: Space, family, A: AnySet, container: AnySet | None = None,
                   cov_budget: int = 512) -> ShrinkResult:
    """Shrink ``A`` to ``A ∩ B[A, r]`` around its best center.

    On finite spaces the center minimizes ``D(z, A)`` over ``z ∈ A`` (ties to the
    lowest index) and the step stalls when ``r = δ(A)``. On boxes the center is
    the midpoint, ``r = δ/2``, and the set is closed under the enclosures.
    """
    fam = as_family(family)
    dA = set_delta(space, A)
    if _is_finite(space):
        r, z = min((radius_from(space, x, A), x) for x in sorted(A))
        if r >= dA:
            return ShrinkResult(None, None, center=z, radius=r, stall=Stall(
                "ns_violation", {"set": A, "delta": dA,
                                 "radii": {x: radius_from(space, x, A) for x in sorted(A)}}))
        base = A & ball_hull(space, A, r)
        res = ShrinkResult(None, base, center=z, radius=r)
        res = _finish_shrink(space, fam, res, A, cov_budget)
        if res.new != base:
            # the argument says A ∩ B[A, r] is already invariant
            esc = image_escape(space, fam, base)
            res.stall = Stall("contract_broken", {"set": base, "map": esc[0], "point": esc[1],
                                                  "image": esc[2]})
        return res
    z = chebyshev_center(A)
    r = box_radius_from(z, A)
    base = A.intersect(box_ball_hull(A, r, space.ambient))
    res = ShrinkResult(None, base, center=z, radius=r)
    return _finish_shrink(space, fam, res, A if container is None else container, cov_budget)


def pq_shrink_step(space: Space, family, A: AnySet, p: RatLike, q: RatLike,
                   cov_budget: int = 512) -> ShrinkResult:
    """Replace ``A`` by the invariant cover of ``B[A,pδ] ∩ B[B[A,pδ], qδ]``.

    The cover is intersected with ``A`` when that stays nonempty and
    invariant. Conditions ``A' ⊆ B[A, pδ]`` and ``δ(A') <= qδ`` are recorded.
    """
    fam = as_family(family)
    p, q = rat(p), rat(q)
    dA = set_delta(space, A)
    h1 = hull_of(space, A, p * dA)
    if h1 is None:
        return ShrinkResult(None, None, stall=Stall(
            "pq_urns_violation", {"set": A, "delta": dA, "hull1": None, "hull2": None}))
    h2 = hull_of(space, h1, q * dA)
    base = intersect(h1, h2) if h2 is not None else None
    if base is None:
        return ShrinkResult(None, None, stall=Stall(
            "pq_urns_violation", {"set": A, "delta": dA, "hull1": h1, "hull2": h2}))
    container = space.universe if _is_finite(space) else space.ambient
    res = _finish_shrink(space, fam, ShrinkResult(None, base), container, cov_budget)
    if res.stall is not None:
        return res
    inner = intersect(res.new, A)
    if inner is not None and certification_of(space, fam, inner) != CONTRACT:
        res.new = inner
    res.cond1 = subset(res.new, h1)
    res.cond2 = set_delta(space, res.new) <= q * dA
    return res


# -- the solver ---------------------------------------------------------------


def _hypotheses_finite(space: FiniteSpace, fam: MapFamily) -> Stall | None:
    for i, T in enumerate(fam):
        v = check_orbit_nonexpansive(space, T)
        if not v.holds:
            return Stall("not_orbit_nonexpansive", dict(v.witness, map=i))
    v = check_interlaced(space, fam)
    if not v.holds:
        return Stall("not_interlaced", dict(v.witness))
    return None


def _delta_limit(deltas: list[Fraction]) -> Fraction | None:
    """Lower estimate of where a decreasing diameter sequence is heading.

    Both consecutive and every-other differences are tried (the descent often
    moves one endpoint per step); a sequence that is not visibly geometric
    gives None so the caller keeps iterating.
    """
    guesses = []
    for lag in (1, 2):
        if len(deltas) < 4 * lag + 1:
            continue
        e = deltas[-1 - 4 * lag::lag]
        d = [b - a for a, b in zip(e, e[1:])]
        if all(x < 0 for x in d):
            ratios = [b / a for a, b in zip(d, d[1:])]
            r = max(ratios)
            if r < 1 and max(ratios) - min(ratios) <= r / 8:
                guesses.append(e[-1] + d[-1] * r / (1 - r))
    return min(guesses) if guesses else None


def solve_fixed_point(space: Space, family, method: str = "ns", p: RatLike | None = None,
                      q: RatLike | None = None, eps: RatLike = DEFAULT_EPS,
                      budget: int = DEFAULT_BUDGET, samples: int = 64, seed: int = 0,
                      cov_budget: int = 512) -> Certificate:
    """Search for a common fixed point and return a checkable certificate.

    Finite spaces run exactly until a singleton (a common fixed point) or a
    stall. Boxes run until ``δ(A) <= eps`` and return the midpoint with its
    exact residual ``max_T d(x, Tx)``.
    """
    fam = as_family(family)
    if method not in ("ns", "pq"):
        raise ValueError(f"unknown method {method!r}")
    if method == "pq":
        if p is None or q is None:
            raise ValueError("method pq needs p and q")
        p, q = rat(p), rat(q)
        if p <= 0 or not (0 < q < 1):
            raise ValueError("need p > 0 and 0 < q < 1")
    else:
        p = q = None
    eps = rat(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    finite = _is_finite(space)
    cert = Certificate("finite" if finite else "box", method, Stall("budget"), [], eps, budget, p, q)

    if finite:
        for T in fam:
            if not isinstance(T, MapTable) or T.n != space.n:
                raise PreconditionError("family does not act on this finite space")
        A: AnySet = space.universe
    else:
        for i, T in enumerate(fam):
            if not is_self_map(space, T):
                raise PreconditionError("map is not an enclosure-verified self-map",
                                        {"map": i, "image": T.image(space.ambient)})
        A = space.ambient
    cert.trace.append(Step(0, "start", A, set_delta(space, A), EXACT if finite else ENCLOSED))

    stall = _hypotheses_finite(space, fam) if finite else None
    if stall is None and not finite:
        v = falsify_box_interlaced(space, fam, samples=samples, seed=seed)
        if v.holds is False:
            stall = Stall("contract_refuted", dict(v.witness))
    if stall is not None:
        cert.outcome = stall
        return _finish(space, fam, cert)

    factor = Fraction(1, 2) if method == "ns" else q
    force_below: Fraction | None = None
    forced: list[Fraction] = []

    def push(kind: str, B: AnySet, cert_flag: str, res: ShrinkResult | None = None):
        prev = cert.trace[-1]
        step = Step(len(cert.trace), kind, B, set_delta(space, B), cert_flag,
                    nested=subset(B, prev.set))
        if res is not None:
            step.center, step.radius, step.base = res.center, res.radius, res.base
            if kind == "pq":
                step.p, step.q, step.cond1, step.cond2 = p, q, res.cond1, res.cond2
        cert.trace.append(step)

    while len(cert.trace) <= budget:
        cur = cert.trace[-1]
        A, dA = cur.set, cur.delta
        if finite and len(A) == 1:
            (x,) = A
            cert.outcome = CommonFixedPoint(x)
            return _finish(space, fam, cert)
        if not finite and dA <= eps:
            x = chebyshev_center(A)
            residual = max(dist_inf(x, T(x)) for T in fam)
            if cur.certification == CONTRACT and residual > dA:
                i = max(range(len(fam)), key=lambda i: dist_inf(x, fam[i](x)))
                cert.outcome = Stall("contract_broken", {"set": A, "map": i, "point": x,
                                                         "image": fam[i](x)})
            else:
                cert.outcome = EpsilonFixedPoint(x, dA / 2, residual)
            return _finish(space, fam, cert)

        B = phi(space, fam, A)
        if B is None:
            cert.outcome = Stall("contract_broken", {"set": A, "reason": "descent image empty"})
            return _finish(space, fam, cert)
        at_fixpoint = B == A
        if not at_fixpoint:
            push("descend", B, certification_of(space, fam, B)
                 if cur.certification == CONTRACT else cur.certification)
            if finite:
                continue
            slow = set_delta(space, B) > factor * dA
            if force_below is not None:
                forced.append(set_delta(space, B))
                if forced[-1] > force_below:
                    limit = _delta_limit(forced)
                    if (limit is not None and limit >= force_below) or len(forced) >= FORCED_CAP:
                        cert.outcome = Stall("descent_stagnated", dict(
                            cert.notes[-1], limit=limit, steps=len(forced)))
                        return _finish(space, fam, cert)
                    continue
                force_below = None
            if not slow:
                continue
            A, dA = B, set_delta(space, B)
            if dA <= eps:
                continue

        container = A if cert.trace[-1].certification != CONTRACT or finite else space.ambient
        if method == "ns":
            res = ns_shrink_step(space, fam, A, container, cov_budget)
        else:
            res = pq_shrink_step(space, fam, A, p, q, cov_budget)
        if res.stall is not None:
            cert.outcome = res.stall
            return _finish(space, fam, cert)
        if res.certification == CONTRACT:
            esc = image_escape(space, fam, res.new)
            if at_fixpoint and esc is not None:
                # at a descent fixpoint the hypotheses force invariance
                cert.outcome = Stall("contract_broken", {"set": res.new, "map": esc[0],
                                                         "point": esc[1], "image": esc[2]})
                return _finish(space, fam, cert)
            verified = not finite and at_fixpoint
        else:
            verified = True
        if method == "ns":
            good = verified and set_delta(space, res.new) <= res.radius
        else:
            good = verified and bool(res.cond1 and res.cond2)
        if not good:
            note = {"at_step": len(cert.trace) - 1, "method": method, "candidate": res.new,
                    "delta": set_delta(space, res.new), "target": factor * dA,
                    "cond1": res.cond1, "cond2": res.cond2, "fixpoint": at_fixpoint,
                    "certification": res.certification}
            if at_fixpoint:
                cert.outcome = Stall("shrink_check_failed", note)
                return _finish(space, fam, cert)
            cert.notes.append(dict(note, action="rejected; descending further"))
            force_below, forced = factor * dA, []
            continue
        push(method, res.new, res.certification, res)

    cert.outcome = Stall("budget", {"steps": len(cert.trace) - 1})
    return _finish(space, fam, cert)


def _finish(space: Space, fam: MapFamily, cert: Certificate) -> Certificate:
    if _is_finite(space):
        fix = fixed_set(fam)
        cert.fix_set = fix
        if fix:
            cert.one_local_retract = check_one_local_retract(space, fix)
    return cert


# -- independent re-checking --------------------------------------------------


@dataclass
class VerifyResult:
    ok: bool
    failure: str = ""
    step: int | None = None

    def __bool__(self) -> bool:
        return self.ok


class _Reject(Exception):
    def __init__(self, failure: str, step: int | None = None):
        super().__init__(failure)
        self.failure, self.step = failure, step


def _need(cond: bool, failure: str, step: int | None = None) -> None:
    if not cond:
        raise _Reject(failure, step)


_SHRINK_FIELDS = ("center", "radius", "base")
_PQ_FIELDS = ("p", "q", "cond1", "cond2")


def _verify_step(space: Space, fam: MapFamily, cert: Certificate, i: int) -> None:
    s, prev = cert.trace[i], cert.trace[i - 1]
    finite = _is_finite(space)
    _need(s.index == i, "index out of sequence", i)
    _need(isinstance(s.set, PointSet if finite else Box), "set has the wrong type", i)
    if finite:
        _need(bool(s.set) and s.set <= space.universe, "set is not a nonempty point set", i)
    else:
        _need(s.set.dim == space.dim and s.set.issubset(space.ambient), "box leaves the ambient", i)
    _need(s.delta == set_delta(space, s.set), "recorded diameter is wrong", i)
    _need(s.nested is True and subset(s.set, prev.set), "set is not nested in its predecessor", i)
    _need(s.delta <= prev.delta, "diameter increased", i)
    if finite:
        _need(s.certification == EXACT, "finite steps must be exact", i)
        _need(image_escape(space, fam, s.set) is None, "set is not invariant", i)
    else:
        _need(s.certification == certification_of(space, fam, s.set),
              "certification flag does not match a recomputation", i)
        if s.certification == CONTRACT:
            _need(image_escape(space, fam, s.set) is None, "monitored point escapes", i)

    if s.kind == "descend":
        _need(all(getattr(s, f) is None for f in _SHRINK_FIELDS + _PQ_FIELDS),
              "descend step carries shrink data", i)
        _need(s.set == phi(space, fam, prev.set), "set is not the descent image", i)
        return
    _need(s.kind == cert.method, "step kind does not match the method", i)
    A, dA = prev.set, prev.delta
    if s.kind == "ns":
        _need(all(getattr(s, f) is None for f in _PQ_FIELDS), "ns step carries pq data", i)
        if finite:
            _need(s.center in A, "center outside the set", i)
            best = min(radius_from(space, x, A) for x in A)
            _need(s.radius == radius_from(space, s.center, A) == best, "center is not optimal", i)
            _need(s.radius < dA, "no strict center", i)
            _need(s.base == A & ball_hull(space, A, s.radius), "base is not A ∩ B[A, r]", i)
            _need(s.set == s.base, "finite ns step must keep the base", i)
        else:
            _need(s.center == chebyshev_center(A), "center is not the midpoint", i)
            _need(s.radius == dA / 2, "radius is not half the diameter", i)
            _need(s.base == A.intersect(box_ball_hull(A, s.radius, space.ambient)),
                  "base is not A ∩ B[A, r]", i)
            _need(s.base is not None and s.base.issubset(s.set), "set does not contain the base", i)
        _need(s.delta <= s.radius, "ns step did not shrink to the radius", i)
        return
    if s.kind == "pq":
        _need(all(getattr(s, f) is None for f in _SHRINK_FIELDS[:2]), "pq step carries a center", i)
        _need(s.p == cert.p and s.q == cert.q, "step parameters differ from the run's", i)
        h1 = hull_of(space, A, s.p * dA)
        h2 = hull_of(space, h1, s.q * dA) if h1 is not None else None
        base = intersect(h1, h2) if h2 is not None else None
        _need(s.base == base and base is not None, "base is not the two-hull intersection", i)
        c1, c2 = subset(s.set, h1), s.delta <= s.q * dA
        _need(s.cond1 is True and c1, "condition A' ⊆ B[A, pδ] fails", i)
        _need(s.cond2 is True and c2, "condition δ(A') <= qδ fails", i)
        return
    raise _Reject(f"unknown step kind {s.kind!r}", i)


def _verify_stall(space: Space, fam: MapFamily, cert: Certificate, stall: Stall) -> None:
    w, last = stall.witness, cert.trace[-1]
    finite = _is_finite(space)
    reason = stall.reason
    if reason == "ns_violation":
        _need(finite and w.get("set") == last.set, "witness is not the final set")
        A = last.set
        _need(len(A) >= 2 and all(radius_from(space, x, A) >= delta(space, A) for x in A),
              "ns witness has a strict center")
    elif reason == "pq_urns_violation":
        _need(w.get("set") == last.set, "witness is not the final set")
        dA = set_delta(space, last.set)
        h1 = hull_of(space, last.set, cert.p * dA)
        h2 = hull_of(space, h1, cert.q * dA) if h1 is not None else None
        _need(h1 is None or h2 is None or intersect(h1, h2) is None, "the two hulls meet")
    elif reason == "not_orbit_nonexpansive":
        _need(finite and len(cert.trace) == 1, "hypothesis stall after the start")
        T = fam[w["map"]]
        x, y = w["x"], w["y"]
        rhs = max(space.dist[x][z] for z in orbit_sequence(T, y))
        _need(space.dist[T(x)][T(y)] == w["lhs"] > rhs == w["rhs"], "orbit witness does not violate")
    elif reason == "not_interlaced":
        _need(finite and len(cert.trace) == 1, "hypothesis stall after the start")
        T, S, x, y = fam[w["T"]], fam[w["S"]], w["x"], w["y"]
        rhs = max(max(space.dist[x][z] for z in orbit_sequence(R, y)) for R in fam)
        _need(space.dist[T(x)][S(y)] == w["lhs"] > rhs == w["rhs"], "interlaced witness does not violate")
    elif reason == "contract_refuted":
        _need(not finite and len(cert.trace) == 1, "refutation stall after the start")
        x, y = tuple(w["x"]), tuple(w["y"])
        lhs = max(dist_inf(T(x), S(y)) for T in fam for S in fam)
        upper = max(box_radius_from(x, invariant_hull([R], Box.point(y), space.ambient)[0])
                    for R in fam)
        _need(lhs == w["lhs"] and lhs > upper, "refutation witness does not violate")
    elif reason == "contract_broken":
        S = w.get("set")
        if isinstance(S, (Box, frozenset)) and "point" in w:
            T = fam[w["map"]]
            _need(S is not None and (S.contains(w["point"]) if not finite else w["point"] in S),
                  "escaping point not in the set")
            y = T(tuple(w["point"]) if not finite else w["point"])
            _need(not (S.contains(y) if not finite else y in S), "reported point does not escape")
    elif reason == "budget":
        _need(len(cert.trace) - 1 >= cert.budget or w.get("steps") == len(cert.trace) - 1,
              "budget stall with budget left")
    elif reason not in ("descent_stagnated", "shrink_check_failed"):
        raise _Reject(f"unknown stall reason {reason!r}")


def verify_certificate(space: Space, family, cert: Certificate) -> VerifyResult:
    """Re-check a certificate from its recorded data.

    Every step is re-derived from its predecessor (inclusions, diameters,
    descent images, centers, hulls and the pq conditions); the outcome is
    re-evaluated exactly. Returns a false result naming the first failure.
    """
    fam = as_family(family)
    try:
        finite = _is_finite(space)
        _need(cert.model == ("finite" if finite else "box"), "model does not match the space")
        _need(cert.method in ("ns", "pq"), "unknown method")
        if cert.method == "pq":
            _need(cert.p is not None and cert.q is not None and cert.p > 0 and 0 < cert.q < 1,
                  "pq parameters out of range")
        else:
            _need(cert.p is None and cert.q is None, "ns run carries pq parameters")
        _need(bool(cert.trace), "empty trace")
        s0 = cert.trace[0]
        start = space.universe if finite else space.ambient
        _need(s0.index == 0 and s0.kind == "start" and s0.set == start, "trace does not start at the space", 0)
        _need(s0.delta == set_delta(space, start), "recorded diameter is wrong", 0)
        _need(s0.certification == (EXACT if finite else ENCLOSED) and s0.nested is True,
              "start flags are wrong", 0)
        _need(all(getattr(s0, f) is None for f in _SHRINK_FIELDS + _PQ_FIELDS),
              "start step carries shrink data", 0)
        for i in range(1, len(cert.trace)):
            _verify_step(space, fam, cert, i)
        last = cert.trace[-1]
        out = cert.outcome
        if isinstance(out, CommonFixedPoint):
            _need(finite and last.set == frozenset({out.point}), "fixed point is not the final singleton")
            _need(all(T(out.point) == out.point for T in fam), "point is not fixed by every map")
        elif isinstance(out, EpsilonFixedPoint):
            _need(not finite, "epsilon outcome on a finite space")
            x = tuple(out.point)
            _need(x == chebyshev_center(last.set), "point is not the final midpoint")
            _need(out.radius == last.delta / 2 and last.delta <= cert.eps, "final box is too large")
            residual = max(dist_inf(x, T(x)) for T in fam)
            _need(out.residual == residual, "residual differs from the exact evaluation")
            _need(residual <= 2 * out.radius + 2 * last.delta, "residual exceeds 2r + 2δ")
        elif isinstance(out, Stall):
            _verify_stall(space, fam, cert, out)
        else:
            raise _Reject("unknown outcome")
        if finite and cert.fix_set is not None:
            _need(cert.fix_set == fixed_set(fam), "fixed set differs from a full scan")
            if cert.one_local_retract is not None:
                olr = check_one_local_retract(space, cert.fix_set)
                _need(cert.one_local_retract.holds == olr.holds, "one-local-retract verdict differs")
    except _Reject as rej:
        return VerifyResult(False, rej.failure, rej.step)
    except (KeyError, TypeError, IndexError, AttributeError, ValueError) as exc:
        return VerifyResult(False, f"malformed certificate: {exc}")
    return VerifyResult(True)
