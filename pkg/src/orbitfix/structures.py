"""Normal-structure style properties of finite spaces and of the box model.

Finite spaces with at least two points always fail these properties: if
``x, y`` is a closest pair at distance ``d``, then ``cov({x, y})`` is a
``d``-equilateral admissible set. The finite checkers are therefore exact
refuters; the positive side lives in :func:`box_structure_report`.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable

from .box_space import (Box, BoxSpace, box_ball_hull, box_delta, box_radius_from,
                        chebyshev_center)
from .finite_space import (DEFAULT_LATTICE_CAP, AdmissibleLattice, FiniteSpace, PointSet,
                           ball, ball_hull, canonical_radii, delta, enumerate_admissible,
                           radius_from, set_key, CapExceeded)
from .maps import sample_point
from .rational import RatLike, rat


@dataclass
class StructureReport:
    property: str
    holds: bool
    params: dict[str, Any] = field(default_factory=dict)
    witnesses: list[dict[str, Any]] = field(default_factory=list)
    counterexample: dict[str, Any] | None = None
    note: str = ""


def _lattice(space: FiniteSpace, lattice: AdmissibleLattice | None) -> AdmissibleLattice:
    return enumerate_admissible(space) if lattice is None else lattice


def _best_center(space: FiniteSpace, A: PointSet, candidates: Iterable[int]):
    """Minimize ``D(z, A)`` over ``candidates``, ties to the lowest index."""
    return min(((radius_from(space, z, A), z) for z in candidates))


def check_metric_ns(space: FiniteSpace,
                    lattice: AdmissibleLattice | None = None) -> StructureReport:
    """Every non-singleton admissible ``A`` has ``z ∈ A`` with ``D(z,A) < δ(A)``."""
    lat = _lattice(space, lattice)
    witnesses = []
    for A in lat.non_singletons():
        dA = delta(space, A)
        r, z = _best_center(space, A, sorted(A))
        if r < dA:
            witnesses.append({"set": A, "center": z, "radius": r, "delta": dA})
            continue
        return StructureReport(
            "ns", False,
            counterexample={"set": A, "delta": dA,
                            "radii": {a: radius_from(space, a, A) for a in sorted(A)}},
            note="finite spaces always fail: see the closest-pair obstruction")
    return StructureReport("ns", True, witnesses=witnesses)


def uns_constant(space: FiniteSpace,
                 lattice: AdmissibleLattice | None = None) -> tuple[Fraction, StructureReport]:
    """Worst ratio ``min_{x∈A} D(x,A) / δ(A)`` over non-singleton admissible sets.

    The property holds iff the returned constant is below 1.
    """
    if space.n < 2:
        raise ValueError("the uniform constant needs at least two points")
    lat = _lattice(space, lattice)
    worst = None
    witnesses = []
    for A in lat.non_singletons():
        dA = delta(space, A)
        r, z = _best_center(space, A, sorted(A))
        ratio = r / dA
        witnesses.append({"set": A, "center": z, "radius": r, "delta": dA, "ratio": ratio})
        if worst is None or ratio > worst["ratio"]:
            worst = witnesses[-1]
    c_star = worst["ratio"]
    if c_star < 1:
        return c_star, StructureReport("uns", True, {"c_star": c_star}, witnesses)
    ce = {"set": worst["set"], "delta": worst["delta"],
          "radii": {a: radius_from(space, a, worst["set"]) for a in sorted(worst["set"])}}
    return c_star, StructureReport("uns", False, {"c_star": c_star}, counterexample=ce)


def pq_hulls(space: FiniteSpace, A: PointSet, p: Fraction, q: Fraction):
    """``H1 = B[A, pδ]``, ``H2 = B[H1, qδ]`` (empty H1 gives empty H2 here)."""
    dA = delta(space, A)
    h1 = ball_hull(space, A, p * dA)
    h2 = ball_hull(space, h1, q * dA) if h1 else frozenset()
    return dA, h1, h2


def _pq_params(p: RatLike, q: RatLike) -> tuple[Fraction, Fraction]:
    p, q = rat(p), rat(q)
    if p <= 0:
        raise ValueError("p must be positive")
    if not (0 < q < 1):
        raise ValueError("q must lie in (0, 1)")
    return p, q


def check_pq_urns(space: FiniteSpace, p: RatLike, q: RatLike,
                  lattice: AdmissibleLattice | None = None,
                  prop: str = "pq-urns") -> StructureReport:
    p, q = _pq_params(p, q)
    lat = _lattice(space, lattice)
    witnesses = []
    for A in lat.non_singletons():
        dA, h1, h2 = pq_hulls(space, A, p, q)
        both = h1 & h2
        if both:
            witnesses.append({"set": A, "delta": dA, "z": min(both)})
            continue
        return StructureReport(prop, False, {"p": p, "q": q},
                               counterexample={"set": A, "delta": dA, "hull1": h1, "hull2": h2})
    return StructureReport(prop, True, {"p": p, "q": q}, witnesses)


def check_urns(space: FiniteSpace, c: RatLike,
               lattice: AdmissibleLattice | None = None) -> StructureReport:
    c = rat(c)
    return check_pq_urns(space, c, c, lattice, prop="urns")


def check_one_local_retract(space: FiniteSpace, D: Iterable[int],
                            cap: int = DEFAULT_LATTICE_CAP) -> StructureReport:
    """Every nonempty intersection of balls centerd in ``D`` must meet ``D``."""
    D = space.pointset(D)
    if not D:
        raise ValueError("D must be nonempty")
    prov: dict[PointSet, tuple] = {}
    for x in sorted(D):
        for r in canonical_radii(space):
            B = ball(space, x, r)
            prov.setdefault(B, ((x, r),))
    frontier = list(prov)
    while frontier:
        fresh = []
        for a in frontier:
            for b in list(prov):
                c = a & b
                if c and c not in prov:
                    prov[c] = tuple(sorted(set(prov[a]) | set(prov[b])))
                    fresh.append(c)
                    if len(prov) > cap:
                        raise CapExceeded("one-local-retract closure", cap)
        frontier = fresh
    for S in sorted(prov, key=set_key):
        if not (S & D):
            return StructureReport("olr", False, {"D": D},
                                   counterexample={"set": S, "balls": list(prov[S])})
    return StructureReport("olr", True, {"D": D},
                           note=f"{len(prov)} intersections, all meet D")


def recheck(space: FiniteSpace, report: StructureReport) -> bool:
    """Re-validate a failing report's counterexample against the raw definition."""
    ce = report.counterexample
    if report.holds or ce is None:
        return False
    A = frozenset(ce.get("set", ()))
    if report.property == "olr":
        D = frozenset(report.params["D"])
        if A & D or not A:
            return False
        return all(space.dist[x][z] <= r for (x, r) in ce["balls"] for z in A) and all(
            any(space.dist[x][z] > r for (x, r) in ce["balls"]) for z in space.points if z not in A)
    if len(A) < 2:
        return False
    dA = max(space.dist[a][b] for a in A for b in A)
    if report.property in ("ns", "uns"):
        return all(max(space.dist[z][a] for a in A) >= dA for z in A)
    if report.property in ("pq-urns", "urns"):
        p, q = report.params["p"], report.params["q"]
        h1 = [y for y in space.points if all(space.dist[y][a] <= p * dA for a in A)]
        return not any(all(space.dist[u][y] <= q * dA for y in h1) for u in h1)
    return False


def _sample_subbox(rng: random.Random, amb: Box) -> Box:
    a, b = sample_point(rng, amb, 64), sample_point(rng, amb, 64)
    lo, hi = list(map(min, a, b)), list(map(max, a, b))
    if rng.random() < 0.25:
        j = rng.randrange(amb.dim)
        lo[j] = hi[j] = (lo[j] + hi[j]) / 2
    return Box(tuple(lo), tuple(hi))


def box_structure_report(bspace: BoxSpace, samples: int = 200, seed: int = 0,
                         subboxes: int = 20, p: RatLike = Fraction(3, 4),
                         q: RatLike | None = None) -> StructureReport:
    """Closed-form uniform structure of the box model, spot-checked by sampling.

    The midpoint of any box is at distance exactly half the diameter from the
    box, so the uniform property holds with any constant in (1/2, 1). The
    sampling validates that formula on random sub-boxes (some with a
    degenerate side) and tests the two-hull condition at ``(p, q)``; a
    sampled failure of the latter is returned as a counterexample.
    """
    p = rat(p)
    q = p if q is None else rat(q)
    amb = bspace.ambient
    params = {"ratio": Fraction(1, 2), "c_range": (Fraction(1, 2), Fraction(1)), "p": p, "q": q}
    if amb.is_point:
        return StructureReport("box", True, params, note="degenerate ambient: vacuous")
    rng = random.Random(seed)
    boxes = [amb] + [_sample_subbox(rng, amb) for _ in range(subboxes)]
    witnesses = []
    for A in boxes:
        dA = box_delta(A)
        if dA == 0:
            continue
        z = chebyshev_center(A)
        D = box_radius_from(z, A)
        if D != dA / 2:
            raise AssertionError(f"center formula broken on {A}")
        for _ in range(samples):
            y = sample_point(rng, amb, 128)
            if box_radius_from(y, A) < dA / 2:
                raise AssertionError(f"{y} beats the center on {A}")
        h1 = box_ball_hull(A, p * dA, amb)
        h2 = box_ball_hull(h1, q * dA, amb) if h1 is not None else None
        if h1 is None or h2 is None or h1.intersect(h2) is None:
            return StructureReport("box", False, params,
                                   counterexample={"set": A, "delta": dA, "hull1": h1, "hull2": h2},
                                   note="two-hull condition fails on a sampled box")
        witnesses.append({"set": A, "center": z, "radius": D, "delta": dA})
    return StructureReport("box", True, params, witnesses,
                           note="uniform constant: any c in (1/2, 1); two-hull condition "
                                f"not refuted on {len(witnesses)} sampled boxes")
