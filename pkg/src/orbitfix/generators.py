"""Reproducible instances: the discontinuous example map, named finite spaces,
and box-model maps where the fixed-point hypotheses hold.

Annotations in ``InstanceBundle.expected`` are claims for the test suite to
re-derive; nothing here checks them.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from .box_space import Box, BoxSpace, DIM_CAP
from .finite_space import FiniteSpace, build_finite_space
from .maps import BoxMap, MapFamily, MapTable, clip, emax, emin, is_self_map, var
from .rational import RatLike, rat

DEFAULT_POINT_CAP = 200
IRRATIONAL_PROXY = Fraction(7, 10)


@dataclass
class InstanceBundle:
    space: FiniteSpace | BoxSpace
    maps: MapFamily | None = None
    expected: dict[str, Any] = field(default_factory=dict)
    provenance: str = ""
    extra: dict[str, Any] = field(default_factory=dict)


def _abs_metric(values: Sequence[Fraction]) -> list[list[Fraction]]:
    return [[abs(a - b) for b in values] for a in values]


def gen_example32(K: int, proxy: RatLike = IRRATIONAL_PROXY,
                  point_cap: int = DEFAULT_POINT_CAP) -> InstanceBundle:
    """Truncated version of ``x -> x/3`` (irrational x), ``x -> -x/3`` (rational x).

    Rational-tagged points are ``0`` and ``±3^-j``; irrational-tagged points are
    ``±proxy·3^-j`` for ``j = 0..K``. Images that fall below depth ``K`` are
    sent to 0, so the table is a genuine self-map of the finite set.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    n = 4 * (K + 1) + 1
    if n > point_cap:
        raise ValueError(f"K = {K} needs {n} points, cap is {point_cap}")
    s = rat(proxy)
    pts: list[tuple[str, Fraction]] = [("r", Fraction(0))]
    for j in range(K + 1):
        v = Fraction(1, 3 ** j)
        pts += [("r", v), ("r", -v)]
    for j in range(K + 1):
        v = s / 3 ** j
        pts += [("i", v), ("i", -v)]
    index = {p: i for i, p in enumerate(pts)}
    if len(index) != n or len({v for _, v in pts}) != n:
        raise ValueError("proxy value collides with a rational-tagged point")

    images = []
    for tag, v in pts:
        target = (tag, -v / 3) if tag == "r" else (tag, v / 3)
        if v == 0:
            target = ("r", Fraction(0))
        images.append(index.get(target, 0))
    labels = [f"{tag}:{v}" for tag, v in pts]
    space = build_finite_space(labels, _abs_metric([v for _, v in pts]))
    T = MapTable(tuple(images), "example32")
    return InstanceBundle(
        space, MapFamily((T,)),
        expected={"orbit_nonexpansive": True, "nonexpansive": False},
        provenance=f"discontinuous x/3 vs -x/3 map on [-1,1], truncated at depth {K}",
        extra={"tags": [t for t, _ in pts], "values": [v for _, v in pts], "K": K})


def _shortest_paths(w: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(w)
    d = [row[:] for row in w]
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if d[i][k] + d[k][j] < d[i][j]:
                    d[i][j] = d[i][k] + d[k][j]
    return d


def random_metric(n: int, rng: random.Random, max_num: int = 8,
                  denominators: Sequence[int] = (1, 2, 3, 4)) -> list[list[Fraction]]:
    """Shortest-path completion of a complete graph with random positive weights."""
    w = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            w[i][j] = w[j][i] = Fraction(rng.randint(1, max_num), rng.choice(denominators))
    return _shortest_paths(w)


def random_circulant_metric(n: int, rng: random.Random, max_num: int = 6) -> list[list[Fraction]]:
    """Metric invariant under ``i -> i + 1 mod n``: shortest paths on a weighted circulant graph."""
    steps = [Fraction(rng.randint(1, max_num), rng.choice((1, 2))) for _ in range(n // 2 + 1)]
    w = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i != j:
                k = min((i - j) % n, (j - i) % n)
                w[i][j] = steps[k]
    return _shortest_paths(w)


def random_map_table(n: int, rng: random.Random) -> MapTable:
    return MapTable(tuple(rng.randrange(n) for _ in range(n)))


def generated_group(generators: Sequence[MapTable]) -> MapFamily:
    """Closure of a set of permutations under composition (identity included)."""
    n = generators[0].n
    group = {tuple(range(n)): MapTable.identity(n)}
    frontier = list(group.values())
    while frontier:
        fresh = []
        for a in frontier:
            for g in generators:
                c = g.compose(a)
                if c.images not in group:
                    group[c.images] = c
                    fresh.append(c)
        frontier = fresh
    return MapFamily(tuple(group[k] for k in sorted(group)), group=True)


def rotation(n: int, k: int = 1) -> MapTable:
    return MapTable(tuple((i + k) % n for i in range(n)), f"rot{k}")


def gen_named(kind: str, n: int | None = None, d: RatLike = 1,
              seed: int = 0) -> InstanceBundle:
    """Named finite instances: equilateral, path, rotation3, star, random."""
    if kind == "equilateral":
        n = 3 if n is None else n
        if n < 1:
            raise ValueError("n must be >= 1")
        d = rat(d)
        if d <= 0:
            raise ValueError("d must be positive")
        dist = [[Fraction(0) if i == j else d for j in range(n)] for i in range(n)]
        space = build_finite_space(None, dist)
        return InstanceBundle(space, MapFamily((rotation(n),)),
                              expected={"ns": n < 2, "rotation_isometry": True},
                              provenance=f"{n} points at mutual distance {d}")
    if kind == "rotation3":
        space = build_finite_space(["a", "b", "c"], [[0, 1, 1], [1, 0, 1], [1, 1, 0]])
        fam = MapFamily((MapTable.identity(3), rotation(3, 1), rotation(3, 2)),
                        group=True, commuting=True)
        return InstanceBundle(space, fam,
                              expected={"group": True, "interlaced": True, "ns": False,
                                        "common_fixed_point": False},
                              provenance="rotations of an equilateral triangle")
    if kind == "path":
        n = 3 if n is None else n
        if n < 1:
            raise ValueError("n must be >= 1")
        dist = [[Fraction(abs(i - j)) for j in range(n)] for i in range(n)]
        space = build_finite_space(None, dist)
        c = n // 2
        return InstanceBundle(space, MapFamily((MapTable.constant(n, c),)),
                              expected={"ns": n < 2, "nonexpansive": True, "fixed_point": c},
                              provenance=f"integer path 0..{n - 1}, collapsed onto {c}")
    if kind == "star":
        n = 5 if n is None else n
        if n < 2:
            raise ValueError("a star needs at least two points")
        dist = [[Fraction(0) if i == j else Fraction(1 if 0 in (i, j) else 2)
                 for j in range(n)] for i in range(n)]
        space = build_finite_space(None, dist)
        return InstanceBundle(space, MapFamily((MapTable.constant(n, 0),)),
                              expected={"uns": False, "fixed_point": 0},
                              provenance=f"center 0 at distance 1 from {n - 1} leaves")
    if kind == "random":
        n = 6 if n is None else n
        if n < 1:
            raise ValueError("n must be >= 1")
        rng = random.Random(seed)
        space = build_finite_space(None, random_metric(n, rng))
        return InstanceBundle(space, None, expected={"metric": True, "ns": n < 2},
                              provenance=f"random({n}, seed={seed}) shortest-path metric")
    raise ValueError(f"unknown finite instance kind {kind!r}")


def gen_box(kind: str, k: int = 1, ratio: RatLike = Fraction(1, 3),
            shift: Sequence[RatLike] | None = None, ambient: Box | None = None,
            seed: int = 0, retries: int = 20) -> InstanceBundle:
    """Box instances: affine contractions, clipped max/min-affine maps, and a commuting pair."""
    if not (1 <= k <= DIM_CAP):
        raise ValueError(f"dimension must be in 1..{DIM_CAP}")
    if kind == "contraction":
        ratio = rat(ratio)
        if not (0 < ratio < 1):
            raise ValueError("ratio must lie in (0, 1)")
        sh = tuple(rat(v) for v in shift) if shift is not None else (Fraction(0),) * k
        if len(sh) != k:
            raise ValueError("shift has the wrong dimension")
        amb = ambient if ambient is not None else Box.cube(k, -1, 1)
        T = BoxMap(tuple(ratio * var(i) + sh[i] for i in range(k)), f"contraction{ratio}")
        space = BoxSpace(amb)
        if not is_self_map(space, T):
            raise ValueError("contraction does not map the ambient box into itself")
        fixed = tuple(v / (1 - ratio) for v in sh)
        return InstanceBundle(space, MapFamily((T,)), expected={"fixed_point": fixed},
                              provenance=f"x -> {ratio} x + shift")
    if kind == "tropical":
        rng = random.Random(seed)
        amb = Box.cube(k, -1, 1)
        space = BoxSpace(amb)
        factors = [Fraction(1), Fraction(-1), Fraction(1, 2), Fraction(-1, 2), Fraction(2, 3)]
        for _ in range(retries):
            coords = []
            for _j in range(k):
                terms = [rng.choice(factors) * var(rng.randrange(k))
                         + Fraction(rng.randint(-4, 4), 8) for _t in range(3)]
                coords.append(clip(emax(terms[0], emin(terms[1], terms[2])), -1, 1))
            T = BoxMap(tuple(coords), f"tropical{seed}")
            if is_self_map(space, T):
                return InstanceBundle(space, MapFamily((T,)),
                                      expected={"self_map": True, "nonexpansive": True},
                                      provenance=f"clipped max/min-affine map, seed {seed}")
        raise ValueError("could not generate a self-map within the retry budget")
    if kind == "interval_pair":
        space = BoxSpace(Box.cube(1, -1, 1))
        x = var(0)
        fam = MapFamily((BoxMap((-x,), "neg"), BoxMap((x / 3,), "third")), commuting=True)
        return InstanceBundle(space, fam, expected={"fixed_point": (Fraction(0),)},
                              provenance="x -> -x and x -> x/3 on [-1, 1]")
    raise ValueError(f"unknown box instance kind {kind!r}")
