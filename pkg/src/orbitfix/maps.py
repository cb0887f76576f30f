"""Self-maps, their orbits, and the map-level conditions.

Two representations:

* :class:`MapTable` -- a function table on a finite space; orbits are exact.
* :class:`BoxMap` -- one expression per output coordinate over a box space.
  Point evaluation is exact; interval evaluation gives sound enclosures.

Checks on finite spaces are exhaustive and return a :class:`Verdict` whose
witness is the first counterexample in lexicographic order. Checks on boxes
can only falsify, so their verdicts are three-valued.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Iterator, Sequence, Union

from .box_space import Box, BoxSpace, Point, as_point, box_radius_from, dist_inf
from .finite_space import FiniteSpace, PointSet
from .rational import RatLike, rat

# -- expressions --------------------------------------------------------------


class Expr:
    """Node of a per-coordinate map expression. Subclasses are frozen dataclasses."""

    def evaluate(self, x: Sequence[Fraction]) -> Fraction:
        raise NotImplementedError

    def enclose(self, box: Box) -> tuple[Fraction, Fraction]:
        raise NotImplementedError

    def max_var(self) -> int:
        raise NotImplementedError

    def __add__(self, other):
        return Add(self, _wrap(other))

    def __radd__(self, other):
        return Add(_wrap(other), self)

    def __sub__(self, other):
        return Sub(self, _wrap(other))

    def __rsub__(self, other):
        return Sub(_wrap(other), self)

    def __neg__(self):
        return Scale(Fraction(-1), self)

    def __mul__(self, factor):
        return Scale(rat(factor), self)

    __rmul__ = __mul__

    def __truediv__(self, divisor):
        return Scale(1 / rat(divisor), self)


def _wrap(v: Union[Expr, RatLike]) -> Expr:
    return v if isinstance(v, Expr) else Const(rat(v))


@dataclass(frozen=True)
class Const(Expr):
    value: Fraction

    def evaluate(self, x):
        return self.value

    def enclose(self, box):
        return (self.value, self.value)

    def max_var(self):
        return -1


@dataclass(frozen=True)
class Var(Expr):
    index: int

    def evaluate(self, x):
        return x[self.index]

    def enclose(self, box):
        return (box.lo[self.index], box.hi[self.index])

    def max_var(self):
        return self.index


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr

    def evaluate(self, x):
        return self.left.evaluate(x) + self.right.evaluate(x)

    def enclose(self, box):
        a, b = self.left.enclose(box)
        c, d = self.right.enclose(box)
        return (a + c, b + d)

    def max_var(self):
        return max(self.left.max_var(), self.right.max_var())


@dataclass(frozen=True)
class Sub(Expr):
    left: Expr
    right: Expr

    def evaluate(self, x):
        return self.left.evaluate(x) - self.right.evaluate(x)

    def enclose(self, box):
        a, b = self.left.enclose(box)
        c, d = self.right.enclose(box)
        return (a - d, b - c)

    def max_var(self):
        return max(self.left.max_var(), self.right.max_var())


@dataclass(frozen=True)
class Scale(Expr):
    factor: Fraction
    arg: Expr

    def evaluate(self, x):
        return self.factor * self.arg.evaluate(x)

    def enclose(self, box):
        a, b = self.arg.enclose(box)
        if self.factor >= 0:
            return (self.factor * a, self.factor * b)
        return (self.factor * b, self.factor * a)

    def max_var(self):
        return self.arg.max_var()


@dataclass(frozen=True)
class Max(Expr):
    args: tuple[Expr, ...]

    def evaluate(self, x):
        return max(e.evaluate(x) for e in self.args)

    def enclose(self, box):
        ivs = [e.enclose(box) for e in self.args]
        return (max(a for a, _ in ivs), max(b for _, b in ivs))

    def max_var(self):
        return max(e.max_var() for e in self.args)


@dataclass(frozen=True)
class Min(Expr):
    args: tuple[Expr, ...]

    def evaluate(self, x):
        return min(e.evaluate(x) for e in self.args)

    def enclose(self, box):
        ivs = [e.enclose(box) for e in self.args]
        return (min(a for a, _ in ivs), min(b for _, b in ivs))

    def max_var(self):
        return max(e.max_var() for e in self.args)


def var(i: int) -> Var:
    return Var(i)


def const(v: RatLike) -> Const:
    return Const(rat(v))


def emax(*args) -> Max:
    if len(args) < 2:
        raise ValueError("max needs at least two arguments")
    return Max(tuple(_wrap(a) for a in args))


def emin(*args) -> Min:
    if len(args) < 2:
        raise ValueError("min needs at least two arguments")
    return Min(tuple(_wrap(a) for a in args))


def eabs(e: Expr) -> Max:
    return emax(e, -e)


def clip(e: Expr, lo: RatLike, hi: RatLike) -> Expr:
    return emax(const(lo), emin(e, const(hi)))


# -- maps ---------------------------------------------------------------------


@dataclass(frozen=True)
class MapTable:
    images: tuple[int, ...]
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(int(v) for v in self.images))
        n = len(self.images)
        for i, v in enumerate(self.images):
            if not (0 <= v < n):
                raise ValueError(f"image of point {i} is {v}, outside 0..{n - 1}")

    @classmethod
    def identity(cls, n: int) -> "MapTable":
        return cls(tuple(range(n)), "id")

    @classmethod
    def constant(cls, n: int, value: int) -> "MapTable":
        return cls((value,) * n, f"const{value}")

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x]

    def compose(self, inner: "MapTable") -> "MapTable":
        """``self ∘ inner``."""
        return MapTable(tuple(self.images[inner.images[x]] for x in range(self.n)))

    def image(self, A: Iterable[int]) -> PointSet:
        return frozenset(self.images[a] for a in A)

    def is_bijection(self) -> bool:
        return len(set(self.images)) == self.n

    def inverse(self) -> "MapTable":
        if not self.is_bijection():
            raise ValueError("map is not a bijection")
        inv = [0] * self.n
        for x, y in enumerate(self.images):
            inv[y] = x
        return MapTable(tuple(inv))

    def fixed_points(self) -> PointSet:
        return frozenset(x for x in range(self.n) if self.images[x] == x)

    def same_as(self, other: "MapTable") -> bool:
        return self.images == other.images


@dataclass(frozen=True)
class BoxMap:
    coords: tuple[Expr, ...]
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(_wrap(c) for c in self.coords))

    @property
    def dim(self) -> int:
        return len(self.coords)

    def check_arity(self, dim: int) -> None:
        if len(self.coords) != dim:
            raise ValueError(f"map has {len(self.coords)} coordinates, space has {dim}")
        for j, e in enumerate(self.coords):
            if e.max_var() >= dim:
                raise ValueError(f"coordinate {j} reads variable {e.max_var()} >= {dim}")

    def __call__(self, x: Sequence[RatLike]) -> Point:
        x = as_point(x)
        return tuple(e.evaluate(x) for e in self.coords)

    def image(self, box: Box) -> Box:
        """Interval enclosure of the image of ``box`` (not clipped)."""
        ivs = [e.enclose(box) for e in self.coords]
        return Box(tuple(a for a, _ in ivs), tuple(b for _, b in ivs))


AnyMap = Union[MapTable, BoxMap]


@dataclass(frozen=True)
class MapFamily:
    maps: tuple
    group: bool = False
    commuting: bool = False

    def __post_init__(self):
        object.__setattr__(self, "maps", tuple(self.maps))
        if not self.maps:
            raise ValueError("a family needs at least one map")
        kinds = {type(m) for m in self.maps}
        if len(kinds) != 1:
            raise ValueError("a family mixes table and expression maps")

    def __iter__(self) -> Iterator:
        return iter(self.maps)

    def __len__(self) -> int:
        return len(self.maps)

    def __getitem__(self, i):
        return self.maps[i]

    @property
    def is_table(self) -> bool:
        return isinstance(self.maps[0], MapTable)


def as_family(family) -> MapFamily:
    if isinstance(family, MapFamily):
        return family
    if isinstance(family, (MapTable, BoxMap)):
        return MapFamily((family,))
    return MapFamily(tuple(family))


@dataclass
class Verdict:
    """Outcome of a check. ``holds`` is None when the check is inconclusive."""

    holds: bool | None
    witness: dict[str, Any] | None = None
    detail: str = ""
    stats: dict[str, Any] = field(default_factory=dict)

    def __repr__(self) -> str:
        state = {True: "holds", False: "fails", None: "inconclusive"}[self.holds]
        extra = f", witness={self.witness}" if self.witness else ""
        return f"Verdict({state}{extra})"


def _check_table(space: FiniteSpace, T: MapTable) -> None:
    if T.n != space.n:
        raise ValueError(f"map acts on {T.n} points, space has {space.n}")


# -- finite orbits ------------------------------------------------------------


def orbit_sequence(T: MapTable, x: int) -> list[int]:
    """``x, Tx, T^2x, ...`` up to the first repetition."""
    seen = {x}
    seq = [x]
    y = T(x)
    while y not in seen:
        seen.add(y)
        seq.append(y)
        y = T(y)
    return seq


def orbit(space: FiniteSpace, T: MapTable, x: int) -> PointSet:
    """The orbit of ``x``, which includes ``x`` itself."""
    _check_table(space, T)
    return frozenset(orbit_sequence(T, x))


def orbit_radii(space: FiniteSpace, T: MapTable) -> list[list[Fraction]]:
    """``R[x][y] = D(x, o_T(y))`` for all points."""
    _check_table(space, T)
    orbits = [orbit_sequence(T, y) for y in space.points]
    return [[max(space.dist[x][z] for z in orbits[y]) for y in space.points]
            for x in space.points]


def check_orbit_nonexpansive(space: FiniteSpace, T: MapTable) -> Verdict:
    R = orbit_radii(space, T)
    d = space.dist
    for x in space.points:
        for y in space.points:
            lhs = d[T(x)][T(y)]
            if lhs > R[x][y]:
                return Verdict(False, {"x": x, "y": y, "lhs": lhs, "rhs": R[x][y]},
                               "d(Tx,Ty) > D(x, o_T(y))")
    return Verdict(True, detail="d(Tx,Ty) <= D(x, o_T(y)) for all pairs")


def check_nonexpansive(space: FiniteSpace, T: MapTable) -> Verdict:
    _check_table(space, T)
    d = space.dist
    for x in space.points:
        for y in space.points:
            if d[T(x)][T(y)] > d[x][y]:
                return Verdict(False, {"x": x, "y": y, "lhs": d[T(x)][T(y)], "rhs": d[x][y]},
                               "d(Tx,Ty) > d(x,y)")
    return Verdict(True)


def check_mean_nonexpansive(space: FiniteSpace, T: MapTable,
                            a: RatLike, b: RatLike) -> Verdict:
    """``d(Tx,Ty) <= a d(x,y) + b d(x,Ty)`` for all pairs."""
    a, b = rat(a), rat(b)
    if a < 0 or b < 0 or a + b > 1:
        raise ValueError("mean parameters need a, b >= 0 and a + b <= 1")
    _check_table(space, T)
    d = space.dist
    for x in space.points:
        for y in space.points:
            lhs = d[T(x)][T(y)]
            rhs = a * d[x][y] + b * d[x][T(y)]
            if lhs > rhs:
                return Verdict(False, {"x": x, "y": y, "lhs": lhs, "rhs": rhs, "a": a, "b": b},
                               "d(Tx,Ty) > a d(x,y) + b d(x,Ty)")
    return Verdict(True, {"a": a, "b": b})


@dataclass
class MapClassification:
    nonexpansive: Verdict
    orbit_nonexpansive: Verdict
    mean: Verdict | None = None

    @property
    def flags(self) -> dict[str, bool]:
        out = {"nonexpansive": bool(self.nonexpansive.holds),
               "orbit_nonexpansive": bool(self.orbit_nonexpansive.holds)}
        if self.mean is not None:
            out["mean"] = bool(self.mean.holds)
        return out


def classify_map(space: FiniteSpace, T: MapTable,
                 mean_params: tuple[RatLike, RatLike] | None = None) -> MapClassification:
    ne = check_nonexpansive(space, T)
    one = check_orbit_nonexpansive(space, T)
    mean = check_mean_nonexpansive(space, T, *mean_params) if mean_params else None
    # both classes sit inside the orbit-nonexpansive one
    if ne.holds and not one.holds:
        raise AssertionError(f"nonexpansive map failed the orbit check: {one.witness}")
    if mean is not None and mean.holds and not one.holds:
        raise AssertionError(f"mean nonexpansive map failed the orbit check: {one.witness}")
    return MapClassification(ne, one, mean)


def check_interlaced(space: FiniteSpace, family) -> Verdict:
    """``d(Tx, Sy) <= max_R D(x, o_R(y))`` over all members and points."""
    fam = as_family(family)
    radii = [orbit_radii(space, R) for R in fam]
    sup = [[max(Rr[x][y] for Rr in radii) for y in space.points] for x in space.points]
    d = space.dist
    for ti, T in enumerate(fam):
        for si, S in enumerate(fam):
            for x in space.points:
                Tx = T(x)
                for y in space.points:
                    lhs = d[Tx][S(y)]
                    if lhs > sup[x][y]:
                        return Verdict(False, {"T": ti, "S": si, "x": x, "y": y,
                                               "lhs": lhs, "rhs": sup[x][y]},
                                       "d(Tx,Sy) > sup_R D(x, o_R(y))")
    return Verdict(True)


def check_group(family, space: FiniteSpace | None = None) -> Verdict:
    """Group axioms for a family of permutations under composition.

    With ``space`` given, also runs the orbit check on each member; a group of
    orbit-nonexpansive maps is cross-checked to be interlaced.
    """
    fam = as_family(family)
    maps = list(fam)
    n = maps[0].n
    images = {m.images for m in maps}
    for i, m in enumerate(maps):
        if m.n != n:
            return Verdict(False, {"reason": "size_mismatch", "map": i})
        if not m.is_bijection():
            return Verdict(False, {"reason": "not_bijection", "map": i})
    if tuple(range(n)) not in images:
        return Verdict(False, {"reason": "no_identity"})
    for i, s in enumerate(maps):
        for j, t in enumerate(maps):
            if s.compose(t).images not in images:
                return Verdict(False, {"reason": "not_closed", "left": i, "right": j})
    for i, s in enumerate(maps):
        if s.inverse().images not in images:
            return Verdict(False, {"reason": "no_inverse", "map": i})
    stats: dict[str, Any] = {"order": len(images)}
    if space is not None:
        each = [check_orbit_nonexpansive(space, m) for m in maps]
        all_one = all(v.holds for v in each)
        stats["orbit_nonexpansive"] = all_one
        if all_one:
            inter = check_interlaced(space, fam)
            if not inter.holds:
                raise AssertionError(f"group of orbit-nonexpansive maps not interlaced: "
                                     f"{inter.witness}")
            stats["interlaced"] = True
        else:
            stats["orbit_failures"] = [i for i, v in enumerate(each) if not v.holds]
    return Verdict(True, stats=stats)


def check_commuting(family) -> Verdict:
    fam = as_family(family)
    maps = list(fam)
    for i, t in enumerate(maps):
        for j in range(i + 1, len(maps)):
            s = maps[j]
            for x in range(t.n):
                ts, st = t(s(x)), s(t(x))
                if ts != st:
                    return Verdict(False, {"T": i, "S": j, "x": x, "TSx": ts, "STx": st})
    return Verdict(True)


def fixed_set(family) -> PointSet:
    """Common fixed points of a family of tables, by scanning every point."""
    fam = as_family(family)
    n = fam[0].n
    return frozenset(x for x in range(n) if all(m(x) == x for m in fam))


# -- box enclosures -----------------------------------------------------------


def family_image(family, box: Box) -> Box:
    imgs = [m.image(box) for m in family]
    out = imgs[0]
    for b in imgs[1:]:
        out = out | b
    return out


def _extrapolate(seq: list[Box], container: Box, lag: int = 1) -> Box:
    """Guess the limit of a nested-growing sequence of boxes, endpoint-wise.

    Geometric endpoint sequences (sampled every ``lag`` steps, which catches
    period-two oscillation between coupled coordinates) are extrapolated
    exactly; anything else is widened to the container. The guess is only
    used after it is checked.
    """
    a, b, c = seq[-1 - 2 * lag], seq[-1 - lag], seq[-1]

    def limit(e0, e1, e2, bound):
        d1, d2 = e1 - e0, e2 - e1
        if d2 == 0:
            return e2
        if d1 != 0:
            ratio = d2 / d1
            if 0 < ratio < 1:
                return e2 + d2 * ratio / (1 - ratio)
        return bound

    lo = tuple(max(limit(x, y, z, m), m) for x, y, z, m in zip(a.lo, b.lo, c.lo, container.lo))
    hi = tuple(min(limit(x, y, z, m), m) for x, y, z, m in zip(a.hi, b.hi, c.hi, container.hi))
    return Box(tuple(min(l, v) for l, v in zip(lo, c.lo)),
               tuple(max(h, v) for h, v in zip(hi, c.hi)))


def _widen(guess: Box, cur: Box, container: Box) -> Box:
    """Push ``guess`` past itself by its own distance from ``cur``."""
    lo = tuple(max(2 * g - c, m) for g, c, m in zip(guess.lo, cur.lo, container.lo))
    hi = tuple(min(2 * g - c, m) for g, c, m in zip(guess.hi, cur.hi, container.hi))
    return Box(lo, hi)


def _candidates(seq: list[Box], container: Box) -> Iterator[Box]:
    cur = seq[-1]
    for lag in (1, 2):
        if len(seq) >= 2 * lag + 1:
            guess = _extrapolate(seq, container, lag)
            if guess != cur:
                yield guess
                yield _widen(guess, cur, container)


def is_post_fixpoint(family, box: Box, container: Box) -> bool:
    """``T̂(box) ∩ container ⊆ box`` for every member."""
    for m in family:
        img = m.image(box).intersect(container)
        if img is not None and not img.issubset(box):
            return False
    return True


def invariant_hull(family, start: Box, container: Box,
                   budget: int = 256) -> tuple[Box, bool]:
    """A box containing ``start`` and closed under every map's enclosure.

    ``container`` must itself be invariant (e.g. the ambient box of a verified
    self-map); images are clipped to it. Returns ``(box, certified)``; when the
    budget runs out the container is returned, certified only if it is
    itself closed under the maps.
    """
    fam = as_family(family)
    cur = start.intersect(container)
    if cur is None:
        raise ValueError("start lies outside the container")
    seq = [cur]
    for _ in range(budget):
        img = family_image(fam, cur).intersect(container)
        nxt = cur if img is None else cur | img
        if nxt == cur:
            return cur, True
        seq.append(nxt)
        cur = nxt
        for guess in _candidates(seq, container):
            if is_post_fixpoint(fam, guess, container):
                return guess, True
    return container, is_post_fixpoint(fam, container, container)


def orbit_enclosure(bspace: BoxSpace, T, y: Sequence[RatLike], budget: int = 256) -> Box:
    """Box containing the whole orbit of ``y`` (the ambient if the budget runs out)."""
    box, _ = invariant_hull(as_family(T), Box.point(y), bspace.ambient, budget)
    return box


def orbit_prefix(T: BoxMap, y: Point, length: int) -> list[Point]:
    pts = [y]
    for _ in range(length):
        nxt = T(pts[-1])
        if nxt == pts[-1]:
            break
        pts.append(nxt)
    return pts


def sample_point(rng: random.Random, box: Box, denom: int) -> Point:
    return tuple(a + (b - a) * Fraction(rng.randint(0, denom), denom)
                 for a, b in zip(box.lo, box.hi))


def falsify_box_interlaced(bspace: BoxSpace, family, samples: int = 200, seed: int = 0,
                           prefix: int = 32, denom: int = 64,
                           budget: int = 256) -> Verdict:
    """Search for pairs violating the interlaced inequality on a box space.

    For each sampled pair the true right side ``sup_R D(x, o_R(y))`` is
    bracketed between a finite orbit prefix (lower bound) and an orbit
    enclosure (upper bound). Only pairs beating the upper bound are reported
    as violations; a single-map family gives the orbit-nonexpansive check.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    fam = as_family(family)
    amb = bspace.ambient
    rng = random.Random(seed)
    enclosures: dict[Point, list[Box]] = {}
    counts = {"violations": 0, "certified": 0, "inconclusive": 0}
    first = None
    corners = list(amb.corners()) if amb.dim <= 3 else []
    pairs = [(x, y) for x in corners for y in corners]
    while len(pairs) < samples:
        pairs.append((sample_point(rng, amb, denom), sample_point(rng, amb, denom)))
    for x, y in pairs[:samples]:
        if y not in enclosures:
            enclosures[y] = [invariant_hull([R], Box.point(y), amb, budget)[0] for R in fam]
        upper = max(box_radius_from(x, O) for O in enclosures[y])
        lower = max(max(dist_inf(x, z) for z in orbit_prefix(R, y, prefix)) for R in fam)
        lhs = max(dist_inf(T(x), S(y)) for T in fam for S in fam)
        if lhs > upper:
            counts["violations"] += 1
            if first is None:
                first = {"x": x, "y": y, "lhs": lhs, "rhs_upper": upper}
        elif lhs <= lower:
            counts["certified"] += 1
        else:
            counts["inconclusive"] += 1
    if first is not None:
        return Verdict(False, first, "violation beats the enclosure upper bound", counts)
    if counts["inconclusive"] == 0:
        return Verdict(True, detail="every sampled pair certified", stats=counts)
    return Verdict(None, detail="no violation found; some pairs undecided", stats=counts)


def falsify_box_orbit_nonexpansive(bspace: BoxSpace, T: BoxMap, samples: int = 200,
                                   seed: int = 0, **kw) -> Verdict:
    return falsify_box_interlaced(bspace, [T], samples, seed, **kw)


def is_self_map(bspace: BoxSpace, T: BoxMap) -> bool:
    """Enclosure check that ``T`` maps the ambient box into itself."""
    T.check_arity(bspace.dim)
    return T.image(bspace.ambient).issubset(bspace.ambient)
