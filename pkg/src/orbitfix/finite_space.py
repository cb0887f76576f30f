"""Finite metric spaces and their admissible sets, by exhaustive enumeration.

Points are the indices ``0..n-1``; a point set is a ``frozenset`` of
indices. Admissible sets are the nonempty intersections of closed balls.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from .rational import RatLike, rat

PointSet = frozenset

DEFAULT_LATTICE_CAP = 100_000


class MetricError(ValueError):
    """The distance matrix does not define a metric."""


class ShapeError(MetricError):
    pass


class DiagonalError(MetricError):
    def __init__(self, i: int, value: Fraction):
        self.i, self.value = i, value
        super().__init__(f"d({i},{i}) = {value}, expected 0")


class AsymmetryError(MetricError):
    def __init__(self, i: int, j: int, dij: Fraction, dji: Fraction):
        self.i, self.j = i, j
        super().__init__(f"d({i},{j}) = {dij} but d({j},{i}) = {dji}")


class ZeroDistanceError(MetricError):
    def __init__(self, i: int, j: int, value: Fraction):
        self.i, self.j, self.value = i, j, value
        super().__init__(f"d({i},{j}) = {value} must be positive for distinct points")


class TriangleViolation(MetricError):
    """``d(i,k) > d(i,j) + d(j,k)`` for the reported triple."""

    def __init__(self, i: int, j: int, k: int, lhs: Fraction, rhs: Fraction):
        self.i, self.j, self.k = i, j, k
        self.lhs, self.rhs = lhs, rhs
        super().__init__(f"TriangleViolation({i},{j},{k}): d({i},{k}) = {lhs} > {rhs}")

    @property
    def triple(self) -> tuple[int, int, int]:
        return (self.i, self.j, self.k)


class CapExceeded(RuntimeError):
    """An enumeration grew past its configured size cap."""

    def __init__(self, what: str, cap: int):
        self.what, self.cap = what, cap
        super().__init__(f"{what} exceeded the cap of {cap} members")


@dataclass(frozen=True)
class FiniteSpace:
    labels: tuple[str, ...]
    dist: tuple[tuple[Fraction, ...], ...]

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def points(self) -> range:
        return range(self.n)

    @property
    def universe(self) -> PointSet:
        return frozenset(range(self.n))

    def d(self, i: int, j: int) -> Fraction:
        return self.dist[i][j]

    @property
    def diameter(self) -> Fraction:
        return max((v for row in self.dist for v in row), default=Fraction(0))

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def pointset(self, items: Iterable[int]) -> PointSet:
        s = frozenset(items)
        bad = [i for i in s if not (0 <= i < self.n)]
        if bad:
            raise IndexError(f"points {sorted(bad)} are outside 0..{self.n - 1}")
        return s


def build_finite_space(labels: Sequence[str] | None,
                       dist: Sequence[Sequence[RatLike]]) -> FiniteSpace:
    """Validate a distance matrix and wrap it as a :class:`FiniteSpace`.

    Raises a :class:`MetricError` subclass naming the offending entries; a
    triangle failure reports the lexicographically first triple ``(i, j, k)``
    with ``d(i,k) > d(i,j) + d(j,k)``.
    """
    n = len(dist)
    if n == 0:
        raise ShapeError("a metric space needs at least one point")
    rows = []
    for i, row in enumerate(dist):
        if len(row) != n:
            raise ShapeError(f"row {i} has {len(row)} entries, expected {n}")
        rows.append(tuple(rat(v) for v in row))
    if labels is None:
        labels = [str(i) for i in range(n)]
    labels = tuple(str(x) for x in labels)
    if len(labels) != n:
        raise ShapeError(f"{len(labels)} labels for {n} points")
    if len(set(labels)) != n:
        raise ShapeError("labels must be distinct")

    for i in range(n):
        if rows[i][i] != 0:
            raise DiagonalError(i, rows[i][i])
    for i in range(n):
        for j in range(i + 1, n):
            if rows[i][j] != rows[j][i]:
                raise AsymmetryError(i, j, rows[i][j], rows[j][i])
            if rows[i][j] <= 0:
                raise ZeroDistanceError(i, j, rows[i][j])
    for i in range(n):
        for j in range(n):
            for k in range(n):
                rhs = rows[i][j] + rows[j][k]
                if rows[i][k] > rhs:
                    raise TriangleViolation(i, j, k, rows[i][k], rhs)
    return FiniteSpace(labels, tuple(rows))


def _nonempty(A: Iterable[int], what: str = "set") -> PointSet:
    A = frozenset(A)
    if not A:
        raise ValueError(f"{what} must be nonempty")
    return A


def delta(space: FiniteSpace, A: Iterable[int]) -> Fraction:
    """Diameter of a nonempty point set."""
    A = _nonempty(A)
    return max(space.dist[a][b] for a in A for b in A)


def radius_from(space: FiniteSpace, x: int, A: Iterable[int]) -> Fraction:
    """Least radius of a ball at ``x`` containing ``A``."""
    A = _nonempty(A)
    row = space.dist[x]
    return max(row[a] for a in A)


def ball(space: FiniteSpace, x: int, r: RatLike) -> PointSet:
    r = rat(r)
    if r < 0:
        raise ValueError("radius must be nonnegative")
    row = space.dist[x]
    return frozenset(z for z in space.points if row[z] <= r)


def ball_hull(space: FiniteSpace, A: Iterable[int], r: RatLike) -> PointSet:
    """Points within ``r`` of every point of ``A`` (possibly empty)."""
    A = _nonempty(A)
    r = rat(r)
    if r < 0:
        raise ValueError("radius must be nonnegative")
    return frozenset(y for y in space.points if radius_from(space, y, A) <= r)


def cov(space: FiniteSpace, C: Iterable[int]) -> PointSet:
    """Least admissible superset of ``C``.

    The smallest ball at ``x`` containing ``C`` has radius ``D(x, C)``, so the
    intersection of all balls containing ``C`` is the intersection of those.
    """
    C = _nonempty(C)
    out = space.universe
    for x in space.points:
        out = out & ball(space, x, radius_from(space, x, C))
    return out


def canonical_radii(space: FiniteSpace) -> tuple[Fraction, ...]:
    values = {Fraction(0)}
    values.update(v for row in space.dist for v in row)
    return tuple(sorted(values))


def set_key(A: Iterable[int]) -> tuple[int, tuple[int, ...]]:
    """Deterministic order on point sets: by size, then by sorted members."""
    s = sorted(A)
    return (len(s), tuple(s))


@dataclass(frozen=True)
class AdmissibleLattice:
    members: tuple[PointSet, ...]

    def __iter__(self) -> Iterator[PointSet]:
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, A: object) -> bool:
        return frozenset(A) in self._index  # type: ignore[arg-type]

    @cached_property
    def _index(self) -> frozenset:
        return frozenset(self.members)

    def non_singletons(self) -> Iterator[PointSet]:
        return (A for A in self.members if len(A) > 1)

    def containing(self, C: Iterable[int]) -> list[PointSet]:
        C = frozenset(C)
        return [A for A in self.members if C <= A]


def close_under_intersection(seeds: Iterable[PointSet], cap: int,
                             what: str = "lattice") -> list[PointSet]:
    """Nonempty members of the intersection closure of ``seeds``, sorted."""
    members: set[PointSet] = set()
    frontier: list[PointSet] = []
    for s in seeds:
        if s and s not in members:
            members.add(s)
            frontier.append(s)
    if len(members) > cap:
        raise CapExceeded(what, cap)
    while frontier:
        fresh: list[PointSet] = []
        for a in frontier:
            for b in list(members):
                c = a & b
                if c and c not in members:
                    members.add(c)
                    fresh.append(c)
                    if len(members) > cap:
                        raise CapExceeded(what, cap)
        frontier = fresh
    return sorted(members, key=set_key)


def enumerate_admissible(space: FiniteSpace,
                         cap: int = DEFAULT_LATTICE_CAP) -> AdmissibleLattice:
    """All admissible sets, seeded by balls at the canonical radii."""
    radii = canonical_radii(space)
    seeds = [ball(space, x, r) for x in space.points for r in radii]
    return AdmissibleLattice(tuple(close_under_intersection(seeds, cap)))
