"""Axis-aligned rational boxes under the max metric.

In this model every admissible set is a box, so the ball algebra has closed
forms. A point is a tuple of Fractions; a degenerate box ``lo == hi`` stands
for a single point.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence, Union

from .rational import RatLike, rat

Point = tuple[Fraction, ...]

DIM_CAP = 16


def as_point(values: Iterable[RatLike]) -> Point:
    return tuple(rat(v) for v in values)


def dist_inf(x: Sequence[Fraction], y: Sequence[Fraction]) -> Fraction:
    if len(x) != len(y):
        raise ValueError("dimension mismatch")
    return max((abs(a - b) for a, b in zip(x, y)), default=Fraction(0))


@dataclass(frozen=True)
class Box:
    lo: Point
    hi: Point

    def __post_init__(self):
        lo, hi = as_point(self.lo), as_point(self.hi)
        if len(lo) != len(hi):
            raise ValueError("lo and hi have different dimensions")
        if not lo:
            raise ValueError("a box needs dimension >= 1")
        for i, (a, b) in enumerate(zip(lo, hi)):
            if a > b:
                raise ValueError(f"empty box: lo[{i}] = {a} > hi[{i}] = {b}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, x: Iterable[RatLike]) -> "Box":
        p = as_point(x)
        return cls(p, p)

    @classmethod
    def cube(cls, dim: int, lo: RatLike, hi: RatLike) -> "Box":
        return cls((rat(lo),) * dim, (rat(hi),) * dim)

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def sides(self) -> tuple[Fraction, ...]:
        return tuple(b - a for a, b in zip(self.lo, self.hi))

    def contains(self, x: Sequence[Fraction]) -> bool:
        return all(a <= v <= b for a, v, b in zip(self.lo, x, self.hi))

    def issubset(self, other: "Box") -> bool:
        return all(oa <= a and b <= ob
                   for a, b, oa, ob in zip(self.lo, self.hi, other.lo, other.hi))

    def __le__(self, other: "Box") -> bool:
        return self.issubset(other)

    def intersect(self, other: "Box") -> "Box | None":
        lo = tuple(max(a, b) for a, b in zip(self.lo, other.lo))
        hi = tuple(min(a, b) for a, b in zip(self.hi, other.hi))
        if any(a > b for a, b in zip(lo, hi)):
            return None
        return Box(lo, hi)

    def __and__(self, other: "Box") -> "Box | None":
        return self.intersect(other)

    def hull(self, other: "Box") -> "Box":
        lo = tuple(min(a, b) for a, b in zip(self.lo, other.lo))
        hi = tuple(max(a, b) for a, b in zip(self.hi, other.hi))
        return Box(lo, hi)

    def __or__(self, other: "Box") -> "Box":
        return self.hull(other)

    def corners(self) -> Iterator[Point]:
        pairs = [(a,) if a == b else (a, b) for a, b in zip(self.lo, self.hi)]
        return (tuple(c) for c in itertools.product(*pairs))

    def __repr__(self) -> str:
        parts = [f"[{a}, {b}]" if a != b else f"{{{a}}}" for a, b in zip(self.lo, self.hi)]
        return "Box(" + " x ".join(parts) + ")"


@dataclass(frozen=True)
class BoxSpace:
    ambient: Box

    def __post_init__(self):
        if self.ambient.dim > DIM_CAP:
            raise ValueError(f"dimension {self.ambient.dim} exceeds the cap {DIM_CAP}")

    @property
    def dim(self) -> int:
        return self.ambient.dim

    @property
    def diameter(self) -> Fraction:
        return box_delta(self.ambient)


def box_delta(A: Box) -> Fraction:
    return max(A.sides())


def box_radius_from(x: Sequence[Fraction], A: Box) -> Fraction:
    """Distance from ``x`` to the farthest corner of ``A``."""
    return max(max(abs(v - a), abs(v - b)) for v, a, b in zip(x, A.lo, A.hi))


def box_ball_hull(A: Box, r: RatLike, ambient: Box) -> Box | None:
    """Points of ``ambient`` within ``r`` of every point of ``A``; None if empty."""
    r = rat(r)
    if r < 0:
        raise ValueError("radius must be nonnegative")
    lo = tuple(max(b - r, m) for b, m in zip(A.hi, ambient.lo))
    hi = tuple(min(a + r, m) for a, m in zip(A.lo, ambient.hi))
    if any(a > b for a, b in zip(lo, hi)):
        return None
    return Box(lo, hi)


def box_cov(items: Iterable[Union[Box, Sequence[RatLike]]]) -> Box:
    """Bounding box of a nonempty collection of points and boxes."""
    out: Box | None = None
    for item in items:
        b = item if isinstance(item, Box) else Box.point(item)
        out = b if out is None else out.hull(b)
    if out is None:
        raise ValueError("box_cov of an empty collection")
    return out


def chebyshev_center(A: Box) -> Point:
    return tuple((a + b) / 2 for a, b in zip(A.lo, A.hi))
