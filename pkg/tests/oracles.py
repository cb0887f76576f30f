"""Brute-force reference implementations used only by the tests.

Each oracle works straight from a definition, without sharing code paths
with the package: admissible sets by scanning every subset, hulls by
scanning every point, orbits by plain iteration.
"""

from __future__ import annotations

import itertools
from fractions import Fraction


def all_balls(dist):
    n = len(dist)
    radii = sorted({dist[i][j] for i in range(n) for j in range(n)})
    return [frozenset(z for z in range(n) if dist[x][z] <= r) for x in range(n) for r in radii]


def brute_cov(dist, E, balls=None):
    """Intersection of every ball containing ``E``."""
    n = len(dist)
    out = frozenset(range(n))
    for B in all_balls(dist) if balls is None else balls:
        if E <= B:
            out &= B
    return out


def brute_admissible(dist):
    """Every nonempty subset equal to its own ball cover."""
    n = len(dist)
    balls = set(all_balls(dist))
    out = set()
    for size in range(1, n + 1):
        for S in itertools.combinations(range(n), size):
            S = frozenset(S)
            if brute_cov(dist, S, balls) == S:
                out.add(S)
    return out


def diam(dist, A):
    return max(dist[a][b] for a in A for b in A)


def far(dist, x, A):
    return max(dist[x][a] for a in A)


def hull(dist, A, r):
    return frozenset(z for z in range(len(dist)) if all(dist[z][a] <= r for a in A))


def first_triangle_violation(dist):
    n = len(dist)
    for i, j, k in itertools.product(range(n), repeat=3):
        if dist[i][k] > dist[i][j] + dist[j][k]:
            return (i, j, k)
    return None


def orbit_points(images, x):
    """Forward orbit by iterating ``len(images)`` times (enough to cycle)."""
    pts = {x}
    y = x
    for _ in range(len(images)):
        y = images[y]
        pts.add(y)
    return pts


def D_orbit(dist, images, x, y):
    return max(dist[x][z] for z in orbit_points(images, y))


def power(images, n, x):
    for _ in range(n):
        x = images[x]
    return x


def box_grid(lo, hi, steps):
    """Rational grid over a box, ``steps`` cells per side (one point on flat sides)."""
    axes = []
    for a, b in zip(lo, hi):
        if a == b:
            axes.append([a])
        else:
            axes.append([a + (b - a) * Fraction(i, steps) for i in range(steps + 1)])
    return list(itertools.product(*axes))


def linf(x, y):
    return max(abs(a - b) for a, b in zip(x, y))
