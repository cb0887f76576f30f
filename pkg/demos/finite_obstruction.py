"""Why finite spaces never have normal structure.

The cover of a closest pair is an admissible set whose points all sit at the
minimal distance from one another, so no point of it is a strict center.
Run with ``python demos/finite_obstruction.py``.
"""

import random

from orbitfix import build_finite_space, check_metric_ns, cov, uns_constant
from orbitfix.generators import random_metric


def main(seed: int = 1, n: int = 6) -> None:
    space = build_finite_space(None, random_metric(n, random.Random(seed)))
    d = space.dist
    m, x, y = min((d[i][j], i, j) for i in space.points for j in space.points if i < j)
    C = cov(space, {x, y})
    print(f"closest pair ({x}, {y}) at distance {m}; its cover is {sorted(C)}")
    print("pairwise distances inside the cover:",
          sorted({d[a][b] for a in C for b in C if a < b}))
    r = check_metric_ns(space)
    print("normal structure holds:", r.holds, "| counterexample:", sorted(r.counterexample["set"]))
    c, _ = uns_constant(space)
    print("smallest uniform constant:", c)


if __name__ == "__main__":
    main()
