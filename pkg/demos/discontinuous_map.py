"""The truncated ``x/3`` versus ``-x/3`` map: orbit-nonexpansive but not nonexpansive.

Run with ``python demos/discontinuous_map.py``.
"""

from orbitfix import classify_map, gen_example32
from orbitfix.maps import orbit_radii


def main(K: int = 3) -> None:
    b = gen_example32(K)
    space, T = b.space, b.maps[0]
    c = classify_map(space, T)
    print(f"{space.n} points, depth {K}")
    print("flags:", c.flags)
    w = c.nonexpansive.witness
    x, y = space.labels[w["x"]], space.labels[w["y"]]
    print(f"nonexpansive fails at x={x}, y={y}: d(Tx,Ty) = {w['lhs']} > d(x,y) = {w['rhs']}")

    R = orbit_radii(space, T)
    tags, values = b.extra["tags"], b.extra["values"]
    print("\norbit radii for a few positive pairs (x irrational-tagged, y rational-tagged):")
    for xi, (tx, xv) in enumerate(zip(tags, values)):
        if tx != "i" or xv <= 0:
            continue
        for yi, (ty, yv) in enumerate(zip(tags, values)):
            if ty == "r" and yv > 0 and yv < values[1]:
                print(f"  x={xv!s:>8} y={yv!s:>6}  D(x,o(y))={R[xi][yi]!s:>8}"
                      f"  D(y,o(x))={R[yi][xi]!s:>8}")
        break


if __name__ == "__main__":
    main()
