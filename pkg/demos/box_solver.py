"""Both solver routes on a box contraction, with certificate checks.

Run with ``python demos/box_solver.py``.
"""

from fractions import Fraction

from orbitfix import gen_box, solve_fixed_point, verify_certificate


def show(cert) -> None:
    for s in cert.trace:
        extra = f" cond1={s.cond1} cond2={s.cond2}" if s.kind == "pq" else ""
        print(f"  {s.index:>3} {s.kind:<8} delta={float(s.delta):.6f}{extra}")
    out = cert.outcome
    point = ", ".join(f"{float(v):.6f}" for v in out.point)
    print(f"  {out.kind}: point ({point}), radius {float(out.radius):.2e},"
          f" exact residual {float(out.residual):.2e}")


def main() -> None:
    ratio = Fraction(9, 10)
    b = gen_box("contraction", k=2, ratio=ratio, shift=(Fraction(1, 20), Fraction(-1, 30)))
    print("closed-form fixed point:", b.expected["fixed_point"])
    for method, kw in (("ns", {}), ("pq", {"p": Fraction(3, 4), "q": Fraction(3, 4)})):
        cert = solve_fixed_point(b.space, b.maps, method=method, eps=Fraction(1, 1000), **kw)
        print(f"\nmethod {method}:")
        show(cert)
        print("  certificate verifies:", bool(verify_certificate(b.space, b.maps, cert)))


if __name__ == "__main__":
    main()
