"""Command line front end.

Every command prints one JSON report (or writes it to ``--report``) with the
command echo, the package version, the seed and the result. Exit codes:
0 success or property holds, 1 property fails or the solver stalls,
2 invalid input, 3 a budget or cap was exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .box_space import Box, BoxSpace
from .engine import (DEFAULT_BUDGET, DEFAULT_EPS, PreconditionError, Stall, solve_fixed_point,
                     verify_certificate)
from .finite_space import (DEFAULT_LATTICE_CAP, AsymmetryError, CapExceeded, DiagonalError,
                           FiniteSpace, MetricError, TriangleViolation, ZeroDistanceError,
                           enumerate_admissible, set_key)
from .formats import (FormatError, cert_from_json, cert_to_json, dump_instance, dump_maps, dumps,
                      encode, load_instance, load_maps, parse_rat)
from .generators import gen_box, gen_example32, gen_named
from .maps import (check_commuting, check_group, check_interlaced, check_orbit_nonexpansive,
                   classify_map, falsify_box_interlaced, falsify_box_orbit_nonexpansive)
from .structures import (box_structure_report, check_metric_ns, check_one_local_retract,
                         check_pq_urns, check_urns, uns_constant)

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, code: int, payload: dict[str, Any]):
        super().__init__(payload.get("message", ""))
        self.code, self.payload = code, payload


def _read_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise CliError(EXIT_INPUT, {"error": "missing_file", "file": path,
                                    "message": f"no such file: {path}"}) from None
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_INPUT, {"error": "bad_json", "file": path, "line": exc.lineno,
                                    "column": exc.colno, "message": exc.msg}) from None


def _metric_payload(exc: MetricError) -> dict[str, Any]:
    out: dict[str, Any] = {"error": "metric", "message": str(exc)}
    if isinstance(exc, TriangleViolation):
        out.update(kind="triangle", triple=list(exc.triple), lhs=exc.lhs, rhs=exc.rhs)
    elif isinstance(exc, AsymmetryError):
        out.update(kind="asymmetry", pair=[exc.i, exc.j])
    elif isinstance(exc, DiagonalError):
        out.update(kind="diagonal", point=exc.i)
    elif isinstance(exc, ZeroDistanceError):
        out.update(kind="zero_distance", pair=[exc.i, exc.j])
    else:
        out.update(kind="shape")
    return out


def _load_space(path: str):
    doc = _read_json(path)
    try:
        return load_instance(doc)
    except FormatError as exc:
        raise CliError(EXIT_INPUT, {"error": "format", "file": path, "path": exc.path,
                                    "message": exc.message}) from None
    except MetricError as exc:
        raise CliError(EXIT_INPUT, dict(_metric_payload(exc), file=path)) from None


def _load_maps(path: str, space):
    doc = _read_json(path)
    try:
        return load_maps(doc, space)
    except FormatError as exc:
        raise CliError(EXIT_INPUT, {"error": "format", "file": path, "path": exc.path,
                                    "message": exc.message}) from None
    except ValueError as exc:
        raise CliError(EXIT_INPUT, {"error": "maps", "file": path, "message": str(exc)}) from None


def _bad(message: str, **extra) -> CliError:
    return CliError(EXIT_INPUT, dict({"error": "usage", "message": message}, **extra))


def _rat_arg(text: str, name: str):
    try:
        return parse_rat(text, name)
    except FormatError as exc:
        raise _bad(f"--{name}: {exc.message}") from None


def _rat_list(text: str, name: str):
    return [_rat_arg(t, name) for t in text.split(",") if t.strip()]


# -- commands -----------------------------------------------------------------


def cmd_validate(args) -> tuple[int, dict]:
    space = _load_space(args.instance)
    if isinstance(space, FiniteSpace):
        return EXIT_OK, {"valid": True, "type": "finite", "n": space.n,
                         "labels": list(space.labels), "diameter": space.diameter}
    return EXIT_OK, {"valid": True, "type": "box", "dim": space.dim, "diameter": space.diameter}


def cmd_admissible(args) -> tuple[int, dict]:
    space = _load_space(args.instance)
    if isinstance(space, BoxSpace):
        return EXIT_OK, {"model": "box", "count": None,
                         "note": "every nonempty sub-box of the ambient is admissible"}
    lat = enumerate_admissible(space, cap=args.cap)
    members = sorted(lat.members, key=set_key)
    return EXIT_OK, {"model": "finite", "count": len(members), "members": members}


def _parse_property(text: str) -> tuple[str, str | None]:
    name, _, value = text.partition("=")
    return name.strip(), (value.strip() if value else None)


def _pointset(space: FiniteSpace, text: str):
    out = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        if item in space.labels:
            out.append(space.index(item))
        elif item.lstrip("-").isdigit() and 0 <= int(item) < space.n:
            out.append(int(item))
        else:
            raise _bad(f"unknown point {item!r}")
    if not out:
        raise _bad("olr needs a nonempty point set")
    return frozenset(out)


def cmd_check(args) -> tuple[int, dict]:
    space = _load_space(args.instance)
    name, value = _parse_property(args.property)
    if name not in ("ns", "uns", "urns", "pq-urns", "olr"):
        raise _bad(f"unknown property {name!r}")
    if name in ("urns", "pq-urns", "olr") and value is None:
        raise _bad(f"property {name} needs a parameter")
    if name == "urns":
        p = q = _rat_arg(value, "property")
    elif name == "pq-urns":
        parts = _rat_list(value, "property")
        if len(parts) != 2:
            raise _bad("pq-urns expects <p>,<q>")
        p, q = parts
    else:
        p = q = None
    if p is not None and (p <= 0 or not (0 < q < 1)):
        raise _bad("need p > 0 and 0 < q < 1")

    if isinstance(space, BoxSpace):
        if name == "olr":
            raise _bad("olr is only available on finite instances")
        pp = p if p is not None else parse_rat("3/4", "p")
        rep = box_structure_report(space, samples=args.samples, seed=args.seed,
                                   p=pp, q=q if q is not None else pp)
        rep.property = name
        return (EXIT_OK if rep.holds else EXIT_FAIL), {"report": rep}

    lat = enumerate_admissible(space, cap=args.cap) if name != "olr" else None
    if name == "ns":
        rep = check_metric_ns(space, lat)
    elif name == "uns":
        if space.n < 2:
            raise _bad("the uniform constant needs at least two points")
        c_star, rep = uns_constant(space, lat)
        return (EXIT_OK if rep.holds else EXIT_FAIL), {"c_star": c_star, "report": rep}
    elif name == "urns":
        rep = check_urns(space, p, lat)
    elif name == "pq-urns":
        rep = check_pq_urns(space, p, q, lat)
    else:
        rep = check_one_local_retract(space, _pointset(space, value), cap=args.cap)
    return (EXIT_OK if rep.holds else EXIT_FAIL), {"report": rep}


def _verdict_code(holds) -> int:
    return EXIT_FAIL if holds is False else EXIT_OK


def cmd_map_check(args) -> tuple[int, dict]:
    space = _load_space(args.instance)
    fam = _load_maps(args.maps, space)
    prop = args.property
    if isinstance(space, BoxSpace):
        if prop == "orbit":
            verdicts = [falsify_box_orbit_nonexpansive(space, T, samples=args.samples,
                                                       seed=args.seed) for T in fam]
            holds = False if any(v.holds is False for v in verdicts) else None
            return _verdict_code(holds), {"verdicts": verdicts, "holds": holds}
        if prop == "interlaced":
            v = falsify_box_interlaced(space, fam, samples=args.samples, seed=args.seed)
            return _verdict_code(v.holds), {"verdict": v}
        raise _bad(f"property {prop} is only available on finite instances")
    if prop == "orbit":
        verdicts = [check_orbit_nonexpansive(space, T) for T in fam]
        holds = all(v.holds for v in verdicts)
        return _verdict_code(holds), {"verdicts": verdicts, "holds": holds}
    if prop == "interlaced":
        v = check_interlaced(space, fam)
    elif prop == "group":
        v = check_group(fam, space)
    elif prop == "commuting":
        v = check_commuting(fam)
    else:
        mean = tuple(_rat_list(args.mean, "mean")) if args.mean else None
        if mean is not None and len(mean) != 2:
            raise _bad("--mean expects <a>,<b>")
        try:
            cls = [classify_map(space, T, mean) for T in fam]
        except ValueError as exc:
            raise _bad(str(exc)) from None
        return EXIT_OK, {"classification": [
            {"flags": c.flags, "nonexpansive": c.nonexpansive,
             "orbit_nonexpansive": c.orbit_nonexpansive, "mean": c.mean} for c in cls]}
    return _verdict_code(v.holds), {"verdict": v}


def cmd_falsify(args) -> tuple[int, dict]:
    space = _load_space(args.instance)
    fam = _load_maps(args.maps, space)
    if isinstance(space, FiniteSpace):
        v = check_interlaced(space, fam)
        return _verdict_code(v.holds), {"verdict": v, "exhaustive": True}
    if args.samples < 1:
        raise _bad("--samples must be >= 1")
    v = falsify_box_interlaced(space, fam, samples=args.samples, seed=args.seed)
    return _verdict_code(v.holds), {"verdict": v, "exhaustive": False}


def cmd_solve(args) -> tuple[int, dict]:
    space = _load_space(args.instance)
    fam = _load_maps(args.maps, space)
    p = _rat_arg(args.p, "p") if args.p is not None else None
    q = _rat_arg(args.q, "q") if args.q is not None else None
    eps = _rat_arg(args.eps, "eps")
    try:
        cert = solve_fixed_point(space, fam, method=args.method, p=p, q=q, eps=eps,
                                 budget=args.budget, samples=args.samples, seed=args.seed)
    except PreconditionError as exc:
        raise CliError(EXIT_INPUT, {"error": "precondition", "message": str(exc),
                                    "witness": exc.witness}) from None
    except ValueError as exc:
        raise _bad(str(exc)) from None
    doc = cert_to_json(cert)
    if args.trace:
        Path(args.trace).write_text(dumps(doc), encoding="utf-8")
    check = verify_certificate(space, fam, cert)
    out = cert.outcome
    if isinstance(out, Stall):
        code = EXIT_BUDGET if out.reason == "budget" else EXIT_FAIL
    else:
        code = EXIT_OK
    return code, {"outcome": out, "shrink_rounds": cert.shrink_rounds, "steps": len(cert.trace) - 1,
                  "verified": check.ok, "certificate": doc}


def cmd_verify(args) -> tuple[int, dict]:
    space = _load_space(args.instance)
    fam = _load_maps(args.maps, space)
    doc = _read_json(args.trace)
    if isinstance(doc, dict) and "result" in doc and "certificate" in doc["result"]:
        doc = doc["result"]["certificate"]
    try:
        cert = cert_from_json(doc)
    except FormatError as exc:
        raise CliError(EXIT_INPUT, {"error": "format", "file": args.trace, "path": exc.path,
                                    "message": exc.message}) from None
    res = verify_certificate(space, fam, cert)
    return (EXIT_OK if res else EXIT_FAIL), {"valid": res.ok, "failure": res.failure,
                                             "step": res.step}


GEN_KINDS = ("example32", "equilateral", "path", "rotation3", "star", "random",
             "contraction", "tropical", "interval_pair")


def cmd_gen(args) -> tuple[int, dict]:
    kind = args.kind
    try:
        if kind == "example32":
            bundle = gen_example32(args.K)
        elif kind in ("equilateral", "path", "rotation3", "star", "random"):
            d = _rat_arg(args.d, "d") if args.d is not None else 1
            bundle = gen_named(kind, n=args.n, d=d, seed=args.seed)
        else:
            ambient = None
            if args.lo is not None or args.hi is not None:
                if args.lo is None or args.hi is None:
                    raise _bad("--lo and --hi go together")
                ambient = Box.cube(args.k, _rat_arg(args.lo, "lo"), _rat_arg(args.hi, "hi"))
            shift = _rat_list(args.shift, "shift") if args.shift else None
            ratio = _rat_arg(args.ratio, "ratio")
            bundle = gen_box(kind, k=args.k, ratio=ratio, shift=shift, ambient=ambient,
                             seed=args.seed)
    except ValueError as exc:
        raise _bad(str(exc)) from None
    inst = dict(dump_instance(bundle.space), provenance=bundle.provenance,
                expected=encode(bundle.expected))
    Path(args.output).write_text(dumps(inst), encoding="utf-8")
    result: dict[str, Any] = {"kind": kind, "instance": args.output,
                              "provenance": bundle.provenance, "expected": bundle.expected}
    if bundle.maps is not None:
        maps_out = args.maps_output or _maps_path(args.output)
        Path(maps_out).write_text(dumps(dump_maps(bundle.maps)), encoding="utf-8")
        result["maps"] = maps_out
    return EXIT_OK, result


def _maps_path(path: str) -> str:
    p = Path(path)
    stem = p.name[:-5] if p.name.endswith(".json") else p.name
    return str(p.with_name(stem + ".maps.json"))


# -- argument parsing ---------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for sampling (default 0)")
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="solver step budget")
    common.add_argument("--cap", type=int, default=DEFAULT_LATTICE_CAP,
                        help="size cap for admissible-set enumeration")
    common.add_argument("--report", help="write the JSON report here instead of stdout")

    parser = argparse.ArgumentParser(prog="orbitfix", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="parse and validate an instance")
    p.add_argument("instance")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("admissible", parents=[common], help="enumerate admissible sets")
    p.add_argument("instance")
    p.set_defaults(func=cmd_admissible)

    p = sub.add_parser("check", parents=[common], help="check a structure property")
    p.add_argument("--property", required=True,
                   help="ns | uns | urns=<c> | pq-urns=<p>,<q> | olr=<points>")
    p.add_argument("--samples", type=int, default=200, help="sampled points per box (box model)")
    p.add_argument("instance")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("map-check", parents=[common], help="check a map-level condition")
    p.add_argument("--property", required=True,
                   choices=("orbit", "interlaced", "group", "commuting", "classify"))
    p.add_argument("--mean", help="also test mean nonexpansiveness with <a>,<b> (classify)")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("instance")
    p.add_argument("maps")
    p.set_defaults(func=cmd_map_check)

    p = sub.add_parser("falsify", parents=[common], help="search for interlaced violations")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("instance")
    p.add_argument("maps")
    p.set_defaults(func=cmd_falsify)

    p = sub.add_parser("solve", parents=[common], help="search for a common fixed point")
    p.add_argument("--method", choices=("ns", "pq"), default="ns")
    p.add_argument("--p")
    p.add_argument("--q")
    p.add_argument("--eps", default=str(DEFAULT_EPS))
    p.add_argument("--samples", type=int, default=64, help="falsification samples (box model)")
    p.add_argument("--trace", help="write the certificate here")
    p.add_argument("instance")
    p.add_argument("maps")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", parents=[common], help="re-check a certificate")
    p.add_argument("instance")
    p.add_argument("maps")
    p.add_argument("trace")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", parents=[common], help="write a generated instance")
    p.add_argument("kind", choices=GEN_KINDS)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--maps-output", help="map file (default: <output stem>.maps.json)")
    p.add_argument("--K", type=int, default=2, help="depth for example32")
    p.add_argument("--n", type=int, help="number of points (finite kinds)")
    p.add_argument("--d", help="distance for equilateral")
    p.add_argument("--k", type=int, default=1, help="dimension (box kinds)")
    p.add_argument("--ratio", default="1/3", help="contraction ratio")
    p.add_argument("--shift", help="comma-separated contraction shift")
    p.add_argument("--lo", help="ambient cube lower bound")
    p.add_argument("--hi", help="ambient cube upper bound")
    p.set_defaults(func=cmd_gen)
    return parser


def _execute(args, argv: list[str]) -> tuple[int, dict]:
    try:
        code, result = args.func(args)
    except CliError as exc:
        code, result = exc.code, exc.payload
    except CapExceeded as exc:
        code, result = EXIT_BUDGET, {"error": "cap", "what": exc.what, "cap": exc.cap,
                                     "message": str(exc)}
    report = {"command": argv, "version": __version__, "seed": args.seed,
              "exit_code": code, "result": result}
    return code, report


def run(argv: Sequence[str]) -> tuple[int, dict]:
    """Execute one command; returns the exit code and the report document."""
    argv = list(argv)
    return _execute(build_parser().parse_args(argv), argv)


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse has already printed usage or version text
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    code, report = _execute(args, argv)
    text = dumps(report)
    if args.report:
        Path(args.report).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code
