"""JSON file formats for instances, map families, reports and certificates.

Every rational is written as its canonical string (``"3"``, ``"-1/3"``), so
files are exact and diff-friendly. Parsing errors carry the JSON path of the
offending entry.
"""

from __future__ import annotations

import dataclasses
import json
from fractions import Fraction
from typing import Any

from .box_space import Box, BoxSpace
from .engine import (Certificate, CommonFixedPoint, EpsilonFixedPoint, Stall, Step)
from .finite_space import FiniteSpace, build_finite_space
from .maps import (Add, BoxMap, Const, Expr, MapFamily, MapTable, Max, Min, Scale, Sub, Var,
                   Verdict)
from .rational import rat, rat_str
from .structures import StructureReport

FORMAT_VERSION = 1


class FormatError(ValueError):
    """Malformed file content; ``path`` locates the entry (e.g. ``dist[1][2]``)."""

    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path}: {message}" if path else message)
        self.message, self.path = message, path


def parse_rat(value: Any, path: str) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise FormatError(f"expected a rational string, got {value!r}", path)
    try:
        return rat(value)
    except (TypeError, ValueError):
        raise FormatError(f"not a rational: {value!r}", path) from None


def _field(obj: Any, key: str, path: str) -> Any:
    if not isinstance(obj, dict):
        raise FormatError("expected an object", path)
    if key not in obj:
        raise FormatError(f"missing field {key!r}", path)
    return obj[key]


def _rat_vector(values: Any, path: str) -> list[Fraction]:
    if not isinstance(values, list):
        raise FormatError("expected a list", path)
    return [parse_rat(v, f"{path}[{i}]") for i, v in enumerate(values)]


# -- instances ----------------------------------------------------------------


def load_instance(obj: Any) -> FiniteSpace | BoxSpace:
    """Parse an instance document. Metric failures raise ``MetricError``."""
    kind = _field(obj, "type", "")
    if kind == "finite":
        dist = _field(obj, "dist", "")
        if not isinstance(dist, list) or not all(isinstance(r, list) for r in dist):
            raise FormatError("expected a matrix", "dist")
        rows = [_rat_vector(row, f"dist[{i}]") for i, row in enumerate(dist)]
        labels = obj.get("labels")
        if labels is not None:
            if not isinstance(labels, list) or not all(isinstance(s, str) for s in labels):
                raise FormatError("expected a list of strings", "labels")
            if len(labels) != len(rows):
                raise FormatError(f"{len(labels)} labels for {len(rows)} points", "labels")
        return build_finite_space(labels, rows)
    if kind == "box":
        lo = _rat_vector(_field(obj, "lo", ""), "lo")
        hi = _rat_vector(_field(obj, "hi", ""), "hi")
        dim = _field(obj, "dim", "")
        if isinstance(dim, bool) or not isinstance(dim, int) or dim != len(lo) or dim != len(hi):
            raise FormatError("dim does not match the lo/hi vectors", "dim")
        try:
            return BoxSpace(Box(tuple(lo), tuple(hi)))
        except ValueError as exc:
            raise FormatError(str(exc), "hi") from None
    raise FormatError(f"unknown instance type {kind!r}", "type")


def dump_instance(space: FiniteSpace | BoxSpace) -> dict[str, Any]:
    if isinstance(space, FiniteSpace):
        return {"type": "finite", "labels": list(space.labels),
                "dist": [[rat_str(v) for v in row] for row in space.dist]}
    amb = space.ambient
    return {"type": "box", "dim": amb.dim, "lo": [rat_str(v) for v in amb.lo],
            "hi": [rat_str(v) for v in amb.hi]}


# -- maps ---------------------------------------------------------------------


def expr_to_json(e: Expr) -> dict[str, Any]:
    if isinstance(e, Const):
        return {"op": "const", "value": rat_str(e.value)}
    if isinstance(e, Var):
        return {"op": "var", "index": e.index}
    if isinstance(e, Add):
        return {"op": "add", "args": [expr_to_json(e.left), expr_to_json(e.right)]}
    if isinstance(e, Sub):
        return {"op": "sub", "args": [expr_to_json(e.left), expr_to_json(e.right)]}
    if isinstance(e, Scale):
        return {"op": "scale", "factor": rat_str(e.factor), "arg": expr_to_json(e.arg)}
    if isinstance(e, (Max, Min)):
        return {"op": "max" if isinstance(e, Max) else "min",
                "args": [expr_to_json(a) for a in e.args]}
    raise TypeError(f"cannot serialize {type(e).__name__}")


def expr_from_json(node: Any, path: str) -> Expr:
    op = _field(node, "op", path)
    if op == "const":
        return Const(parse_rat(_field(node, "value", path), f"{path}.value"))
    if op == "var":
        i = _field(node, "index", path)
        if isinstance(i, bool) or not isinstance(i, int) or i < 0:
            raise FormatError("variable index must be a nonnegative integer", f"{path}.index")
        return Var(i)
    if op == "scale":
        return Scale(parse_rat(_field(node, "factor", path), f"{path}.factor"),
                     expr_from_json(_field(node, "arg", path), f"{path}.arg"))
    if op in ("add", "sub", "max", "min"):
        args = _field(node, "args", path)
        if not isinstance(args, list) or not args:
            raise FormatError("expected a nonempty argument list", f"{path}.args")
        kids = [expr_from_json(a, f"{path}.args[{i}]") for i, a in enumerate(args)]
        if op in ("add", "sub"):
            if len(kids) != 2:
                raise FormatError(f"{op} takes two arguments", f"{path}.args")
            return (Add if op == "add" else Sub)(kids[0], kids[1])
        return (Max if op == "max" else Min)(tuple(kids))
    raise FormatError(f"unknown expression node {op!r}", f"{path}.op")


def load_maps(obj: Any, space: FiniteSpace | BoxSpace) -> MapFamily:
    """Parse a map document and check it against ``space``."""
    items = _field(obj, "maps", "")
    if not isinstance(items, list) or not items:
        raise FormatError("expected a nonempty list of maps", "maps")
    maps = []
    for i, m in enumerate(items):
        path = f"maps[{i}]"
        kind = _field(m, "kind", path)
        name = m.get("name", "")
        if kind == "table":
            if not isinstance(space, FiniteSpace):
                raise FormatError("table maps need a finite instance", f"{path}.kind")
            images = _field(m, "images", path)
            if not isinstance(images, list) or len(images) != space.n:
                raise FormatError(f"expected {space.n} images", f"{path}.images")
            for j, v in enumerate(images):
                if isinstance(v, bool) or not isinstance(v, int) or not (0 <= v < space.n):
                    raise FormatError(f"image {v!r} is not a point index", f"{path}.images[{j}]")
            maps.append(MapTable(tuple(images), name))
        elif kind == "expr":
            if not isinstance(space, BoxSpace):
                raise FormatError("expression maps need a box instance", f"{path}.kind")
            coords = _field(m, "coords", path)
            if not isinstance(coords, list):
                raise FormatError("expected a list of expressions", f"{path}.coords")
            T = BoxMap(tuple(expr_from_json(c, f"{path}.coords[{j}]")
                             for j, c in enumerate(coords)), name)
            try:
                T.check_arity(space.dim)
            except ValueError as exc:
                raise FormatError(str(exc), f"{path}.coords") from None
            maps.append(T)
        else:
            raise FormatError(f"unknown map kind {kind!r}", f"{path}.kind")
    flags = obj.get("family", {})
    if not isinstance(flags, dict):
        raise FormatError("expected an object", "family")
    for key in ("group", "commuting"):
        if not isinstance(flags.get(key, False), bool):
            raise FormatError("expected a boolean", f"family.{key}")
    return MapFamily(tuple(maps), group=flags.get("group", False),
                     commuting=flags.get("commuting", False))


def dump_maps(family: MapFamily) -> dict[str, Any]:
    out = []
    for m in family:
        if isinstance(m, MapTable):
            item = {"kind": "table", "images": list(m.images)}
        else:
            item = {"kind": "expr", "coords": [expr_to_json(c) for c in m.coords]}
        if m.name:
            item["name"] = m.name
        out.append(item)
    return {"maps": out, "family": {"group": family.group, "commuting": family.commuting}}


# -- generic encoding ---------------------------------------------------------


def encode(value: Any) -> Any:
    """Plain-JSON form of library values (Fractions become strings)."""
    if value is None or isinstance(value, (bool, int, str)):
        return value
    if isinstance(value, Fraction):
        return rat_str(value)
    if isinstance(value, Box):
        return {"lo": [rat_str(v) for v in value.lo], "hi": [rat_str(v) for v in value.hi]}
    if isinstance(value, (frozenset, set)):
        return sorted(encode(v) for v in value)
    if isinstance(value, (list, tuple)):
        return [encode(v) for v in value]
    if isinstance(value, dict):
        return {str(k): encode(v) for k, v in value.items()}
    if isinstance(value, Verdict):
        state = {True: "holds", False: "fails", None: "inconclusive"}[value.holds]
        return {"holds": value.holds, "verdict": state, "witness": encode(value.witness),
                "detail": value.detail, "stats": encode(value.stats)}
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {f.name: encode(getattr(value, f.name)) for f in dataclasses.fields(value)}
    raise TypeError(f"cannot encode {type(value).__name__}")


def dumps(doc: Any) -> str:
    """Deterministic JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(encode(doc), sort_keys=True, indent=2) + "\n"


# -- certificates -------------------------------------------------------------

_SET_KEYS = {"set", "candidate", "hull1", "hull2", "base"}
_POINT_KEYS = {"point", "image", "x", "y"}
_RAT_KEYS = {"lhs", "rhs", "rhs_upper", "delta", "target", "limit"}


def _decode_set(value: Any, model: str, path: str):
    if value is None:
        return None
    if model == "finite":
        if not isinstance(value, list) or not all(
                isinstance(v, int) and not isinstance(v, bool) for v in value):
            raise FormatError("expected a list of point indices", path)
        return frozenset(value)
    lo = _rat_vector(_field(value, "lo", path), f"{path}.lo")
    hi = _rat_vector(_field(value, "hi", path), f"{path}.hi")
    try:
        return Box(tuple(lo), tuple(hi))
    except ValueError as exc:
        raise FormatError(str(exc), path) from None


def _decode_point(value: Any, model: str, path: str):
    if value is None:
        return None
    if model == "finite":
        if isinstance(value, bool) or not isinstance(value, int):
            raise FormatError("expected a point index", path)
        return value
    return tuple(_rat_vector(value, path))


def _decode_opt_rat(value: Any, path: str):
    return None if value is None else parse_rat(value, path)


def _decode_witness(w: Any, model: str, path: str) -> dict[str, Any]:
    if not isinstance(w, dict):
        raise FormatError("expected an object", path)
    out = {}
    for k, v in w.items():
        sub = f"{path}.{k}"
        if k in _SET_KEYS and v is not None:
            out[k] = _decode_set(v, model, sub)
        elif k in _POINT_KEYS and v is not None:
            out[k] = _decode_point(v, model, sub)
        elif k in _RAT_KEYS and v is not None:
            out[k] = parse_rat(v, sub)
        else:
            out[k] = v
    return out


def cert_to_json(cert: Certificate) -> dict[str, Any]:
    doc = encode(cert)
    doc["format"] = FORMAT_VERSION
    return doc


def cert_from_json(doc: Any) -> Certificate:
    model = _field(doc, "model", "")
    if model not in ("finite", "box"):
        raise FormatError(f"unknown model {model!r}", "model")
    trace = []
    raw_trace = _field(doc, "trace", "")
    if not isinstance(raw_trace, list):
        raise FormatError("expected a list", "trace")
    for i, s in enumerate(raw_trace):
        path = f"trace[{i}]"
        idx = _field(s, "index", path)
        nested = _field(s, "nested", path)
        trace.append(Step(
            index=idx, kind=_field(s, "kind", path),
            set=_decode_set(_field(s, "set", path), model, f"{path}.set"),
            delta=parse_rat(_field(s, "delta", path), f"{path}.delta"),
            certification=_field(s, "certification", path), nested=nested,
            center=_decode_point(s.get("center"), model, f"{path}.center"),
            radius=_decode_opt_rat(s.get("radius"), f"{path}.radius"),
            base=_decode_set(s.get("base"), model, f"{path}.base"),
            p=_decode_opt_rat(s.get("p"), f"{path}.p"),
            q=_decode_opt_rat(s.get("q"), f"{path}.q"),
            cond1=s.get("cond1"), cond2=s.get("cond2")))
    out = _field(doc, "outcome", "")
    kind = _field(out, "kind", "outcome")
    if kind == "common_fixed_point":
        outcome = CommonFixedPoint(_decode_point(_field(out, "point", "outcome"), model,
                                                 "outcome.point"))
    elif kind == "epsilon_fixed_point":
        outcome = EpsilonFixedPoint(
            _decode_point(_field(out, "point", "outcome"), model, "outcome.point"),
            parse_rat(_field(out, "radius", "outcome"), "outcome.radius"),
            parse_rat(_field(out, "residual", "outcome"), "outcome.residual"))
    elif kind == "stall":
        outcome = Stall(_field(out, "reason", "outcome"),
                        _decode_witness(out.get("witness", {}), model, "outcome.witness"))
    else:
        raise FormatError(f"unknown outcome kind {kind!r}", "outcome.kind")
    budget = _field(doc, "budget", "")
    if isinstance(budget, bool) or not isinstance(budget, int):
        raise FormatError("expected an integer", "budget")
    cert = Certificate(model, _field(doc, "method", ""), outcome, trace,
                       parse_rat(_field(doc, "eps", ""), "eps"), budget,
                       _decode_opt_rat(doc.get("p"), "p"), _decode_opt_rat(doc.get("q"), "q"))
    if doc.get("fix_set") is not None:
        cert.fix_set = _decode_set(doc["fix_set"], model, "fix_set")
    olr = doc.get("one_local_retract")
    if olr is not None:
        cert.one_local_retract = StructureReport(
            _field(olr, "property", "one_local_retract"), _field(olr, "holds", "one_local_retract"),
            olr.get("params", {}), olr.get("witnesses", []), olr.get("counterexample"),
            olr.get("note", ""))
    cert.notes = list(doc.get("notes", []))
    return cert
