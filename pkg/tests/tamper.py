"""Single-field corruptions of a certificate, for the verifier tests."""

import copy
import dataclasses
from fractions import Fraction

from orbitfix.box_space import Box
from orbitfix.engine import CONTRACT, ENCLOSED, EXACT

STEP_FIELDS = ("index", "kind", "set", "delta", "certification", "nested", "center",
               "radius", "base", "p", "q", "cond1", "cond2")


def _bump(value, model):
    """A different value of the same general shape."""
    if isinstance(value, bool):
        return not value
    if value is None:
        return Fraction(1, 7)
    if isinstance(value, int):
        return value + 1
    if isinstance(value, Fraction):
        return value + Fraction(1, 7)
    if isinstance(value, str):
        for other in ("descend", "ns", "pq", EXACT, ENCLOSED, CONTRACT):
            if other != value:
                return other
    if isinstance(value, frozenset):
        return frozenset(value | {0}) if 0 not in value else frozenset(value - {0}) or frozenset({1})
    if isinstance(value, Box):
        return Box(value.lo, tuple(v + Fraction(1, 7) for v in value.hi))
    if isinstance(value, tuple):
        return tuple(v + Fraction(1, 7) for v in value)
    raise TypeError(type(value))


def step_tamperings(cert):
    """Yield ``(step index, field, tampered copy)`` for every field of every step."""
    for i, step in enumerate(cert.trace):
        for name in STEP_FIELDS:
            bad = copy.deepcopy(cert)
            s = bad.trace[i]
            setattr(s, name, _bump(getattr(s, name), cert.model))
            yield i, name, bad


def outcome_tamperings(cert):
    for f in dataclasses.fields(cert.outcome):
        if f.name == "kind":
            continue
        value = getattr(cert.outcome, f.name)
        if isinstance(value, dict):
            continue
        bad = copy.deepcopy(cert)
        setattr(bad.outcome, f.name, _bump(value, cert.model))
        yield f.name, bad
