"""Exact rational scalars.

Every distance, radius and diameter in the package is a
:class:`fractions.Fraction`. Floats are refused at the boundary because the
structure checks compare quantities with strict inequalities.
"""

from fractions import Fraction
from numbers import Rational
from typing import Union

Rat = Fraction
RatLike = Union[int, str, Fraction]

ZERO = Fraction(0)
ONE = Fraction(1)


def rat(value: RatLike) -> Fraction:
    """Coerce ``value`` to an exact Fraction.

    Accepts ints, Fractions and strings such as ``"3"``, ``"-1/3"`` or
    ``"0.25"`` (decimal strings are exact). Floats and bools are rejected.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational: {value!r}") from exc
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def rat_str(value: Fraction) -> str:
    """Canonical string: reduced, sign on the numerator, ``"p"`` when q == 1."""
    return str(Fraction(value))


def mid(a: Fraction, b: Fraction) -> Fraction:
    return (a + b) / 2
