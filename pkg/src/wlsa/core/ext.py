"""Rationals extended with a single positive infinity."""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Union


class _Infinity:
    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())

    def __hash__(self):
        return hash("wlsa-inf")

    def __eq__(self, other):
        return other is self

    def __ne__(self, other):
        return other is not self

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __mul__(self, other):
        if other is self:
            return self
        if other == 0:
            return Fraction(0)
        if other < 0:
            raise ValueError("negative multiple of infinity")
        return self

    __rmul__ = __mul__


INF = _Infinity()

ExtRational = Union[Fraction, _Infinity]

_INT = re.compile(r"-?(0|[1-9][0-9]*)$")
_FRAC = re.compile(r"(-?)([1-9][0-9]*)/([1-9][0-9]*)$")


def is_inf(v) -> bool:
    return v is INF


def ext(v) -> ExtRational:
    """Coerce ints, Fractions, INF and serialized strings to an ExtRational."""
    if v is INF:
        return v
    if isinstance(v, str):
        return parse_value(v)
    if isinstance(v, bool):
        raise TypeError("booleans are not values")
    if isinstance(v, (int, Fraction)):
        return Fraction(v)
    raise TypeError(f"not a rational value: {v!r}")


def parse_value(text: str) -> ExtRational:
    """Parse ``"inf"``, ``"p/q"`` or an integer string; non-canonical forms are rejected."""
    s = text.strip()
    if s == "inf":
        return INF
    if _INT.match(s):
        if s == "-0":
            raise ValueError(f"non-canonical rational {text!r}")
        return Fraction(int(s))
    m = _FRAC.match(s)
    if not m:
        raise ValueError(f"malformed rational {text!r}")
    p, q = int(m.group(2)), int(m.group(3))
    f = Fraction(p, q)
    if q == 1 or f.numerator != p:
        raise ValueError(f"non-canonical rational {text!r}")
    return -f if m.group(1) else f


def format_value(v: ExtRational) -> str:
    if v is INF:
        return "inf"
    v = Fraction(v)
    if v.denominator == 1:
        return str(v.numerator)
    return f"{v.numerator}/{v.denominator}"


def ext_mul(weight, cost) -> ExtRational:
    """``weight * cost`` with the convention ``0 * inf = 0``."""
    if cost is INF:
        return INF * weight
    if weight is INF:
        return INF * cost
    return Fraction(weight) * cost


def ext_sum(values) -> ExtRational:
    total = Fraction(0)
    for v in values:
        if v is INF:
            return INF
        total += v
    return total
