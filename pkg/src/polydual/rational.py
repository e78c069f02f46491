"""Exact rational scalars and small vector helpers.

Public values are :class:`fractions.Fraction`; the LP and elimination kernels
convert to ``gmpy2.mpq`` internally for speed.  Extended reals are plain
Fractions plus ``math.inf`` / ``-math.inf``.
"""
from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Sequence, Union

from gmpy2 import mpq

from .errors import InputError

Vector = tuple  # tuple[Fraction, ...]
ExtReal = Union[Fraction, float]
INF = math.inf

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")


def rational(value) -> Fraction:
    """Coerce ``value`` to an exact Fraction.

    Accepts ints, Fractions, mpq and strings ``"p"`` / ``"p/q"``.  Floats are
    rejected: every input to the exact path must already be rational.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InputError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, type(mpq())):
        return Fraction(int(value.numerator), int(value.denominator))
    if isinstance(value, str):
        m = _RATIONAL_RE.match(value)
        if not m:
            raise InputError(f"malformed rational literal {value!r}")
        num, den = int(m.group(1)), int(m.group(2) or 1)
        if den == 0:
            raise InputError(f"zero denominator in {value!r}")
        return Fraction(num, den)
    raise InputError(f"not a rational: {value!r} ({type(value).__name__})")


def vector(values: Iterable) -> tuple:
    return tuple(rational(v) for v in values)


def zeros(n: int) -> tuple:
    return (Fraction(0),) * n


def unit(n: int, i: int) -> tuple:
    return tuple(Fraction(1 if j == i else 0) for j in range(n))


def dot(a: Sequence, b: Sequence):
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def vadd(a: Sequence, b: Sequence) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def vsub(a: Sequence, b: Sequence) -> tuple:
    return tuple(x - y for x, y in zip(a, b))


def vscale(t, a: Sequence) -> tuple:
    return tuple(t * x for x in a)


def vneg(a: Sequence) -> tuple:
    return tuple(-x for x in a)


def is_zero(a: Sequence) -> bool:
    return all(x == 0 for x in a)


def to_mpq(values: Iterable) -> list:
    return [mpq(v.numerator, v.denominator) if isinstance(v, Fraction) else mpq(v) for v in values]


def from_mpq(values: Iterable) -> tuple:
    return tuple(Fraction(int(v.numerator), int(v.denominator)) for v in values)


def fmt(q) -> str:
    """Render an extended real as ``p``, ``p/q``, ``inf`` or ``-inf``."""
    if isinstance(q, float):
        if q == INF:
            return "inf"
        if q == -INF:
            return "-inf"
        raise InputError(f"unexpected float {q!r} in exact path")
    q = rational(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def fmt_vec(v: Sequence) -> str:
    return "(" + " ".join(fmt(x) for x in v) + ")"


def primitive(coeffs: Sequence[Fraction], rhs: Fraction | None = None):
    """Scale a row by a positive factor to coprime integers (stable canonical form)."""
    items = list(coeffs) + ([rhs] if rhs is not None else [])
    den = 1
    for q in items:
        den = den * q.denominator // math.gcd(den, q.denominator)
    ints = [int(q * den) for q in items]
    g = 0
    for k in ints:
        g = math.gcd(g, k)
    if g == 0:
        g = 1
    out = tuple(Fraction(k // g) for k in ints)
    if rhs is None:
        return out
    return out[:-1], out[-1]
