"""Exact rational and integer-root helpers.

Every threshold and density in the package is a :class:`fractions.Fraction`;
this module holds the parsing/formatting conventions (``p/q`` strings) and
the integer-root routines needed to evaluate quantities such as
``ceil(k ** (p/q))`` without floating point.
"""
from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Union

Rat = Fraction
Number = Union[int, Fraction]

_RAT_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


class RationalFormatError(ValueError):
    """Raised for decimal or otherwise malformed rational literals."""


def parse_rat(text: str) -> Fraction:
    """Parse ``p/q`` or a bare integer. Decimals are rejected."""
    m = _RAT_RE.match(text)
    if m is None:
        raise RationalFormatError(f"malformed rational {text!r}; expected p/q")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise RationalFormatError(f"zero denominator in {text!r}")
    return Fraction(num, den)


def fmt_rat(value: Number) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def iroot(n: int, q: int) -> int:
    """Largest z >= 0 with z**q <= n."""
    if n < 0 or q < 1:
        raise ValueError("iroot needs n >= 0 and q >= 1")
    if q == 1 or n < 2:
        return n
    if q == 2:
        return math.isqrt(n)
    # Newton from an overestimate; bit length keeps the start exact.
    z = 1 << -(-n.bit_length() // q)
    while True:
        nxt = ((q - 1) * z + n // z ** (q - 1)) // q
        if nxt >= z:
            break
        z = nxt
    while z ** q > n:
        z -= 1
    while (z + 1) ** q <= n:
        z += 1
    return z


def ceil_root(n: int, q: int) -> int:
    """Smallest z >= 0 with z**q >= n."""
    z = iroot(n, q)
    return z if z ** q >= n else z + 1


def ceil_rational_power(k: int, p: int, q: int) -> int:
    """min { z : z**q >= k**p }, i.e. ceil(k ** (p/q)) in exact arithmetic."""
    if k < 1 or p < 0 or q < 1:
        raise ValueError("ceil_rational_power needs k >= 1, p >= 0, q >= 1")
    return ceil_root(k ** p, q)


def floor_rational_root(value: Fraction, t: int) -> int:
    """max { z >= 0 : z**t <= value } for a nonnegative rational."""
    value = Fraction(value)
    if value < 0:
        raise ValueError("negative radicand")
    return iroot(value.numerator // value.denominator, t)


def ceil_frac(value: Number) -> int:
    return math.ceil(Fraction(value))


def _power_product(terms: Iterable[tuple[Number, Number]], scale: int) -> Fraction:
    out = Fraction(1)
    for base, exp in terms:
        e = Fraction(exp) * scale
        assert e.denominator == 1
        out *= Fraction(base) ** int(e)
    return out


def power_leq(lhs: Iterable[tuple[Number, Number]], rhs: Iterable[tuple[Number, Number]]) -> bool:
    """Compare products of positive rationals raised to rational exponents.

    ``lhs`` and ``rhs`` are sequences of ``(base, exponent)``. Both sides are
    raised to the common denominator of all exponents, which is monotone on
    positive reals, so the comparison is exact.
    """
    lhs, rhs = list(lhs), list(rhs)
    for base, _ in lhs + rhs:
        if Fraction(base) <= 0:
            raise ValueError("bases must be positive")
    scale = 1
    for _, exp in lhs + rhs:
        d = Fraction(exp).denominator
        scale = scale * d // math.gcd(scale, d)
    return _power_product(lhs, scale) <= _power_product(rhs, scale)
