"""Exact rationals and rational literal parsing.

``Rat`` is :class:`fractions.Fraction`; it already keeps numerator and
denominator coprime with a positive denominator.
"""
from __future__ import annotations

from fractions import Fraction
from math import ceil, floor
from typing import Union

Rat = Fraction
RatLike = Union[int, Fraction]


def rat_normalize(num: int, den: int = 1) -> Fraction:
    """Return ``num/den`` in lowest terms with ``den > 0``."""
    if den == 0:
        raise ZeroDivisionError("division by zero")
    return Fraction(num, den)


def as_rat(value: RatLike | str) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rat(value)
    raise TypeError(f"not a rational: {value!r}")


def parse_rat(text: str) -> Fraction:
    """Parse ``"p"``, ``"p/q"`` or a finite decimal such as ``"1e-8"`` exactly."""
    text = text.strip()
    if not text:
        raise ValueError("empty rational literal")
    if "/" in text:
        p, q = text.split("/", 1)
        return rat_normalize(int(p), int(q))
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad rational literal {text!r}") from exc


def simplest_between(lo: Fraction, hi: Fraction) -> Fraction:
    """Smallest-denominator rational in the closed interval ``[lo, hi]``."""
    if lo > hi:
        lo, hi = hi, lo
    if lo <= 0 <= hi:
        return Fraction(0)
    if hi < 0:
        return -simplest_between(-hi, -lo)
    fl = floor(lo)
    if fl == lo:
        return Fraction(fl)
    if fl + 1 <= hi:
        return Fraction(fl + 1)
    # lo, hi share the integer part; recurse on reciprocals of the fractional parts
    inner = simplest_between(1 / (hi - fl), 1 / (lo - fl))
    return fl + 1 / inner


def rat_to_decimal(x: Fraction, digits: int, upward: bool = False) -> str:
    """Decimal rendering to ``digits`` places, rounded down (or up if ``upward``).

    Directed rounding keeps a rendered enclosure ``[lo, hi]`` an enclosure.
    """
    scale = 10**digits
    q = ceil(x * scale) if upward else floor(x * scale)
    sign = "-" if q < 0 else ""
    q = abs(q)
    whole, frac = divmod(q, scale)
    if digits == 0:
        return f"{sign}{whole}"
    return f"{sign}{whole}.{frac:0{digits}d}"
