"""Exact rational helpers.

Every quantity that takes part in a floor or an inequality is held as a
:class:`fractions.Fraction`. Floats are routed through their shortest decimal
repr so ``0.3`` becomes ``3/10`` rather than the nearest binary double.
"""
from decimal import Decimal
from fractions import Fraction
from numbers import Rational

__all__ = ["as_fraction", "to_decimal_str", "fmt_float"]


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not numeric inputs")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, Decimal):
        if not value.is_finite():
            raise ValueError(f"non-finite value {value}")
        return Fraction(value)
    if isinstance(value, float):
        if value != value or value in (float("inf"), float("-inf")):
            raise ValueError(f"non-finite value {value}")
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


def _is_terminating(q: Fraction) -> bool:
    d = q.denominator
    for p in (2, 5):
        while d % p == 0:
            d //= p
    return d == 1


def to_decimal_str(q) -> str:
    """Exact decimal string when the fraction terminates, ``"n/d"`` otherwise."""
    q = as_fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    if not _is_terminating(q):
        return f"{q.numerator}/{q.denominator}"
    # scale to 10**e so the quotient is an integer
    e = 0
    d = q.denominator
    while d != 1:
        if d % 10 == 0:
            d //= 10
        elif d % 2 == 0:
            d //= 2
        else:
            d //= 5
        e += 1
    digits = abs(q.numerator) * 10**e // q.denominator
    sign = "-" if q < 0 else ""
    s = str(digits).rjust(e + 1, "0")
    whole, frac = s[:-e], s[-e:].rstrip("0")
    return f"{sign}{whole}.{frac}" if frac else f"{sign}{whole}"


def fmt_float(value, sig: int = 10) -> str:
    """Fixed-width-free, deterministic float rendering used by every report."""
    if value is None:
        return ""
    return format(float(value), f".{sig}g")
