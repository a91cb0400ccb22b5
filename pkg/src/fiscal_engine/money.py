"""Money and rate helpers.

Amounts are plain ``int`` values in minor units (tetri, cents, pence).
Rates and intermediate results are :class:`fractions.Fraction`, so nothing
is rounded until an operation hands back its final amount.
"""

from __future__ import annotations

from decimal import Decimal, InvalidOperation
from fractions import Fraction
from numbers import Rational

from .errors import DomainError

MINOR_PER_MAJOR = 100

Rate = Fraction


def round_half_up(value: Fraction | int) -> int:
    """Round an exact amount of minor units to the nearest integer, ties away from zero."""
    value = Fraction(value)
    if value >= 0:
        return int((value + Fraction(1, 2)) // 1)
    return -int((-value + Fraction(1, 2)) // 1)


def to_fraction(value: object) -> Fraction:
    """Exact conversion of a rate-like value; floats go through ``repr`` so 0.18 means 18/100."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise DomainError(f"not a number: {value!r}")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(Decimal(repr(value)))
    if isinstance(value, Decimal):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if text.endswith("%"):
            return to_fraction(text[:-1]) / 100
        try:
            return Fraction(Decimal(text))
        except InvalidOperation:
            pass
        try:
            return Fraction(text)
        except ValueError as exc:
            raise DomainError(f"not a number: {value!r}") from exc
    raise DomainError(f"not a number: {value!r}")


def parse_money(value: object) -> int:
    """Parse a major-unit amount ("125.00", 125, 125.5) into minor units.

    More than two fraction digits is rejected rather than silently rounded.
    """
    if isinstance(value, bool):
        raise DomainError(f"not a money amount: {value!r}")
    if isinstance(value, int):
        return value * MINOR_PER_MAJOR
    if isinstance(value, float):
        value = repr(value)
    if isinstance(value, str):
        try:
            value = Decimal(value.strip().replace("_", ""))
        except InvalidOperation as exc:
            raise DomainError(f"not a money amount: {value!r}") from exc
    if not isinstance(value, Decimal) or not value.is_finite():
        raise DomainError(f"not a money amount: {value!r}")
    minor = value * MINOR_PER_MAJOR
    if minor != minor.to_integral_value():
        raise DomainError(f"more than two fraction digits: {value}")
    return int(minor)


def format_money(minor: int) -> str:
    """Render minor units as a decimal string with exactly two fraction digits."""
    sign = "-" if minor < 0 else ""
    major, cents = divmod(abs(int(minor)), MINOR_PER_MAJOR)
    return f"{sign}{major}.{cents:02d}"


def gel(major: str | int | float) -> int:
    """Shorthand for tests and fixtures: ``gel("125.00") == 12500``."""
    return parse_money(major)


def format_rate(rate: Fraction) -> str:
    """Shortest exact decimal for a rate, falling back to a ratio if it does not terminate."""
    rate = Fraction(rate)
    den = rate.denominator
    for p in (2, 5):
        while den % p == 0:
            den //= p
    if den != 1:
        return f"{rate.numerator}/{rate.denominator}"
    text = format(Decimal(rate.numerator) / Decimal(rate.denominator), "f")
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    return text
