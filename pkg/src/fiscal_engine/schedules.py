"""Tax schedules: proportional, progressive, regressive and fixed.

A :class:`TaxSchedule` wraps one of four kinds plus an optional non-taxable
minimum. Bracket bounds and fixed amounts are minor units; rates are exact
fractions. ``evaluate`` rounds half-up once, at the end.
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence, Union

from .errors import CurrencyMismatchError, DataError, DomainError, ValidationError
from .money import round_half_up, to_fraction

MARGINAL = "marginal"
SLAB = "slab"
BRACKET_MODES = (MARGINAL, SLAB)

_CURRENCY_RE = re.compile(r"^[A-Z]{3}$")


@dataclass(frozen=True)
class Bracket:
    lower: int
    upper: Optional[int]  # None = unbounded
    rate: Fraction

    def __post_init__(self):
        object.__setattr__(self, "rate", to_fraction(self.rate))

    def contains(self, amount: int | Fraction) -> bool:
        return self.lower <= amount and (self.upper is None or amount < self.upper)


@dataclass(frozen=True)
class Proportional:
    rate: Fraction

    def __post_init__(self):
        object.__setattr__(self, "rate", to_fraction(self.rate))


@dataclass(frozen=True)
class Progressive:
    brackets: tuple[Bracket, ...]
    mode: str = MARGINAL

    def __post_init__(self):
        object.__setattr__(self, "brackets", tuple(self.brackets))


@dataclass(frozen=True)
class Regressive:
    brackets: tuple[Bracket, ...]
    mode: str = MARGINAL

    def __post_init__(self):
        object.__setattr__(self, "brackets", tuple(self.brackets))


@dataclass(frozen=True)
class Fixed:
    """A flat amount per activity category, owed whenever the taxable base is positive."""

    amounts: tuple[tuple[str, int], ...]

    def __post_init__(self):
        amounts = self.amounts
        if isinstance(amounts, Mapping):
            amounts = amounts.items()
        object.__setattr__(self, "amounts", tuple(sorted((str(k), int(v)) for k, v in amounts)))

    def amount_for(self, category: str | None) -> int:
        table = dict(self.amounts)
        if category is None:
            if len(table) == 1:
                return next(iter(table.values()))
            raise DataError("fixed schedule needs an activity category")
        try:
            return table[category]
        except KeyError:
            raise DataError(f"unknown activity category {category!r}") from None


ScheduleKind = Union[Proportional, Progressive, Regressive, Fixed]


@dataclass(frozen=True)
class TaxSchedule:
    kind: ScheduleKind
    non_taxable_minimum: int = 0
    currency: str = "GEL"
    name: str = field(default="", compare=False)

    @property
    def top_rate(self) -> Fraction:
        if isinstance(self.kind, Proportional):
            return self.kind.rate
        if isinstance(self.kind, (Progressive, Regressive)):
            return max(b.rate for b in self.kind.brackets)
        raise DomainError("fixed schedules have no rate")


def proportional(rate, minimum: int = 0, currency: str = "GEL", name: str = "") -> TaxSchedule:
    return TaxSchedule(Proportional(rate), minimum, currency, name)


def brackets_from_bounds(bounds: Sequence[int], rates: Sequence) -> tuple[Bracket, ...]:
    """``bounds=[0, 200, 350]`` with four rates gives four contiguous brackets, last unbounded."""
    if len(bounds) != len(rates):
        raise DataError("need one lower bound per rate")
    uppers = list(bounds[1:]) + [None]
    return tuple(Bracket(lo, up, r) for lo, up, r in zip(bounds, uppers, rates))


def progressive(bounds, rates, minimum: int = 0, currency: str = "GEL", mode: str = MARGINAL,
                name: str = "") -> TaxSchedule:
    return TaxSchedule(Progressive(brackets_from_bounds(bounds, rates), mode), minimum, currency, name)


def regressive(bounds, rates, minimum: int = 0, currency: str = "GEL", mode: str = MARGINAL,
               name: str = "") -> TaxSchedule:
    return TaxSchedule(Regressive(brackets_from_bounds(bounds, rates), mode), minimum, currency, name)


def validate(schedule: TaxSchedule) -> list[str]:
    """Return every violated invariant; an empty list means the schedule is well formed."""
    return list(_violations(schedule))


@functools.lru_cache(maxsize=256)
def _violations(schedule: TaxSchedule) -> tuple[str, ...]:
    problems: list[str] = []
    if schedule.non_taxable_minimum < 0:
        problems.append("non-taxable minimum is negative")
    if not _CURRENCY_RE.match(schedule.currency or ""):
        problems.append(f"currency {schedule.currency!r} is not a 3-letter ISO code")

    kind = schedule.kind
    if isinstance(kind, Proportional):
        if not 0 <= kind.rate <= 1:
            problems.append(f"rate {kind.rate} outside [0, 1]")
    elif isinstance(kind, (Progressive, Regressive)):
        problems.extend(_bracket_violations(kind))
    elif isinstance(kind, Fixed):
        if not kind.amounts:
            problems.append("fixed schedule has no categories")
        for category, amount in kind.amounts:
            if amount < 0:
                problems.append(f"fixed amount for {category!r} is negative")
    else:
        problems.append(f"unknown schedule kind {type(kind).__name__}")
    return tuple(problems)


def _bracket_violations(kind: Progressive | Regressive) -> list[str]:
    problems = []
    brackets = kind.brackets
    if kind.mode not in BRACKET_MODES:
        problems.append(f"unknown bracket mode {kind.mode!r}")
    if isinstance(kind, Regressive) and kind.mode == SLAB:
        # whole-base slab taxation with falling rates makes tax drop at each bound
        problems.append("slab mode on a regressive schedule is non-monotone")
    if not brackets:
        return problems + ["schedule has no brackets"]
    if brackets[0].lower != 0:
        problems.append(f"first bracket starts at {brackets[0].lower}, not 0")
    for i, b in enumerate(brackets):
        if not 0 <= b.rate <= 1:
            problems.append(f"bracket {i} rate {b.rate} outside [0, 1]")
        if b.upper is not None and b.lower >= b.upper:
            problems.append(f"bracket {i} is empty or inverted: [{b.lower}, {b.upper})")
        if b.upper is None and i != len(brackets) - 1:
            problems.append(f"bracket {i} is unbounded but not last")
    for i, (a, b) in enumerate(zip(brackets, brackets[1:])):
        if a.upper is None:
            continue
        if b.lower > a.upper:
            problems.append(f"gap at [{a.upper},{b.lower})")
        elif b.lower < a.upper:
            problems.append(f"overlap at [{b.lower},{a.upper})")
        if isinstance(kind, Progressive) and b.rate < a.rate:
            problems.append(f"non-monotone rates: bracket {i + 1} rate {b.rate} < {a.rate}")
        if isinstance(kind, Regressive) and b.rate > a.rate:
            problems.append(f"non-monotone rates: bracket {i + 1} rate {b.rate} > {a.rate}")
    return problems


def _check(schedule: TaxSchedule, base: int, currency: str | None) -> None:
    if base < 0:
        raise DomainError(f"negative base {base}")
    if currency is not None and currency != schedule.currency:
        raise CurrencyMismatchError(f"base in {currency}, schedule in {schedule.currency}")
    problems = _violations(schedule)
    if problems:
        raise ValidationError(f"malformed schedule {schedule.name or ''}".strip(), problems)


def evaluate_exact(schedule: TaxSchedule, base: int, currency: str | None = None,
                   category: str | None = None) -> Fraction:
    """Tax on ``base`` as an exact fraction of minor units."""
    _check(schedule, base, currency)
    taxable = max(0, base - schedule.non_taxable_minimum)
    kind = schedule.kind
    if isinstance(kind, Proportional):
        return kind.rate * taxable
    if isinstance(kind, Fixed):
        return Fraction(kind.amount_for(category)) if taxable > 0 else Fraction(0)
    if kind.mode == SLAB:
        for b in kind.brackets:
            if b.contains(taxable):
                return b.rate * taxable
    total = Fraction(0)
    for b in kind.brackets:
        if taxable <= b.lower:
            break
        top = taxable if b.upper is None else min(taxable, b.upper)
        total += b.rate * (top - b.lower)
    return total


def evaluate(schedule: TaxSchedule, base: int, currency: str | None = None,
             category: str | None = None) -> int:
    """Tax owed on ``base`` minor units, rounded half-up to a minor unit.

    The non-taxable minimum is subtracted from the base first (floored at 0).
    Progressive and regressive schedules tax each bracket slice at its own rate
    unless the schedule is in slab mode. Raises :class:`DomainError` for a
    negative base and :class:`ValidationError` for a malformed schedule.
    """
    return round_half_up(evaluate_exact(schedule, base, currency, category))


def effective_rate(schedule: TaxSchedule, base: int, currency: str | None = None) -> Fraction:
    if base == 0:
        raise DomainError("effective rate undefined at base 0")
    return evaluate_exact(schedule, base, currency) / base


# Shipped schedules -------------------------------------------------------

GEORGIA_FLAT_INCOME = proportional(Fraction(20, 100), name="GE income tax 20%")

# Bounds are 0/200/350/600 GEL; the source text's 359 vs 351 overlap is repaired to 350.
GEORGIA_INCOME_2004 = progressive(
    [0, 200_00, 350_00, 600_00],
    [Fraction(12, 100), Fraction(15, 100), Fraction(17, 100), Fraction(20, 100)],
    name="GE income tax 2004 (historical)",
)
