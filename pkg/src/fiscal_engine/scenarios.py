"""Policy comparisons: comparator-country income-tax schedules and a
Laffer-style rate sweep.

Comparator schedules are two-bracket approximations: the lowest statutory
rate up to a pivot, the top rate above it, after the country's non-taxable
minimum. Only the rate spans and minimums are known; the pivots are
placeholders and every comparator is flagged as an approximation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence, Union

import numpy as np

from . import schedules
from .errors import CurrencyMismatchError, ValidationError
from .money import to_fraction
from .schedules import TaxSchedule

DEFAULT_GAMMA = 1 / 0.35 - 1


@dataclass(frozen=True)
class ComparatorSchedule:
    country: str
    min_rate: Fraction
    max_rate: Fraction
    non_taxable_minimum: int
    currency: str
    pivot: int
    approximation: bool = True

    def __post_init__(self):
        object.__setattr__(self, "min_rate", to_fraction(self.min_rate))
        object.__setattr__(self, "max_rate", to_fraction(self.max_rate))
        problems = []
        if self.min_rate > self.max_rate:
            problems.append("min rate above max rate")
        if self.non_taxable_minimum < 0:
            problems.append("non-taxable minimum is negative")
        if self.pivot <= 0:
            problems.append("pivot must be positive")
        if problems:
            raise ValidationError(f"comparator {self.country}", problems)

    @property
    def schedule(self) -> TaxSchedule:
        label = f"{self.country} {float(self.min_rate):.1%}-{float(self.max_rate):.1%}"
        if self.approximation:
            label += " (two-bracket approximation)"
        return schedules.progressive(
            [0, self.pivot], [self.min_rate, self.max_rate],
            minimum=self.non_taxable_minimum, currency=self.currency, name=label,
        )


# Pivots are minor units of taxable income above the minimum; placeholders, not statute.
COMPARATORS = {
    "AZ": ComparatorSchedule("AZ", Fraction(12, 100), Fraction(35, 100), 1_200_000_00, "AZN", 24_000_000_00),
    "FR": ComparatorSchedule("FR", Fraction(55, 1000), Fraction(45, 100), 5_963_00, "EUR", 150_000_00),
    "DE": ComparatorSchedule("DE", Fraction(14, 100), Fraction(45, 100), 0, "EUR", 250_000_00),
    "UK": ComparatorSchedule("UK", Fraction(20, 100), Fraction(45, 100), 9_441_00, "GBP", 150_000_00),
}


Income = Union[int, tuple[int, str]]


def _split_income(income: Income, default_currency: str) -> tuple[int, str]:
    if isinstance(income, tuple):
        return income
    return income, default_currency


def compare_schedules(incomes: Sequence[Income], schedule_list: Sequence[TaxSchedule]) -> list[int]:
    """Total revenue each schedule raises from the same population.

    Incomes are minor units, optionally tagged ``(amount, currency)``;
    untagged incomes take the schedule's currency. A population that mixes
    currencies, or whose currency differs from a schedule's, is rejected.
    """
    tagged = [i for i in incomes if isinstance(i, tuple)]
    currencies = {c for _, c in tagged}
    if len(currencies) > 1:
        raise CurrencyMismatchError(f"population mixes currencies: {sorted(currencies)}")
    totals = []
    for sched in schedule_list:
        total = 0
        for income in incomes:
            amount, currency = _split_income(income, sched.currency)
            total += schedules.evaluate(sched, amount, currency)
        totals.append(total)
    return totals


# Rate sweep ------------------------------------------------------------------

def power_base(base_B0: float, rate: np.ndarray, gamma: float) -> np.ndarray:
    """Taxable base that shrinks as the rate rises: B0 * (1 - r)**gamma."""
    return base_B0 * np.power(1.0 - rate, gamma)


BaseModel = Callable[[float, np.ndarray, float], np.ndarray]


def default_grid(step: float = 0.01) -> tuple[float, ...]:
    n = int(round(1 / step))
    return tuple(np.round(np.linspace(0.0, 1.0, n + 1), 12))


@dataclass(frozen=True)
class SweepConfig:
    base_B0: float = 1_000_000_000.0  # minor units
    elasticity_gamma: float = DEFAULT_GAMMA
    rate_grid: tuple[float, ...] = field(default_factory=default_grid)
    base_model: BaseModel = power_base

    def __post_init__(self):
        object.__setattr__(self, "rate_grid", tuple(float(r) for r in self.rate_grid))
        problems = []
        if self.elasticity_gamma <= 0:
            problems.append("gamma must be positive")
        if self.base_B0 < 0:
            problems.append("base must be non-negative")
        grid = self.rate_grid
        if not grid:
            problems.append("rate grid is empty")
        if any(not 0 <= r <= 1 for r in grid):
            problems.append("rate grid must lie within [0, 1]")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            problems.append("rate grid must be strictly ascending")
        if problems:
            raise ValidationError("sweep config", problems)


@dataclass(frozen=True)
class SweepPoint:
    rate: float
    modeled_base: float
    revenue: float


@dataclass(frozen=True)
class SweepResult:
    points: tuple[SweepPoint, ...]
    argmax_rate: float
    gamma: float

    @property
    def rates(self) -> np.ndarray:
        return np.array([p.rate for p in self.points])

    @property
    def revenues(self) -> np.ndarray:
        return np.array([p.revenue for p in self.points])

    @property
    def analytic_peak(self) -> float:
        """Continuous revenue peak for the power base model."""
        return 1.0 / (1.0 + self.gamma)


def laffer_sweep(cfg: SweepConfig) -> SweepResult:
    rates = np.asarray(cfg.rate_grid, dtype=float)
    base = cfg.base_model(cfg.base_B0, rates, cfg.elasticity_gamma)
    revenue = rates * base
    best = int(np.argmax(revenue))
    points = tuple(SweepPoint(float(r), float(b), float(v)) for r, b, v in zip(rates, base, revenue))
    return SweepResult(points, float(rates[best]), cfg.elasticity_gamma)


def is_unimodal(values: Sequence[float]) -> bool:
    """Strictly increasing up to a single interior peak, strictly decreasing after."""
    values = np.asarray(values, dtype=float)
    if len(values) < 3:
        return False
    diffs = np.diff(values)
    peak = int(np.argmax(values))
    if peak in (0, len(values) - 1):
        return False
    return bool(np.all(diffs[:peak] > 0) and np.all(diffs[peak:] < 0))


def comparator_table(incomes_by_currency: Mapping[str, Sequence[int]],
                     comparators: Mapping[str, ComparatorSchedule] = COMPARATORS) -> list[dict]:
    """Revenue each comparator raises from the population held in its own currency."""
    rows = []
    for tag, comp in comparators.items():
        pop = list(incomes_by_currency.get(comp.currency, ()))
        (total,) = compare_schedules(pop, [comp.schedule])
        rows.append({
            "country": tag,
            "schedule": comp.schedule.name,
            "currency": comp.currency,
            "population": len(pop),
            "revenue": total,
            "approximation": comp.approximation,
        })
    return rows

