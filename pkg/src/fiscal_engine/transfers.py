"""Equalization transfers to self-governing cities and municipalities.

The chain is: national pool G (floored at a fraction of forecast GDP), split
72/28 between cities and municipalities, each unit's expenditure need
E = share * G_group, own revenue R forecast from a trend, and transfer
T = max(E - R, 0). Units whose own revenue covers their need get nothing.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Optional, Sequence

from .errors import DataError, DomainError, ValidationError
from .money import round_half_up, to_fraction

SHARE_TOLERANCE = Fraction(1, 10**9)


class UnitKind(str, enum.Enum):
    CITY = "city"
    MUNICIPALITY = "municipality"


@dataclass(frozen=True)
class Municipality:
    id: str
    kind: UnitKind
    coefficient_share: Fraction
    own_revenue_actuals: tuple[int, ...]  # years t-3, t-2, t-1
    own_revenue_forecast_current: Optional[int]  # year t
    plan_year: Optional[int] = None  # t+1

    def __post_init__(self):
        object.__setattr__(self, "kind", UnitKind(self.kind))
        object.__setattr__(self, "coefficient_share", to_fraction(self.coefficient_share))
        object.__setattr__(self, "own_revenue_actuals", tuple(self.own_revenue_actuals))
        problems = []
        if not 0 <= self.coefficient_share <= 1:
            problems.append("coefficient_share outside [0, 1]")
        if any(a < 0 for a in self.own_revenue_actuals):
            problems.append("own revenue actuals must be non-negative")
        if self.own_revenue_forecast_current is not None and self.own_revenue_forecast_current < 0:
            problems.append("current-year forecast must be non-negative")
        if problems:
            raise ValidationError(f"municipality {self.id}", problems)


@dataclass(frozen=True)
class TransferParams:
    nominal_gdp_forecast: int
    proposed_G: int
    city_share: Fraction = Fraction(72, 100)
    municipality_share: Fraction = Fraction(28, 100)
    gdp_floor_fraction: Fraction = Fraction(4, 100)

    def __post_init__(self):
        for name in ("city_share", "municipality_share", "gdp_floor_fraction"):
            object.__setattr__(self, name, to_fraction(getattr(self, name)))
        problems = []
        if self.city_share + self.municipality_share != 1:
            problems.append("city_share + municipality_share must equal 1")
        for name in ("city_share", "municipality_share", "gdp_floor_fraction"):
            if not 0 < getattr(self, name) < 1:
                problems.append(f"{name} outside (0, 1)")
        if self.proposed_G < 0:
            problems.append("proposed_G must be non-negative")
        if problems:
            raise ValidationError("transfer parameters", problems)


@dataclass(frozen=True)
class UnitTransfer:
    id: str
    kind: UnitKind
    E: int
    R: int
    T: int


@dataclass
class TransferAllocation:
    G: int
    G_city: int
    G_m: int
    units: dict[str, UnitTransfer]
    group_need: dict[UnitKind, int]
    group_transfer: dict[UnitKind, int]
    targeted_transfers: dict[str, int] = field(default_factory=dict)
    special_transfers: dict[str, int] = field(default_factory=dict)

    @property
    def equalization(self) -> dict[str, int]:
        return {uid: u.T for uid, u in sorted(self.units.items())}

    def total_outflow(self) -> int:
        return (sum(u.T for u in self.units.values())
                + sum(self.targeted_transfers.values()) + sum(self.special_transfers.values()))


def determine_G(params: TransferParams) -> int:
    """The proposed pool, lifted to the GDP floor when it falls short."""
    if params.nominal_gdp_forecast <= 0:
        raise DomainError("nominal GDP forecast must be positive")
    floor = params.gdp_floor_fraction * params.nominal_gdp_forecast
    if params.proposed_G >= floor:
        return params.proposed_G
    return round_half_up(floor)


def split_G(G: int, params: TransferParams | None = None) -> tuple[int, int]:
    """(G_city, G_m); the municipalities' part is floored and the rounding remainder goes to cities."""
    if G < 0:
        raise DomainError("G must be non-negative")
    share = params.municipality_share if params else Fraction(28, 100)
    g_m = int(share * G // 1)
    return G - g_m, g_m


def expenditure_need(m: Municipality, G_kind: int) -> int:
    return round_half_up(m.coefficient_share * G_kind)


def _apportion(units: Sequence[Municipality], pool: int) -> dict[str, int]:
    """Split ``pool`` by share so the parts sum to ``pool`` exactly.

    Each unit gets the floor of its exact need; leftover minor units go one
    at a time to the largest shares first (ties broken by id).
    """
    total = sum((m.coefficient_share for m in units), Fraction(0))
    if not units or total == 0:
        return {m.id: 0 for m in units}
    exact = {m.id: m.coefficient_share / total * pool for m in units}
    parts = {uid: int(v // 1) for uid, v in exact.items()}
    leftover = pool - sum(parts.values())
    order = sorted(units, key=lambda m: (-m.coefficient_share, m.id))
    for m in order[:max(leftover, 0)]:
        parts[m.id] += 1
    return parts


def forecast_R(m: Municipality) -> int:
    """Least-squares trend through years t-3..t, projected to the plan year t+1, floored at 0."""
    if len(m.own_revenue_actuals) != 3 or m.own_revenue_forecast_current is None:
        raise DataError(f"municipality {m.id}: need three actuals and a current-year forecast")
    ys = [*m.own_revenue_actuals, m.own_revenue_forecast_current]
    xs = [-3, -2, -1, 0]
    n = len(xs)
    x_mean = Fraction(sum(xs), n)
    y_mean = Fraction(sum(ys), n)
    sxx = sum((x - x_mean) ** 2 for x in xs)
    sxy = sum((x - x_mean) * (y - y_mean) for x, y in zip(xs, ys))
    slope = sxy / sxx
    projection = y_mean + slope * (1 - x_mean)
    return max(0, round_half_up(projection))


def check_shares(municipalities: Iterable[Municipality]) -> list[str]:
    """Violations of the per-group share-sum rule; groups with no members are skipped."""
    totals: dict[UnitKind, Fraction] = {}
    for m in municipalities:
        totals[m.kind] = totals.get(m.kind, Fraction(0)) + m.coefficient_share
    return [
        f"{kind.value} shares sum to {float(total):.9g}, not 1"
        for kind, total in sorted(totals.items(), key=lambda kv: kv[0].value)
        if abs(total - 1) > SHARE_TOLERANCE
    ]


def allocate(municipalities: Sequence[Municipality], params: TransferParams,
             forecaster: Callable[[Municipality], int] = forecast_R,
             targeted: Mapping[str, int] | None = None,
             special: Mapping[str, int] | None = None) -> TransferAllocation:
    problems = check_shares(municipalities)
    ids = [m.id for m in municipalities]
    if len(set(ids)) != len(ids):
        problems.append("duplicate municipality ids")
    if problems:
        raise ValidationError("municipality registry", problems)

    G = determine_G(params)
    G_city, G_m = split_G(G, params)
    pools = {UnitKind.CITY: G_city, UnitKind.MUNICIPALITY: G_m}

    units: dict[str, UnitTransfer] = {}
    group_need = {kind: 0 for kind in UnitKind}
    group_transfer = {kind: 0 for kind in UnitKind}
    for kind in UnitKind:
        group = [m for m in municipalities if m.kind is kind]
        needs = _apportion(group, pools[kind])
        for m in group:
            E = needs[m.id]
            R = forecaster(m)
            T = max(E - R, 0)
            units[m.id] = UnitTransfer(m.id, kind, E, R, T)
            group_need[kind] += E
            group_transfer[kind] += T

    known = set(units)
    for label, extra in (("targeted", targeted), ("special", special)):
        unknown = sorted(set(extra or {}) - known)
        if unknown:
            raise DataError(f"{label} transfers to unknown units: {', '.join(unknown)}")
        if any(v < 0 for v in (extra or {}).values()):
            raise DomainError(f"{label} transfers must be non-negative")

    return TransferAllocation(
        G=G, G_city=G_city, G_m=G_m,
        units=dict(sorted(units.items())),
        group_need=group_need,
        group_transfer=group_transfer,
        targeted_transfers=dict(sorted((targeted or {}).items())),
        special_transfers=dict(sorted((special or {}).items())),
    )
