"""Calculators for the Georgian tax rules: income, profit, turnover regimes,
VAT, import duty, excise and the property-tax family.

All amounts are minor units (tetri). Every public calculator returns an
``int`` rounded half-up; ``*_exact`` helpers expose the unrounded value
where tests need to reason about it.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence, Union

from . import schedules
from .errors import (
    BandViolationError,
    CurrencyMismatchError,
    DataError,
    DomainError,
    EligibilityError,
    RegimeError,
    ValidationError,
)
from .money import round_half_up, to_fraction

PCT = Fraction(1, 100)

PROFIT_TAX_RATE = 15 * PCT
MICRO_TURNOVER_LIMIT = 30_000_00
SMALL_TURNOVER_LIMIT = 100_000_00
SMALL_RATE_DOCUMENTED = 3 * PCT
SMALL_RATE_UNDOCUMENTED = 5 * PCT
DOCUMENTED_EXPENSE_THRESHOLD = 60 * PCT

VAT_RATE = 18 * PCT
TEMPORARY_IMPORT_VAT_PER_MONTH = Fraction(54, 10_000)
VAT_REGISTRATION_THRESHOLD = 100_000_00

DUTY_RATES = {"pct12": 12 * PCT, "pct5": 5 * PCT, "exempt": Fraction(0)}
TEMPORARY_IMPORT_DUTY_RATE = 3 * PCT
VEHICLE_DUTY_PER_CC = 5  # tetri, i.e. 0.05 GEL per cm3
VEHICLE_DUTY_AGE_LOADING = 5 * PCT  # per year in service

ENTERPRISE_PROPERTY_RATE_CAP = 1 * PCT
HOUSEHOLD_INCOME_SPLIT = 100_000_00
HOUSEHOLD_BAND_LOW = (Fraction(5, 10_000), Fraction(2, 1000))
HOUSEHOLD_BAND_HIGH = (Fraction(8, 1000), Fraction(1, 100))
VEHICLE_FAMILY_INCOME_THRESHOLD = 40_000_00
LEASED_RATE_CAP = Fraction(6, 1000)
NONAGRI_LAND_RATE_PER_M2 = 24  # tetri
TERRITORIAL_COEFFICIENT_CAP = Fraction(3, 2)


class Regime(str, enum.Enum):
    STANDARD = "standard"
    MICRO = "micro"
    SMALL = "small"


class ProfitModel(str, enum.Enum):
    CLASSIC = "classic"
    ESTONIAN = "estonian"


def _require_non_negative(**amounts) -> None:
    for name, value in amounts.items():
        if value is not None and value < 0:
            raise DomainError(f"{name} must be non-negative, got {value}")


# Records ------------------------------------------------------------------

@dataclass(frozen=True)
class PersonRecord:
    monthly_income: int
    annual_family_income: int = 0
    vehicles: tuple[int, ...] = ()  # ages in whole years
    properties: tuple["PropertyItem", ...] = ()
    currency: str = "GEL"
    id: str = ""

    def __post_init__(self):
        object.__setattr__(self, "vehicles", tuple(self.vehicles))
        object.__setattr__(self, "properties", tuple(self.properties))
        _require_non_negative(monthly_income=self.monthly_income,
                              annual_family_income=self.annual_family_income)
        if any(age < 0 for age in self.vehicles):
            raise ValidationError("person", ["vehicle age must be non-negative"])


@dataclass(frozen=True)
class EnterpriseRecord:
    taxable_profit: int = 0
    distributed_profit: int = 0
    non_business_expense: int = 0
    asset_value_begin: int = 0
    asset_value_end: int = 0
    annual_turnover: int = 0
    documented_expense_share: Fraction = Fraction(0)
    employs_hired_labor: bool = False
    regime: Regime = Regime.STANDARD
    id: str = ""

    def __post_init__(self):
        object.__setattr__(self, "regime", Regime(self.regime))
        object.__setattr__(self, "documented_expense_share", to_fraction(self.documented_expense_share))
        _require_non_negative(
            taxable_profit=self.taxable_profit,
            distributed_profit=self.distributed_profit,
            non_business_expense=self.non_business_expense,
            asset_value_begin=self.asset_value_begin,
            asset_value_end=self.asset_value_end,
            annual_turnover=self.annual_turnover,
        )
        if not 0 <= self.documented_expense_share <= 1:
            raise ValidationError("enterprise", ["documented_expense_share outside [0, 1]"])


# Income and profit -----------------------------------------------------------

def income_tax(person: PersonRecord, schedule: schedules.TaxSchedule) -> int:
    """Monthly income tax under ``schedule`` (flat 20% today, four brackets in 2004)."""
    if person.currency != schedule.currency:
        raise CurrencyMismatchError(f"person in {person.currency}, schedule in {schedule.currency}")
    return schedules.evaluate(schedule, person.monthly_income, person.currency)


def profit_tax(ent: EnterpriseRecord, model: ProfitModel | str = ProfitModel.CLASSIC,
               gross_up: bool = False) -> int:
    """15% profit tax, either on taxable profit (classic) or on distributions
    plus non-business spending (Estonian model). Retained profit is untaxed
    under the Estonian model. ``gross_up`` divides the Estonian base by 0.85.
    """
    if ent.regime is not Regime.STANDARD:
        raise RegimeError(f"{ent.regime.value} enterprises pay turnover tax, not profit tax")
    model = ProfitModel(model)
    if model is ProfitModel.CLASSIC:
        return round_half_up(PROFIT_TAX_RATE * ent.taxable_profit)
    base = Fraction(ent.distributed_profit + ent.non_business_expense)
    if gross_up:
        base /= 1 - PROFIT_TAX_RATE
    return round_half_up(PROFIT_TAX_RATE * base)


def turnover_regime_tax(ent: EnterpriseRecord) -> int:
    if ent.regime is Regime.STANDARD:
        raise RegimeError("standard-regime enterprises pay profit tax")
    if ent.regime is Regime.MICRO:
        if ent.annual_turnover >= MICRO_TURNOVER_LIMIT:
            raise EligibilityError("micro status requires annual turnover below 30,000.00")
        if ent.employs_hired_labor:
            raise EligibilityError("micro status excludes hired labour")
        return 0
    if ent.annual_turnover >= SMALL_TURNOVER_LIMIT:
        raise EligibilityError("small status requires annual turnover below 100,000.00")
    if ent.documented_expense_share >= DOCUMENTED_EXPENSE_THRESHOLD:
        rate = SMALL_RATE_DOCUMENTED
    else:
        rate = SMALL_RATE_UNDOCUMENTED
    return round_half_up(rate * ent.annual_turnover)


def enterprise_tax(ent: EnterpriseRecord, model: ProfitModel | str = ProfitModel.CLASSIC,
                   gross_up: bool = False) -> int:
    """Dispatch to whichever of profit tax or turnover tax the regime selects."""
    if ent.regime is Regime.STANDARD:
        return profit_tax(ent, model, gross_up)
    return turnover_regime_tax(ent)


# VAT -------------------------------------------------------------------------

@dataclass(frozen=True)
class DomesticSupply:
    turnover: int


@dataclass(frozen=True)
class ImportSupply:
    customs_value: int
    duty: int = 0
    excise: int = 0


@dataclass(frozen=True)
class Advance:
    gross_amount: int  # VAT-inclusive


@dataclass(frozen=True)
class TemporaryImportVat:
    would_be_vat: int
    months: int


@dataclass(frozen=True)
class ExportSupply:
    value: int = 0
    reexport: bool = False


VatEvent = Union[DomesticSupply, ImportSupply, Advance, TemporaryImportVat, ExportSupply]


class VatResult(NamedTuple):
    amount: int
    input_credit: bool = False


def vat_exact(event: VatEvent) -> Fraction:
    if isinstance(event, DomesticSupply):
        _require_non_negative(turnover=event.turnover)
        return VAT_RATE * event.turnover
    if isinstance(event, ImportSupply):
        _require_non_negative(customs_value=event.customs_value, duty=event.duty, excise=event.excise)
        return VAT_RATE * (event.customs_value + event.duty + event.excise)
    if isinstance(event, Advance):
        _require_non_negative(gross_amount=event.gross_amount)
        return event.gross_amount * VAT_RATE / (1 + VAT_RATE)
    if isinstance(event, TemporaryImportVat):
        _require_non_negative(would_be_vat=event.would_be_vat)
        if event.months < 1:
            raise DomainError("temporary import lasts at least one (partial) month")
        return event.months * TEMPORARY_IMPORT_VAT_PER_MONTH * event.would_be_vat
    if isinstance(event, ExportSupply):
        _require_non_negative(value=event.value)
        return Fraction(0)
    raise DataError(f"unknown VAT event {event!r}")


def vat(event: VatEvent) -> VatResult:
    """VAT due on one event. Exports and re-exports are zero-rated with the input credit kept."""
    amount = round_half_up(vat_exact(event))
    return VatResult(amount, isinstance(event, ExportSupply))


def vat_registration_required(rolling_12mo_taxable_ops: int) -> bool:
    _require_non_negative(amount=rolling_12mo_taxable_ops)
    return rolling_12mo_taxable_ops > VAT_REGISTRATION_THRESHOLD


# Customs ---------------------------------------------------------------------

class Operation(str, enum.Enum):
    IMPORT = "import"
    TEMPORARY_IMPORT = "temporary_import"
    EXPORT = "export"
    REEXPORT = "reexport"


@dataclass(frozen=True)
class VehicleGoods:
    engine_cc: int
    years_in_service: int

    def __post_init__(self):
        if self.engine_cc <= 0:
            raise ValidationError("vehicle", ["engine_cc must be positive"])
        if self.years_in_service < 0:
            raise ValidationError("vehicle", ["years_in_service must be non-negative"])


@dataclass(frozen=True)
class AlcoholGoods:
    liters: Fraction
    abv: Fraction  # percentage points, 40 means 40%
    unit_rate: Fraction  # minor units per abv point per 100 L

    def __post_init__(self):
        for name in ("liters", "abv", "unit_rate"):
            object.__setattr__(self, name, to_fraction(getattr(self, name)))
        problems = []
        if self.liters < 0:
            problems.append("liters must be non-negative")
        if not 0 <= self.abv <= 100:
            problems.append("abv outside [0, 100]")
        if self.unit_rate < 0:
            problems.append("unit_rate must be non-negative")
        if problems:
            raise ValidationError("alcohol", problems)


@dataclass(frozen=True)
class ImportDeclaration:
    operation: Operation = Operation.IMPORT
    customs_value: int = 0
    duty_class: str = "pct12"
    excise_amount: int = 0
    goods: Optional[Union[VehicleGoods, AlcoholGoods]] = None
    months: int = 0  # temporary import only, partial months count
    goods_kind: Optional[str] = None  # "vehicle"/"alcohol" when goods must be present
    id: str = ""

    def __post_init__(self):
        object.__setattr__(self, "operation", Operation(self.operation))
        problems = []
        if self.customs_value < 0:
            problems.append("customs_value must be non-negative")
        if self.excise_amount < 0:
            problems.append("excise_amount must be non-negative")
        if self.duty_class not in DUTY_RATES:
            problems.append(f"unknown duty class {self.duty_class!r}")
        if self.operation is Operation.TEMPORARY_IMPORT and self.months < 1:
            problems.append("temporary import needs months >= 1")
        if problems:
            raise ValidationError("import declaration", problems)


def full_import_duty_exact(decl: ImportDeclaration) -> Fraction:
    """Duty that would be payable if the goods were released for free circulation."""
    if decl.goods_kind == "vehicle" and not isinstance(decl.goods, VehicleGoods):
        raise DataError("vehicle declaration lacks engine_cc / years_in_service")
    if decl.goods_kind == "alcohol" and not isinstance(decl.goods, AlcoholGoods):
        raise DataError("alcohol declaration lacks liters / abv / unit_rate")
    goods = decl.goods
    if isinstance(goods, VehicleGoods):
        per_cc = Fraction(VEHICLE_DUTY_PER_CC * goods.engine_cc)
        return per_cc + per_cc * VEHICLE_DUTY_AGE_LOADING * goods.years_in_service
    if isinstance(goods, AlcoholGoods):
        return goods.unit_rate * goods.abv * goods.liters / 100
    return DUTY_RATES[decl.duty_class] * decl.customs_value


def import_duty(decl: ImportDeclaration) -> int:
    """Import duty on a declaration.

    Ad valorem goods pay 12%, 5% or nothing by class. Passenger cars pay
    0.05 GEL per cm3 plus 5% of that per year in service; alcohol pays the
    unit rate times abv per 100 litres. Temporary imports pay 3% of the
    full-import duty, once. Exports and re-exports pay nothing.
    """
    if decl.operation in (Operation.EXPORT, Operation.REEXPORT):
        return 0
    full = full_import_duty_exact(decl)
    if decl.operation is Operation.TEMPORARY_IMPORT:
        return round_half_up(TEMPORARY_IMPORT_DUTY_RATE * round_half_up(full))
    return round_half_up(full)


def would_be_import_vat(decl: ImportDeclaration) -> int:
    """VAT the goods would bear if released for free circulation."""
    full_duty = round_half_up(full_import_duty_exact(decl))
    return vat(ImportSupply(decl.customs_value, full_duty, decl.excise_amount)).amount


def declaration_vat(decl: ImportDeclaration, duty: int | None = None) -> VatResult:
    """VAT for a customs declaration, using the duty computed for it."""
    if decl.operation in (Operation.EXPORT, Operation.REEXPORT):
        return vat(ExportSupply(decl.customs_value, decl.operation is Operation.REEXPORT))
    if decl.operation is Operation.TEMPORARY_IMPORT:
        return vat(TemporaryImportVat(would_be_import_vat(decl), decl.months))
    if duty is None:
        duty = import_duty(decl)
    return vat(ImportSupply(decl.customs_value, duty, decl.excise_amount))


# Excise ----------------------------------------------------------------------

class ExciseBase(str, enum.Enum):
    VOLUME = "volume"
    QUANTITY_OR_WEIGHT = "quantity_or_weight"
    WEIGHT_OR_VOLUME = "weight_or_volume"
    VEHICLE = "vehicle"
    GAS_VOLUME = "gas_volume"
    COMPENSATION = "compensation"


EXCISE_CATEGORY_BASES = {
    "alcohol": ExciseBase.VOLUME,
    "tobacco": ExciseBase.QUANTITY_OR_WEIGHT,
    "passenger_vehicles": ExciseBase.VEHICLE,
    "natural_gas": ExciseBase.GAS_VOLUME,
    "petroleum_products": ExciseBase.WEIGHT_OR_VOLUME,
    "coal_tar_oils": ExciseBase.WEIGHT_OR_VOLUME,
    "petroleum_gases": ExciseBase.WEIGHT_OR_VOLUME,
    "additives_solvents": ExciseBase.WEIGHT_OR_VOLUME,
    "lubricants": ExciseBase.WEIGHT_OR_VOLUME,
    "mobile_communication": ExciseBase.COMPENSATION,
}


@dataclass(frozen=True)
class ExciseItem:
    """One excisable quantity.

    ``quantity`` is litres, units, kg, m3 or cm3 by base, or minor units of
    compensation. ``unit_rate`` is minor units per base unit, or a fraction
    for the compensation base. Vehicles also carry ``age`` and an optional
    per-year ``age_loading`` on the per-cm3 charge.
    """

    category: str
    base: ExciseBase
    quantity: Fraction
    unit_rate: Fraction
    age: int = 0
    age_loading: Fraction = Fraction(0)
    id: str = ""

    def __post_init__(self):
        object.__setattr__(self, "base", ExciseBase(self.base))
        for name in ("quantity", "unit_rate", "age_loading"):
            object.__setattr__(self, name, to_fraction(getattr(self, name)))
        problems = []
        if self.quantity < 0:
            problems.append("quantity must be non-negative")
        if self.unit_rate < 0:
            problems.append("unit_rate must be non-negative")
        if self.age < 0 or self.age_loading < 0:
            problems.append("age and age_loading must be non-negative")
        if problems:
            raise ValidationError("excise item", problems)


def excise(item: ExciseItem) -> int:
    expected = EXCISE_CATEGORY_BASES.get(item.category)
    if expected is None:
        raise DataError(f"unknown excise category {item.category!r}")
    if item.base is not expected:
        raise DataError(f"{item.category} is measured by {expected.value}, not {item.base.value}")
    amount = item.unit_rate * item.quantity
    if item.base is ExciseBase.VEHICLE:
        amount += amount * item.age_loading * item.age
    return round_half_up(amount)


# Property --------------------------------------------------------------------

@dataclass(frozen=True)
class EnterpriseAssets:
    begin: int
    end: int
    rate: Fraction = ENTERPRISE_PROPERTY_RATE_CAP
    market_value: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "rate", to_fraction(self.rate))
        _require_non_negative(begin=self.begin, end=self.end, market_value=self.market_value)
        if not 0 <= self.rate <= ENTERPRISE_PROPERTY_RATE_CAP:
            raise ValidationError("enterprise assets", ["rate outside [0, 1%]"])

    @property
    def book_value(self) -> Fraction:
        return Fraction(self.begin + self.end, 2)


@dataclass(frozen=True)
class HouseholdProperty:
    market_value: int
    municipal_rate: Fraction

    def __post_init__(self):
        object.__setattr__(self, "municipal_rate", to_fraction(self.municipal_rate))
        _require_non_negative(market_value=self.market_value, municipal_rate=self.municipal_rate)


@dataclass(frozen=True)
class LeasedProperty:
    initial_book_value: int
    rate: Fraction

    def __post_init__(self):
        object.__setattr__(self, "rate", to_fraction(self.rate))
        _require_non_negative(initial_book_value=self.initial_book_value)
        if not 0 < self.rate <= LEASED_RATE_CAP:
            raise ValidationError("leased property", ["rate outside (0, 0.6%]"])


@dataclass(frozen=True)
class VehicleHolding:
    age: int

    def __post_init__(self):
        if self.age < 0:
            raise ValidationError("vehicle", ["age must be non-negative"])


@dataclass(frozen=True)
class AgriculturalLand:
    hectares: Fraction
    per_ha_rate: Fraction  # minor units per hectare, set per territory and soil quality

    def __post_init__(self):
        object.__setattr__(self, "hectares", to_fraction(self.hectares))
        object.__setattr__(self, "per_ha_rate", to_fraction(self.per_ha_rate))
        _require_non_negative(hectares=self.hectares, per_ha_rate=self.per_ha_rate)


@dataclass(frozen=True)
class NonAgriculturalLand:
    area_m2: Fraction
    territorial_coefficient: Fraction = Fraction(1)
    base_rate: Fraction = Fraction(NONAGRI_LAND_RATE_PER_M2)

    def __post_init__(self):
        for name in ("area_m2", "territorial_coefficient", "base_rate"):
            object.__setattr__(self, name, to_fraction(getattr(self, name)))
        _require_non_negative(area_m2=self.area_m2, base_rate=self.base_rate)
        if not 0 < self.territorial_coefficient <= TERRITORIAL_COEFFICIENT_CAP:
            raise ValidationError("land", ["territorial coefficient outside (0, 1.5]"])


PropertyItem = Union[EnterpriseAssets, HouseholdProperty, LeasedProperty, VehicleHolding,
                     AgriculturalLand, NonAgriculturalLand]


def household_band(family_income: int) -> tuple[Fraction, Fraction]:
    return HOUSEHOLD_BAND_LOW if family_income < HOUSEHOLD_INCOME_SPLIT else HOUSEHOLD_BAND_HIGH


def vehicle_annual_tax(age: int) -> int:
    """Age table for passenger cars: up to 1 year 500, to 5 years 240, to 10 years 120, older 60 GEL."""
    if age < 0:
        raise DomainError("vehicle age must be non-negative")
    if age <= 1:
        return 500_00
    if age <= 5:
        return 240_00
    if age <= 10:
        return 120_00
    return 60_00


def property_base(item: PropertyItem) -> int:
    """The money value a property rate applies to; 0 for items taxed per area or per vehicle."""
    if isinstance(item, EnterpriseAssets):
        value = item.book_value
        if item.market_value is not None and item.market_value > value:
            value = Fraction(item.market_value)
        return round_half_up(value)
    if isinstance(item, HouseholdProperty):
        return item.market_value
    if isinstance(item, LeasedProperty):
        return item.initial_book_value
    return 0


def property_tax(item: PropertyItem, family_income: int | None = None) -> int:
    if isinstance(item, EnterpriseAssets):
        value = item.book_value
        if item.market_value is not None and item.market_value > value:
            value = Fraction(item.market_value)
        return round_half_up(item.rate * value)

    if isinstance(item, HouseholdProperty):
        if family_income is None:
            raise DataError("household property tax needs the family's annual income")
        low, high = household_band(family_income)
        if not low <= item.municipal_rate <= high:
            raise BandViolationError(
                "municipal rate outside band",
                [f"rate {float(item.municipal_rate):.4%} not in [{float(low):.2%}, {float(high):.2%}]"
                 f" for family income {'below' if family_income < HOUSEHOLD_INCOME_SPLIT else 'at or above'}"
                 " 100,000.00"],
            )
        return round_half_up(item.municipal_rate * item.market_value)

    if isinstance(item, VehicleHolding):
        if family_income is None:
            raise DataError("vehicle property tax needs the family's annual income")
        if family_income <= VEHICLE_FAMILY_INCOME_THRESHOLD:
            return 0
        return vehicle_annual_tax(item.age)

    if isinstance(item, LeasedProperty):
        return round_half_up(item.rate * item.initial_book_value)

    if isinstance(item, AgriculturalLand):
        return round_half_up(item.per_ha_rate * item.hectares)

    if isinstance(item, NonAgriculturalLand):
        return round_half_up(item.base_rate * item.territorial_coefficient * item.area_m2)

    raise DataError(f"unknown property item {item!r}")


# Liability lines ---------------------------------------------------------------

TAX_KINDS = ("income", "profit", "vat", "excise", "import_duty", "property")


@dataclass(frozen=True)
class LiabilityLine:
    """One computed liability, in the shape the budget allocator ingests."""

    record_kind: str
    record_id: str
    tax_kind: str
    base: int
    amount: int
    jurisdiction: str = ""
    in_autonomous_republic: bool = False
    input_credit: bool = False
    detail: str = ""

    def __post_init__(self):
        if self.tax_kind not in TAX_KINDS:
            raise DataError(f"unknown tax kind {self.tax_kind!r}")


def sum_lines(lines: Sequence[LiabilityLine]) -> dict[str, int]:
    totals = {kind: 0 for kind in TAX_KINDS}
    for line in lines:
        totals[line.tax_kind] += line.amount
    return totals
