"""Reading record files and the JSON run configuration.

Record files are CSV (header row, comma separated, UTF-8, period decimal)
or JSON (an array of objects, or an object holding such an array under
``"records"`` or ``"lines"``). Money columns are decimal strings in major
units; rates are decimal strings or numbers.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Optional

from . import geo_tax as gt
from . import schedules as sch
from .budget import RevenueEntry
from .errors import FiscalError, ValidationError
from .money import parse_money, to_fraction
from .scenarios import COMPARATORS, ComparatorSchedule, SweepConfig, default_grid
from .transfers import Municipality, TransferParams, check_shares


class IngestIOError(FiscalError, OSError):
    """The file could not be read or parsed at all."""


@dataclass(frozen=True)
class Rejection:
    source: str
    line: int
    record_id: str
    reason: str

    def as_dict(self) -> dict:
        return {"source": self.source, "line": self.line, "record_id": self.record_id,
                "reason": self.reason}


@dataclass(frozen=True)
class Record:
    kind: str
    id: str
    line: int
    value: Any
    jurisdiction: str = ""
    in_autonomous_republic: bool = False
    extra: dict = field(default_factory=dict, compare=False)


@dataclass
class Partition:
    kind: str
    source: str
    records: list[Record]
    rejections: list[Rejection]


# Field parsers ---------------------------------------------------------------

def _blank(value) -> bool:
    return value is None or (isinstance(value, str) and value.strip() == "")


def _money(row, name, default=None, required=False):
    value = row.get(name)
    if _blank(value):
        if required:
            raise ValueError(f"{name} is required")
        return default
    amount = parse_money(value)
    if amount < 0:
        raise ValueError(f"{name} must be non-negative")
    return amount


def _frac(row, name, default=None, required=False):
    value = row.get(name)
    if _blank(value):
        if required:
            raise ValueError(f"{name} is required")
        return default
    return to_fraction(value)


def _unit_price(row, name, default=None):
    """A money-per-unit rate, which may carry sub-minor-unit precision."""
    value = _frac(row, name)
    if value is None:
        return default
    if value < 0:
        raise ValueError(f"{name} must be non-negative")
    return value * 100


def _int(row, name, default=None, required=False):
    value = row.get(name)
    if _blank(value):
        if required:
            raise ValueError(f"{name} is required")
        return default
    if isinstance(value, bool):
        raise ValueError(f"{name} must be an integer")
    if isinstance(value, float) and value.is_integer():
        return int(value)
    if isinstance(value, int):
        return value
    try:
        return int(str(value).strip())
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {value!r}") from None


_TRUE = {"true", "1", "yes", "y"}
_FALSE = {"false", "0", "no", "n", ""}


def _bool(row, name, default=False):
    value = row.get(name)
    if value is None:
        return default
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in _TRUE:
        return True
    if text in _FALSE:
        return False
    raise ValueError(f"{name} must be a boolean, got {value!r}")


def _str(row, name, default="", required=False):
    value = row.get(name)
    if _blank(value):
        if required:
            raise ValueError(f"{name} is required")
        return default
    return str(value).strip()


def _int_list(row, name):
    value = row.get(name)
    if _blank(value):
        return ()
    if isinstance(value, list):
        items = value
    else:
        items = [v for v in str(value).split(";") if v.strip()]
    return tuple(_int({"v": v}, "v") for v in items)


# Record builders ---------------------------------------------------------------

def _person(row, config):
    return gt.PersonRecord(
        monthly_income=_money(row, "monthly_income", required=True),
        annual_family_income=_money(row, "annual_family_income", 0),
        vehicles=_int_list(row, "vehicle_ages"),
        currency=_str(row, "currency", "GEL"),
        id=_str(row, "id"),
    ), {}


def _enterprise(row, config):
    ent = gt.EnterpriseRecord(
        taxable_profit=_money(row, "taxable_profit", 0),
        distributed_profit=_money(row, "distributed_profit", 0),
        non_business_expense=_money(row, "non_business_expense", 0),
        asset_value_begin=_money(row, "asset_value_begin", 0),
        asset_value_end=_money(row, "asset_value_end", 0),
        annual_turnover=_money(row, "annual_turnover", 0),
        documented_expense_share=_frac(row, "documented_expense_share", Fraction(0)),
        employs_hired_labor=_bool(row, "employs_hired_labor"),
        regime=_str(row, "regime", "standard"),
        id=_str(row, "id"),
    )
    extra = {
        "profit_model": gt.ProfitModel(_str(row, "profit_model", "classic")),
        "gross_up": _bool(row, "gross_up"),
        "asset_market_value": _money(row, "asset_market_value"),
        "property_rate": _frac(row, "property_rate", gt.ENTERPRISE_PROPERTY_RATE_CAP),
    }
    if extra["asset_market_value"] is not None or ent.asset_value_begin or ent.asset_value_end:
        extra["assets"] = gt.EnterpriseAssets(ent.asset_value_begin, ent.asset_value_end,
                                              extra["property_rate"], extra["asset_market_value"])
    return ent, extra


def _import(row, config):
    goods_kind = _str(row, "goods", "") or None
    goods = None
    if goods_kind == "vehicle":
        cc, years = _int(row, "engine_cc"), _int(row, "years_in_service")
        if cc is not None and years is not None:
            goods = gt.VehicleGoods(cc, years)
    elif goods_kind == "alcohol":
        liters, abv = _frac(row, "liters"), _frac(row, "abv")
        rate = _unit_price(row, "alcohol_unit_rate")
        if None not in (liters, abv, rate):
            goods = gt.AlcoholGoods(liters, abv, rate)
    elif goods_kind not in (None, "none"):
        raise ValueError(f"unknown goods kind {goods_kind!r}")
    decl = gt.ImportDeclaration(
        operation=_str(row, "operation", "import"),
        customs_value=_money(row, "customs_value", 0),
        duty_class=_str(row, "duty_class", "pct12"),
        excise_amount=_money(row, "excise_amount", 0),
        goods=goods,
        months=_int(row, "months", 0),
        goods_kind=None if goods_kind == "none" else goods_kind,
        id=_str(row, "id"),
    )
    if goods_kind in ("vehicle", "alcohol"):
        gt.full_import_duty_exact(decl)  # surfaces missing goods fields at ingest
    return decl, {}


_SUPPLY_KINDS = {
    "domestic": lambda a: gt.DomesticSupply(a),
    "advance": lambda a: gt.Advance(a),
    "export": lambda a: gt.ExportSupply(a),
    "reexport": lambda a: gt.ExportSupply(a, reexport=True),
}


def _supply(row, config):
    kind = _str(row, "kind", required=True)
    if kind not in _SUPPLY_KINDS:
        raise ValueError(f"unknown supply kind {kind!r}")
    amount = _money(row, "amount", required=True)
    return _SUPPLY_KINDS[kind](amount), {"amount": amount, "supply_kind": kind}


def _excise(row, config):
    category = _str(row, "category", required=True)
    base = gt.EXCISE_CATEGORY_BASES.get(category)
    if base is None:
        raise ValueError(f"unknown excise category {category!r}")
    configured = config.excise_rates.get(category)
    if base is gt.ExciseBase.COMPENSATION:
        quantity = _money(row, "quantity", required=True)
        rate = _frac(row, "unit_rate")
    else:
        quantity = _frac(row, "quantity", required=True)
        rate = _unit_price(row, "unit_rate")
    if rate is None:
        if configured is None:
            raise ValueError(f"no unit_rate given and no configured rate for {category!r}")
        rate = configured.rate
    loading = _frac(row, "age_loading")
    if loading is None:
        loading = configured.age_loading if configured else Fraction(0)
    return gt.ExciseItem(category, base, quantity, rate, _int(row, "age", 0), loading,
                         _str(row, "id")), {}


def _property(row, config):
    kind = _str(row, "kind", required=True)
    jurisdiction = _str(row, "jurisdiction")
    if kind == "enterprise_assets":
        item = gt.EnterpriseAssets(_money(row, "begin", required=True), _money(row, "end", required=True),
                                   _frac(row, "rate", gt.ENTERPRISE_PROPERTY_RATE_CAP),
                                   _money(row, "market_value"))
    elif kind == "household":
        rate = _frac(row, "municipal_rate")
        if rate is None:
            rate = config.municipal_rates.get(jurisdiction)
        if rate is None:
            raise ValueError(f"no municipal_rate given and none configured for {jurisdiction!r}")
        item = gt.HouseholdProperty(_money(row, "market_value", required=True), rate)
    elif kind == "leased":
        item = gt.LeasedProperty(_money(row, "initial_book_value", required=True),
                                 _frac(row, "rate", required=True))
    elif kind == "vehicle":
        item = gt.VehicleHolding(_int(row, "age", required=True))
    elif kind == "agri_land":
        rate = _unit_price(row, "per_ha_rate")
        if rate is None:
            territory = _str(row, "territory")
            rate = config.land_rates.get(territory)
            if rate is None:
                raise ValueError(f"no per_ha_rate given and none configured for territory {territory!r}")
        item = gt.AgriculturalLand(_frac(row, "hectares", required=True), rate)
    elif kind == "nonagri_land":
        item = gt.NonAgriculturalLand(_frac(row, "area_m2", required=True),
                                      _frac(row, "territorial_coefficient", Fraction(1)),
                                      config.nonagri_land_rate)
    else:
        raise ValueError(f"unknown property kind {kind!r}")
    family_income = _money(row, "family_income")
    if kind in ("household", "vehicle") and family_income is None:
        raise ValueError(f"{kind} property needs family_income")
    if kind == "household":
        gt.property_tax(item, family_income)  # band check belongs to record validation
    return item, {"family_income": family_income, "property_kind": kind}


def _municipality(row, config):
    actuals = row.get("own_revenue_actuals")
    if isinstance(actuals, list):
        actuals = tuple(parse_money(a) for a in actuals)
    else:
        actuals = tuple(_money(row, f, required=True) for f in ("actual_t3", "actual_t2", "actual_t1"))
    return Municipality(
        id=_str(row, "id", required=True),
        kind=_str(row, "kind", required=True),
        coefficient_share=_frac(row, "coefficient_share", required=True),
        own_revenue_actuals=actuals,
        own_revenue_forecast_current=_money(row, "forecast_current", required=True),
        plan_year=_int(row, "plan_year"),
    ), {}


def _ledger(row, config):
    return RevenueEntry(
        tax_kind=_str(row, "tax_kind", required=True),
        amount=_money(row, "amount", required=True),
        jurisdiction=_str(row, "jurisdiction"),
        in_autonomous_republic=_bool(row, "in_autonomous_republic"),
    ), {}


def _income(row, config):
    return (_money(row, "income", required=True), _str(row, "currency", "GEL")), {}


_COMMON = {"id", "jurisdiction", "in_autonomous_republic"}

RECORD_KINDS: dict[str, tuple[frozenset, Callable]] = {
    "persons": (frozenset({"monthly_income", "annual_family_income", "vehicle_ages", "currency"}), _person),
    "enterprises": (frozenset({
        "regime", "taxable_profit", "distributed_profit", "non_business_expense", "asset_value_begin",
        "asset_value_end", "asset_market_value", "property_rate", "annual_turnover",
        "documented_expense_share", "employs_hired_labor", "profit_model", "gross_up"}), _enterprise),
    "imports": (frozenset({
        "operation", "months", "customs_value", "duty_class", "excise_amount", "goods", "engine_cc",
        "years_in_service", "liters", "abv", "alcohol_unit_rate"}), _import),
    "supplies": (frozenset({"kind", "amount"}), _supply),
    "excise": (frozenset({"category", "quantity", "unit_rate", "age", "age_loading"}), _excise),
    "properties": (frozenset({
        "kind", "begin", "end", "rate", "market_value", "municipal_rate", "initial_book_value", "age",
        "hectares", "per_ha_rate", "territory", "area_m2", "territorial_coefficient", "family_income"}),
        _property),
    "municipalities": (frozenset({
        "kind", "coefficient_share", "actual_t3", "actual_t2", "actual_t1", "own_revenue_actuals",
        "forecast_current", "plan_year"}), _municipality),
    # compute output lines carry extra columns that the ledger simply ignores
    "ledger": (frozenset({"tax_kind", "amount", "record_kind", "record_id", "base", "input_credit",
                          "detail", "line"}), _ledger),
    "incomes": (frozenset({"income", "currency"}), _income),
}


# Config ------------------------------------------------------------------------

@dataclass(frozen=True)
class ExciseRate:
    rate: Fraction  # minor units per unit, or a fraction for the compensation base
    age_loading: Fraction = Fraction(0)


@dataclass
class ScenarioConfig:
    compare: list[str] = field(default_factory=list)
    comparators: dict[str, ComparatorSchedule] = field(default_factory=lambda: dict(COMPARATORS))
    sweep: SweepConfig = field(default_factory=SweepConfig)


@dataclass
class EngineConfig:
    schedules: dict[str, sch.TaxSchedule] = field(default_factory=lambda: {
        "income": sch.GEORGIA_FLAT_INCOME, "income_2004": sch.GEORGIA_INCOME_2004})
    excise_rates: dict[str, ExciseRate] = field(default_factory=dict)
    land_rates: dict[str, Fraction] = field(default_factory=dict)
    nonagri_land_rate: Fraction = Fraction(gt.NONAGRI_LAND_RATE_PER_M2)
    municipal_rates: dict[str, Fraction] = field(default_factory=dict)
    transfer_params: Optional[TransferParams] = None
    targeted_transfers: dict[str, int] = field(default_factory=dict)
    special_transfers: dict[str, int] = field(default_factory=dict)
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)

    @property
    def income_schedule(self) -> sch.TaxSchedule:
        return self.schedules["income"]


CONFIG_KEYS = {"schedules", "excise_rates", "land_rates", "municipal_rates", "transfer_params", "scenario"}

SCHEDULE_PRESETS = {
    "ge_flat": sch.GEORGIA_FLAT_INCOME,
    "ge_2004": sch.GEORGIA_INCOME_2004,
    **{f"comparator_{k.lower()}": c.schedule for k, c in COMPARATORS.items()},
}


def parse_schedule(spec: dict, name: str = "") -> sch.TaxSchedule:
    if "preset" in spec:
        try:
            return SCHEDULE_PRESETS[spec["preset"]]
        except KeyError:
            raise ValidationError(f"schedule {name}", [f"unknown preset {spec['preset']!r}"]) from None
    kind = spec.get("kind")
    minimum = _money(spec, "non_taxable_minimum", 0)
    currency = spec.get("currency", "GEL")
    if kind == "proportional":
        body = sch.Proportional(to_fraction(spec["rate"]))
    elif kind in ("progressive", "regressive"):
        brackets = tuple(
            sch.Bracket(parse_money(b["lower"]),
                        None if _blank(b.get("upper")) else parse_money(b["upper"]),
                        to_fraction(b["rate"]))
            for b in spec.get("brackets", [])
        )
        cls = sch.Progressive if kind == "progressive" else sch.Regressive
        body = cls(brackets, spec.get("mode", sch.MARGINAL))
    elif kind == "fixed":
        body = sch.Fixed({k: parse_money(v) for k, v in spec.get("amounts", {}).items()})
    else:
        raise ValidationError(f"schedule {name}", [f"unknown schedule kind {kind!r}"])
    schedule = sch.TaxSchedule(body, minimum, currency, spec.get("name", name))
    problems = sch.validate(schedule)
    if problems:
        raise ValidationError(f"schedule {name}", problems)
    return schedule


def _sweep(spec: dict) -> SweepConfig:
    kwargs = {}
    if "base_B0" in spec:
        kwargs["base_B0"] = float(parse_money(spec["base_B0"]))
    if "elasticity_gamma" in spec:
        kwargs["elasticity_gamma"] = float(spec["elasticity_gamma"])
    if "rate_grid" in spec:
        kwargs["rate_grid"] = tuple(float(r) for r in spec["rate_grid"])
    elif "rate_step" in spec:
        kwargs["rate_grid"] = default_grid(float(spec["rate_step"]))
    return SweepConfig(**kwargs)


def config_from_dict(data: dict) -> EngineConfig:
    unknown = set(data) - CONFIG_KEYS
    if unknown:
        raise ValidationError("config", [f"unknown top-level key {k!r}" for k in sorted(unknown)])
    cfg = EngineConfig()
    try:
        for name, spec in data.get("schedules", {}).items():
            cfg.schedules[name] = parse_schedule(spec, name)

        for category, spec in data.get("excise_rates", {}).items():
            if category not in gt.EXCISE_CATEGORY_BASES:
                raise ValidationError("config", [f"unknown excise category {category!r}"])
            if not isinstance(spec, dict):
                spec = {"rate": spec}
            if gt.EXCISE_CATEGORY_BASES[category] is gt.ExciseBase.COMPENSATION:
                rate = to_fraction(spec["rate"])
            else:
                rate = to_fraction(spec["rate"]) * 100
            cfg.excise_rates[category] = ExciseRate(rate, to_fraction(spec.get("age_loading", 0)))

        land = dict(data.get("land_rates", {}))
        if "nonagricultural_base_rate" in land:
            cfg.nonagri_land_rate = to_fraction(land.pop("nonagricultural_base_rate")) * 100
        cfg.land_rates = {k: to_fraction(v) * 100 for k, v in land.get("agricultural", {}).items()}

        rates = dict(data.get("municipal_rates", {}))
        cfg.municipal_rates = {k: to_fraction(v) for k, v in rates.items()}

        tp = data.get("transfer_params")
        if tp is not None:
            tp = dict(tp)
            cfg.targeted_transfers = {k: parse_money(v) for k, v in tp.pop("targeted_transfers", {}).items()}
            cfg.special_transfers = {k: parse_money(v) for k, v in tp.pop("special_transfers", {}).items()}
            cfg.transfer_params = TransferParams(
                nominal_gdp_forecast=parse_money(tp.pop("nominal_gdp_forecast")),
                proposed_G=parse_money(tp.pop("proposed_G")),
                **{k: to_fraction(v) for k, v in tp.items()},
            )

        scen = data.get("scenario", {})
        comparators = dict(COMPARATORS)
        for tag, override in scen.get("comparators", {}).items():
            base = comparators.get(tag)
            fields = {
                "country": tag,
                "min_rate": to_fraction(override.get("min_rate", base.min_rate if base else None)),
                "max_rate": to_fraction(override.get("max_rate", base.max_rate if base else None)),
                "non_taxable_minimum": (parse_money(override["non_taxable_minimum"])
                                        if "non_taxable_minimum" in override else base.non_taxable_minimum),
                "currency": override.get("currency", base.currency if base else "GEL"),
                "pivot": parse_money(override["pivot"]) if "pivot" in override else base.pivot,
            }
            comparators[tag] = ComparatorSchedule(**fields)
        cfg.scenario = ScenarioConfig(
            compare=list(scen.get("compare", [])),
            comparators=comparators,
            sweep=_sweep(scen.get("sweep", {})),
        )
    except ValidationError:
        raise
    except (KeyError, TypeError, AttributeError, ValueError, FiscalError) as exc:
        raise ValidationError("config", [f"{type(exc).__name__}: {exc}"]) from exc
    return cfg


def load_config(path: str | Path | None) -> EngineConfig:
    if path is None:
        return EngineConfig()
    try:
        text = Path(path).read_text(encoding="utf-8")
        data = json.loads(text)
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise IngestIOError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ValidationError("config", ["top level must be a JSON object"])
    return config_from_dict(data)


# Ingestion -----------------------------------------------------------------------

def _read_rows(path: Path) -> list[tuple[int, dict]]:
    try:
        if path.suffix.lower() == ".json":
            data = json.loads(path.read_text(encoding="utf-8"))
            if isinstance(data, dict):
                for key in ("records", "lines"):
                    if isinstance(data.get(key), list):
                        data = data[key]
                        break
            if not isinstance(data, list) or not all(isinstance(r, dict) for r in data):
                raise IngestIOError(f"{path}: expected a JSON array of objects")
            return [(i, row) for i, row in enumerate(data, start=1)]
        with path.open(newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            rows = []
            for row in reader:
                if None in row:
                    raise IngestIOError(f"{path}:{reader.line_num}: more fields than header columns")
                rows.append((reader.line_num, row))
            if reader.fieldnames is None:
                return []
            return rows
    except IngestIOError:
        raise
    except (OSError, UnicodeDecodeError, json.JSONDecodeError, csv.Error) as exc:
        raise IngestIOError(f"cannot read {path}: {exc}") from exc


def ingest(path: str | Path, record_kind: str, config: EngineConfig | None = None,
           strict: bool = True) -> Partition:
    """Read and validate one record file.

    Unknown columns fail the whole file. Invalid rows are collected as
    rejections with their line number (CSV) or element index (JSON); in
    strict mode any rejection raises :class:`ValidationError` listing all of
    them, otherwise valid rows are kept and the rejections returned.
    """
    if record_kind not in RECORD_KINDS:
        raise ValidationError("ingest", [f"unknown record kind {record_kind!r}"])
    config = config or EngineConfig()
    path = Path(path)
    allowed, build = RECORD_KINDS[record_kind]
    allowed = allowed | _COMMON
    rows = _read_rows(path)

    columns = set()
    for _, row in rows:
        columns.update(row)
    unknown = sorted(columns - allowed)
    if unknown:
        raise ValidationError(f"{path}", [f"unknown column {c!r} for {record_kind}" for c in unknown])

    records, rejections = [], []
    for line, row in rows:
        rid = _str(row, "id")
        try:
            value, extra = build(row, config)
            records.append(Record(record_kind, rid, line, value, _str(row, "jurisdiction"),
                                  _bool(row, "in_autonomous_republic"), extra))
        except (ValueError, FiscalError) as exc:
            rejections.append(Rejection(str(path), line, rid, str(exc)))

    if record_kind == "municipalities":
        # a group-level failure cannot be repaired by dropping rows
        problems = check_shares(r.value for r in records)
        if problems and not rejections:
            raise ValidationError(f"{path}", problems)
    if strict and rejections:
        raise ValidationError(f"{path}: {len(rejections)} rejected row(s)",
                              [f"line {r.line}: {r.reason}" for r in rejections])
    return Partition(record_kind, str(path), records, rejections)
