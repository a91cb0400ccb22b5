"""Command-line entry point.

    fiscal-engine compute   --input persons.csv --input imports=decl.json [--config cfg.json]
    fiscal-engine transfers --input municipalities.csv --config cfg.json
    fiscal-engine budget    --input ledger=compute.json [--input municipalities.csv --config cfg.json]
    fiscal-engine scenario  --input incomes.csv [--config cfg.json]
    fiscal-engine sweep     [--config cfg.json]

``--input`` takes ``KIND=PATH`` or a bare path whose file name starts with
the record kind. Exit codes: 0 success, 1 validation failure, 2 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from . import budget as bud
from . import geo_tax as gt
from . import schedules as sch
from . import scenarios as scn
from . import transfers as trf
from .errors import FiscalError
from .ingest import RECORD_KINDS, EngineConfig, IngestIOError, Partition, Record, Rejection, ingest, load_config
from .money import format_money, format_rate

log = logging.getLogger("fiscal_engine")

EXIT_OK, EXIT_VALIDATION, EXIT_IO = 0, 1, 2
COMMANDS = ("compute", "transfers", "budget", "scenario", "sweep")
COMPUTE_KINDS = ("persons", "enterprises", "imports", "supplies", "excise", "properties")


@dataclass
class RunConfig:
    command: str
    inputs: list[tuple[str, Path]] = field(default_factory=list)
    config_path: Path | None = None
    output_format: str = "table"
    strict: bool = True
    out: Path | None = None


class UsageError(FiscalError):
    pass


def parse_input(spec: str) -> tuple[str, Path]:
    if "=" in spec:
        kind, _, path = spec.partition("=")
        kind = kind.strip()
    else:
        path = spec
        stem = Path(spec).stem.lower()
        matches = [k for k in RECORD_KINDS if stem.startswith(k)]
        if not matches:
            raise UsageError(f"cannot infer record kind of {spec!r}; use KIND=PATH "
                             f"with KIND one of {', '.join(RECORD_KINDS)}")
        kind = max(matches, key=len)
    if kind not in RECORD_KINDS:
        raise UsageError(f"unknown record kind {kind!r}")
    return kind, Path(path)


# Compute -----------------------------------------------------------------------

def _line(rec: Record, tax_kind: str, base: int, amount: int, credit: bool = False,
          detail: str = "") -> gt.LiabilityLine:
    return gt.LiabilityLine(rec.kind, rec.id, tax_kind, base, amount, rec.jurisdiction,
                            rec.in_autonomous_republic, credit, detail)


def liabilities(rec: Record, config: EngineConfig) -> list[gt.LiabilityLine]:
    """Liability lines for one validated record, in a fixed order per kind."""
    v = rec.value
    if rec.kind == "persons":
        lines = [_line(rec, "income", v.monthly_income, gt.income_tax(v, config.income_schedule))]
        for age in v.vehicles:
            amount = gt.property_tax(gt.VehicleHolding(age), v.annual_family_income)
            lines.append(_line(rec, "property", 0, amount, detail=f"vehicle age {age}"))
        return lines
    if rec.kind == "enterprises":
        if v.regime is gt.Regime.STANDARD:
            model = rec.extra["profit_model"]
            amount = gt.profit_tax(v, model, rec.extra["gross_up"])
            if model is gt.ProfitModel.CLASSIC:
                base = v.taxable_profit
            else:
                base = v.distributed_profit + v.non_business_expense
            lines = [_line(rec, "profit", base, amount, detail=model.value)]
        else:
            # turnover tax replaces income tax for micro and small entrepreneurs
            lines = [_line(rec, "income", v.annual_turnover, gt.turnover_regime_tax(v),
                           detail=f"{v.regime.value} turnover regime")]
        assets = rec.extra.get("assets")
        if assets is not None:
            lines.append(_line(rec, "property", gt.property_base(assets),
                               gt.property_tax(assets), detail="enterprise assets"))
        return lines
    if rec.kind == "imports":
        duty = gt.import_duty(v)
        result = gt.declaration_vat(v, duty)
        if v.operation is gt.Operation.TEMPORARY_IMPORT:
            vat_base = gt.would_be_import_vat(v)
        elif result.input_credit:
            vat_base = v.customs_value
        else:
            vat_base = v.customs_value + duty + v.excise_amount
        return [
            _line(rec, "import_duty", v.customs_value, duty, detail=v.operation.value),
            _line(rec, "vat", vat_base, result.amount, result.input_credit, detail=v.operation.value),
        ]
    if rec.kind == "supplies":
        result = gt.vat(v)
        return [_line(rec, "vat", rec.extra["amount"], result.amount, result.input_credit,
                      detail=rec.extra["supply_kind"])]
    if rec.kind == "excise":
        base = int(v.quantity) if v.base is gt.ExciseBase.COMPENSATION else 0
        return [_line(rec, "excise", base, gt.excise(v), detail=v.category)]
    if rec.kind == "properties":
        amount = gt.property_tax(v, rec.extra.get("family_income"))
        return [_line(rec, "property", gt.property_base(v), amount, detail=rec.extra["property_kind"])]
    raise UsageError(f"compute does not handle {rec.kind} records")


def compute(partitions: Sequence[Partition], config: EngineConfig, strict: bool = True):
    lines: list[gt.LiabilityLine] = []
    rejections: list[Rejection] = [r for p in partitions for r in p.rejections]
    for part in partitions:
        for rec in part.records:
            try:
                lines.extend(liabilities(rec, config))
            except (FiscalError, ValueError) as exc:
                rejections.append(Rejection(part.source, rec.line, rec.id, str(exc)))
    if strict and rejections:
        raise RejectedRecords(rejections)
    return lines, rejections


class RejectedRecords(FiscalError):
    def __init__(self, rejections: list[Rejection]):
        self.rejections = rejections
        super().__init__(f"{len(rejections)} record(s) rejected")


# Report documents ----------------------------------------------------------------

def _line_dict(line: gt.LiabilityLine) -> dict:
    return {
        "record_kind": line.record_kind,
        "record_id": line.record_id,
        "tax_kind": line.tax_kind,
        "base": format_money(line.base),
        "amount": format_money(line.amount),
        "jurisdiction": line.jurisdiction,
        "in_autonomous_republic": line.in_autonomous_republic,
        "input_credit": line.input_credit,
        "detail": line.detail,
    }


def compute_document(lines, rejections) -> dict:
    return {
        "command": "compute",
        "lines": [_line_dict(line) for line in lines],
        "totals": {k: format_money(v) for k, v in gt.sum_lines(lines).items()},
        "rejections": [r.as_dict() for r in rejections],
    }


def allocation_document(alloc: trf.TransferAllocation) -> dict:
    return {
        "command": "transfers",
        "G": format_money(alloc.G),
        "G_city": format_money(alloc.G_city),
        "G_m": format_money(alloc.G_m),
        "units": [
            {"id": u.id, "kind": u.kind.value, "E": format_money(u.E), "R": format_money(u.R),
             "T": format_money(u.T)}
            for u in alloc.units.values()
        ],
        "group_need": {k.value: format_money(v) for k, v in alloc.group_need.items()},
        "group_transfer": {k.value: format_money(v) for k, v in alloc.group_transfer.items()},
        "targeted_transfers": {k: format_money(v) for k, v in alloc.targeted_transfers.items()},
        "special_transfers": {k: format_money(v) for k, v in alloc.special_transfers.items()},
    }


def budget_document(report: bud.BudgetReport, rejections=()) -> dict:
    return {
        "command": "budget",
        "state_total": format_money(report.state_total),
        "local": {k: format_money(v) for k, v in report.local.items()},
        "consolidated_total": format_money(report.consolidated_total),
        "transfers": [{"locality": t.locality, "amount": format_money(t.amount), "kind": t.kind}
                      for t in report.transfers],
        "rejections": [r.as_dict() for r in rejections],
    }


def sweep_document(result: scn.SweepResult) -> dict:
    return {
        "command": "sweep",
        "gamma": result.gamma,
        "argmax_rate": result.argmax_rate,
        "analytic_peak": result.analytic_peak,
        "unimodal": scn.is_unimodal(result.revenues),
        "points": [{"rate": p.rate, "modeled_base": p.modeled_base, "revenue": p.revenue}
                   for p in result.points],
    }


# Table rendering ---------------------------------------------------------------

def _table(headers: Sequence[str], rows: Iterable[Sequence]) -> str:
    rows = [[str(c) for c in row] for row in rows]
    widths = [max([len(h)] + [len(r[i]) for r in rows]) for i, h in enumerate(headers)]
    out = ["  ".join(h.ljust(w) for h, w in zip(headers, widths)),
           "  ".join("-" * w for w in widths)]
    out += ["  ".join(c.ljust(w) for c, w in zip(r, widths)) for r in rows]
    return "\n".join(out)


def render_table(doc: dict) -> str:
    cmd = doc["command"]
    parts = []
    if cmd == "compute":
        parts.append(_table(["kind", "id", "tax", "base", "amount", "detail"],
                            [[l["record_kind"], l["record_id"], l["tax_kind"], l["base"], l["amount"],
                              l["detail"]] for l in doc["lines"]]))
        parts.append(_table(["tax", "total"], list(doc["totals"].items())))
    elif cmd == "transfers":
        parts.append(f"G = {doc['G']}  (cities {doc['G_city']}, municipalities {doc['G_m']})")
        parts.append(_table(["id", "kind", "E", "R", "T"],
                            [[u["id"], u["kind"], u["E"], u["R"], u["T"]] for u in doc["units"]]))
    elif cmd == "budget":
        rows = [["state", doc["state_total"]]] + [[k, v] for k, v in doc["local"].items()]
        rows.append(["consolidated", doc["consolidated_total"]])
        parts.append(_table(["budget", "total"], rows))
    elif cmd == "scenario":
        parts.append(_table(["schedule", "currency", "population", "revenue", "note"],
                            [[r["schedule"], r["currency"], r["population"], r["revenue"],
                              "approximation" if r["approximation"] else ""] for r in doc["results"]]))
    elif cmd == "sweep":
        parts.append(f"argmax rate: {doc['argmax_rate']:.2f}  "
                     f"(continuous peak {doc['analytic_peak']:.4f}, gamma {doc['gamma']:.4f})")
        parts.append(_table(["rate", "modeled_base", "revenue"],
                            [[f"{p['rate']:.2f}", f"{p['modeled_base']:.2f}", f"{p['revenue']:.2f}"]
                             for p in doc["points"]]))
    if doc.get("rejections"):
        parts.append(_table(["source", "line", "id", "reason"],
                            [[r["source"], r["line"], r["record_id"], r["reason"]] for r in doc["rejections"]]))
    return "\n\n".join(parts) + "\n"


def render(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    return render_table(doc)


# Commands ------------------------------------------------------------------------

def _partitions(run: RunConfig, config: EngineConfig, allowed: Sequence[str]) -> list[Partition]:
    parts = []
    for kind, path in run.inputs:
        if kind not in allowed:
            raise UsageError(f"{run.command} does not accept {kind} input")
        parts.append(ingest(path, kind, config, strict=run.strict))
    return parts


def _allocation(munis: list[Partition], config: EngineConfig) -> trf.TransferAllocation:
    if config.transfer_params is None:
        raise UsageError("transfer_params missing from config")
    registry = sorted((r.value for p in munis for r in p.records), key=lambda m: m.id)
    return trf.allocate(registry, config.transfer_params,
                        targeted=config.targeted_transfers, special=config.special_transfers)


def build_document(run: RunConfig) -> dict:
    config = load_config(run.config_path)
    if run.command == "compute":
        parts = _partitions(run, config, COMPUTE_KINDS)
        lines, rejections = compute(parts, config, run.strict)
        return compute_document(lines, rejections)
    if run.command == "transfers":
        parts = _partitions(run, config, ["municipalities"])
        return allocation_document(_allocation(parts, config))
    if run.command == "budget":
        parts = _partitions(run, config, ["ledger", "municipalities"])
        ledger = [r.value for p in parts if p.kind == "ledger" for r in p.records]
        munis = [p for p in parts if p.kind == "municipalities"]
        localities = [r.value.id for p in munis for r in p.records]
        report = bud.allocate_revenue(ledger, localities)
        if munis:
            report = bud.consolidate(report, _allocation(munis, config))
        return budget_document(report, [r for p in parts for r in p.rejections])
    if run.command == "scenario":
        parts = _partitions(run, config, ["incomes"])
        by_currency: dict[str, list[int]] = {}
        for p in parts:
            for r in p.records:
                amount, currency = r.value
                by_currency.setdefault(currency, []).append(amount)
        results = []
        for name in config.scenario.compare or ["income", "income_2004"]:
            if name not in config.schedules:
                raise UsageError(f"scenario compares unknown schedule {name!r}")
            s = config.schedules[name]
            pop = by_currency.get(s.currency, [])
            (total,) = scn.compare_schedules(pop, [s])
            results.append({"schedule": s.name or name, "currency": s.currency, "population": len(pop),
                            "revenue": total, "approximation": False})
        results += scn.comparator_table(by_currency, config.scenario.comparators)
        for row in results:
            row["revenue"] = format_money(row["revenue"])
        return {"command": "scenario", "results": results,
                "rejections": [r.as_dict() for p in parts for r in p.rejections]}
    if run.command == "sweep":
        if run.inputs:
            raise UsageError("sweep takes no --input")
        return sweep_document(scn.laffer_sweep(config.scenario.sweep))
    raise UsageError(f"unknown command {run.command!r}")


def run(run_cfg: RunConfig) -> int:
    """Execute one command; returns the process exit code."""
    try:
        doc = build_document(run_cfg)
    except IngestIOError as exc:
        log.error("%s", exc)
        return EXIT_IO
    except RejectedRecords as exc:
        for r in exc.rejections:
            log.error("%s:%s [%s] %s", r.source, r.line, r.record_id, r.reason)
        log.error("%s; rerun with --lenient to keep the valid records", exc)
        return EXIT_VALIDATION
    except (FiscalError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_VALIDATION
    text = render(doc, run_cfg.output_format)
    if run_cfg.out is None:
        sys.stdout.write(text)
        return EXIT_OK
    try:
        run_cfg.out.write_text(text, encoding="utf-8")
    except OSError as exc:
        log.error("cannot write %s: %s", run_cfg.out, exc)
        return EXIT_IO
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fiscal-engine", description="Georgian fiscal rules engine")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--input", action="append", default=[], metavar="[KIND=]PATH")
        p.add_argument("--config", type=Path)
        p.add_argument("--format", choices=("table", "json"), default="table")
        mode = p.add_mutually_exclusive_group()
        mode.add_argument("--strict", dest="strict", action="store_true", default=True)
        mode.add_argument("--lenient", dest="strict", action="store_false")
        p.add_argument("--out", type=Path)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        inputs = [parse_input(spec) for spec in args.input]
    except UsageError as exc:
        log.error("%s", exc)
        return EXIT_VALIDATION
    return run(RunConfig(args.command, inputs, args.config, args.format, args.strict, args.out))


if __name__ == "__main__":
    sys.exit(main())
