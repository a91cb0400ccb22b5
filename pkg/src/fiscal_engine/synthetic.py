"""Seeded synthetic record files for benchmarks and determinism checks."""

from __future__ import annotations

import csv
import json
import random
from pathlib import Path

from .money import format_money

JURISDICTIONS = ("TB", "BT", "KU", "RU", "ZU")


def _persons(rng: random.Random, n: int) -> list[dict]:
    rows = []
    for i in range(n):
        ages = [str(rng.randint(1, 15)) for _ in range(rng.choice((0, 0, 1, 2)))]
        rows.append({
            "id": f"p{i:06d}",
            "monthly_income": format_money(rng.randint(0, 800_000)),
            "annual_family_income": format_money(rng.randint(0, 20_000_000)),
            "vehicle_ages": ";".join(ages),
            "jurisdiction": rng.choice(JURISDICTIONS),
            "in_autonomous_republic": str(rng.random() < 0.1).lower(),
        })
    return rows


def _enterprises(rng: random.Random, n: int) -> list[dict]:
    rows = []
    for i in range(n):
        regime = rng.choice(("standard", "standard", "small", "micro"))
        row = {"id": f"e{i:06d}", "regime": regime, "jurisdiction": rng.choice(JURISDICTIONS)}
        if regime == "standard":
            model = rng.choice(("classic", "estonian"))
            row["profit_model"] = model
            if model == "classic":
                row["taxable_profit"] = format_money(rng.randint(0, 10**9))
            else:
                row["distributed_profit"] = format_money(rng.randint(0, 10**8))
                row["non_business_expense"] = format_money(rng.randint(0, 10**7))
            begin = rng.randint(0, 10**9)
            row["asset_value_begin"] = format_money(begin)
            row["asset_value_end"] = format_money(rng.randint(0, 10**9))
        elif regime == "small":
            row["annual_turnover"] = format_money(rng.randint(3_000_000, 9_999_999))
            row["documented_expense_share"] = f"{rng.randint(0, 100) / 100:.2f}"
            row["employs_hired_labor"] = "true"
        else:
            row["annual_turnover"] = format_money(rng.randint(0, 2_999_999))
            row["employs_hired_labor"] = "false"
        rows.append(row)
    return rows


def _imports(rng: random.Random, n: int) -> list[dict]:
    rows = []
    for i in range(n):
        op = rng.choice(("import", "import", "temporary_import", "export"))
        row = {"id": f"i{i:06d}", "operation": op, "customs_value": format_money(rng.randint(0, 10**8))}
        if op == "temporary_import":
            row["months"] = rng.randint(1, 24)
        if op != "export":
            row["duty_class"] = rng.choice(("pct12", "pct5", "exempt"))
            row["excise_amount"] = format_money(rng.randint(0, 10**6))
        if op == "import" and rng.random() < 0.2:
            row.update(goods="vehicle", engine_cc=rng.randint(800, 5000), years_in_service=rng.randint(0, 20))
        rows.append(row)
    return rows


def _write_csv(path: Path, rows: list[dict]) -> None:
    columns = sorted({k for r in rows for k in r})
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns)
        writer.writeheader()
        writer.writerows(rows)


def make_dataset(directory: str | Path, n_records: int = 10_000, seed: int = 0) -> list[tuple[str, Path]]:
    """Write persons, enterprises and imports files totalling ``n_records`` rows.

    Returns ``(kind, path)`` pairs ready for the compute command.
    """
    rng = random.Random(seed)
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    n_p = n_records // 2
    n_e = n_records // 4
    n_i = n_records - n_p - n_e
    persons, enterprises = directory / "persons.csv", directory / "enterprises.csv"
    imports = directory / "imports.json"
    _write_csv(persons, _persons(rng, n_p))
    _write_csv(enterprises, _enterprises(rng, n_e))
    imports.write_text(json.dumps(_imports(rng, n_i), indent=1), encoding="utf-8")
    return [("persons", persons), ("enterprises", enterprises), ("imports", imports)]
