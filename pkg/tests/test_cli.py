import json
from pathlib import Path

import pytest

from fiscal_engine import cli
from fiscal_engine.errors import ValidationError
from fiscal_engine.ingest import ingest, load_config

FIX = Path(__file__).parent / "fixtures"
CONFIG = str(FIX / "config.json")
COMPUTE_INPUTS = ["persons.csv", "enterprises.csv", "imports.json", "supplies.csv", "excise.csv",
                  "properties.csv"]


def write(path: Path, text: str) -> Path:
    path.write_text(text, encoding="utf-8")
    return path


def run_json(tmp_path, *argv, name="out.json"):
    out = tmp_path / name
    code = cli.main([*argv, "--format", "json", "--out", str(out)])
    return code, (json.loads(out.read_text()) if code == 0 else None)


def compute_args():
    args = ["compute", "--config", CONFIG]
    for f in COMPUTE_INPUTS:
        args += ["--input", str(FIX / f)]
    return args


class TestIngest:
    def test_single_person(self, tmp_path):
        p = write(tmp_path / "persons.csv", "id,monthly_income\np1,1000.00\n")
        part = ingest(p, "persons")
        assert len(part.records) == 1 and part.rejections == []
        assert part.records[0].value.monthly_income == 100_000

    def test_negative_income_rejected_with_line(self, tmp_path):
        p = write(tmp_path / "persons.csv", "id,monthly_income\np1,1000.00\np2,-5.00\n")
        with pytest.raises(ValidationError, match="line 3"):
            ingest(p, "persons")
        part = ingest(p, "persons", strict=False)
        assert [r.id for r in part.records] == ["p1"]
        assert [(r.line, r.record_id) for r in part.rejections] == [(3, "p2")]

    def test_unknown_column(self, tmp_path):
        p = write(tmp_path / "persons.csv", "id,monthly_income,shoe_size\np1,1,42\n")
        with pytest.raises(ValidationError, match="shoe_size"):
            ingest(p, "persons", strict=False)

    def test_share_sum_fails_group(self, tmp_path):
        p = write(tmp_path / "m.csv",
                  "id,kind,coefficient_share,actual_t3,actual_t2,actual_t1,forecast_current\n"
                  "a,city,1,0,0,0,0\n"
                  "m1,municipality,0.5,0,0,0,0\n"
                  "m2,municipality,0.4,0,0,0,0\n")
        with pytest.raises(ValidationError, match="municipality"):
            ingest(p, "municipalities", strict=False)

    def test_json_index_as_line(self, tmp_path):
        p = write(tmp_path / "imports.json",
                  json.dumps([{"id": "a", "operation": "import", "customs_value": "1.00"},
                              {"id": "b", "operation": "smuggle", "customs_value": "1.00"}]))
        part = ingest(p, "imports", strict=False)
        assert [(r.line, r.record_id) for r in part.rejections] == [(2, "b")]

    def test_every_fixture_row_accounted_for(self):
        config = load_config(CONFIG)
        for f in COMPUTE_INPUTS + ["municipalities.csv", "incomes.csv"]:
            kind, path = cli.parse_input(str(FIX / f))
            part = ingest(path, kind, config, strict=False)
            text = path.read_text()
            n_rows = len(json.loads(text)) if path.suffix == ".json" else len(text.strip().splitlines()) - 1
            assert len(part.records) + len(part.rejections) == n_rows, f

    def test_missing_file(self, tmp_path):
        from fiscal_engine.ingest import IngestIOError
        with pytest.raises(IngestIOError):
            ingest(tmp_path / "nope.csv", "persons")

    def test_config_errors(self, tmp_path):
        with pytest.raises(ValidationError, match="unknown top-level"):
            load_config(write(tmp_path / "c.json", '{"colour": 1}'))
        bad_gap = {"schedules": {"x": {"kind": "progressive", "brackets": [
            {"lower": "0", "upper": "200", "rate": "0.1"}, {"lower": "250", "upper": None, "rate": "0.2"}]}}}
        with pytest.raises(ValidationError, match="gap"):
            load_config(write(tmp_path / "c.json", json.dumps(bad_gap)))


class TestParseInput:
    def test_forms(self):
        assert cli.parse_input("ledger=out.json") == ("ledger", Path("out.json"))
        assert cli.parse_input("data/municipalities_2026.csv")[0] == "municipalities"
        with pytest.raises(cli.UsageError):
            cli.parse_input("stuff.csv")
        with pytest.raises(cli.UsageError):
            cli.parse_input("bogus=stuff.csv")


class TestCommands:
    def test_compute(self, tmp_path):
        code, doc = run_json(tmp_path, *compute_args())
        assert code == 0
        amounts = {(l["record_id"], l["tax_kind"]): l["amount"] for l in doc["lines"]}
        assert amounts[("p1", "income")] == "200.00"
        assert amounts[("i1", "import_duty")] == "125.00"
        assert amounts[("i2", "vat")] == "210.60"
        assert amounts[("h1", "property")] == "200.00"
        assert amounts[("e2", "profit")] == "15000.00"
        assert doc["rejections"] == []

    def test_transfers(self, tmp_path):
        code, doc = run_json(tmp_path, "transfers", "--config", CONFIG,
                             "--input", str(FIX / "municipalities.csv"))
        assert code == 0
        assert (doc["G"], doc["G_city"], doc["G_m"]) == ("1600000000.00", "1152000000.00", "448000000.00")
        units = {u["id"]: u for u in doc["units"]}
        assert units["TB"]["R"] == "130.00" and units["BT"]["R"] == "100.00"

    def test_scenario(self, tmp_path):
        code, doc = run_json(tmp_path, "scenario", "--config", CONFIG, "--input", str(FIX / "incomes.csv"))
        assert code == 0
        rows = {r["schedule"]: r for r in doc["results"]}
        uk = next(r for r in doc["results"] if r["currency"] == "GBP")
        assert uk["revenue"] == "2111.80" and uk["approximation"]
        assert any(r["revenue"] == "340.00" for r in rows.values())  # 200 + 140 under the flat rate

    def test_sweep(self, tmp_path):
        code, doc = run_json(tmp_path, "sweep", "--config", CONFIG)
        assert code == 0
        assert 0.34 <= doc["argmax_rate"] <= 0.36 and doc["unimodal"]

    def test_table_output(self, capsys):
        assert cli.main(["transfers", "--config", CONFIG, "--input", str(FIX / "municipalities.csv")]) == 0
        assert "G = 1600000000.00" in capsys.readouterr().out

    def test_round_trip_through_budget(self, tmp_path):
        code, doc = run_json(tmp_path, *compute_args(), name="compute.json")
        assert code == 0
        code, budget = run_json(tmp_path, "budget", "--input", f"ledger={tmp_path / 'compute.json'}",
                                name="budget.json")
        assert code == 0
        total = sum(round(float(v) * 100) for v in doc["totals"].values())
        assert round(float(budget["consolidated_total"]) * 100) == total

        code, consolidated = run_json(tmp_path, "budget", "--config", CONFIG,
                                      "--input", f"ledger={tmp_path / 'compute.json'}",
                                      "--input", str(FIX / "municipalities.csv"), name="cons.json")
        assert code == 0
        assert consolidated["consolidated_total"] == budget["consolidated_total"]
        assert consolidated["transfers"]

    def test_deterministic(self, tmp_path):
        a = tmp_path / "a.json"
        b = tmp_path / "b.json"
        assert cli.main([*compute_args(), "--format", "json", "--out", str(a)]) == 0
        assert cli.main([*compute_args(), "--format", "json", "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()


class TestExitCodes:
    def test_validation_strict(self, tmp_path):
        p = write(tmp_path / "persons.csv", "id,monthly_income\np1,1000.00\np2,-5.00\n")
        assert cli.main(["compute", "--input", str(p)]) == cli.EXIT_VALIDATION

    def test_lenient_keeps_valid_rows(self, tmp_path):
        p = write(tmp_path / "persons.csv", "id,monthly_income\np1,1000.00\np2,-5.00\n")
        code, doc = run_json(tmp_path, "compute", "--lenient", "--input", str(p))
        assert code == 0
        assert [l["record_id"] for l in doc["lines"]] == ["p1"]
        assert [r["line"] for r in doc["rejections"]] == [3]

    def test_compute_time_failure_is_reported(self, tmp_path):
        # an excise category with no configured rate fails at compute, not ingest
        p = write(tmp_path / "excise.csv", "id,category,quantity\nx1,tobacco,10\n")
        assert cli.main(["compute", "--input", str(p)]) == cli.EXIT_VALIDATION
        code, doc = run_json(tmp_path, "compute", "--lenient", "--input", str(p))
        assert code == 0 and doc["lines"] == [] and len(doc["rejections"]) == 1

    def test_io(self, tmp_path):
        assert cli.main(["compute", "--input", f"persons={tmp_path / 'missing.csv'}"]) == cli.EXIT_IO
        assert cli.main(["sweep", "--config", str(tmp_path / "missing.json")]) == cli.EXIT_IO
        assert cli.main(["sweep", "--out", str(tmp_path / "no" / "dir" / "x.txt")]) == cli.EXIT_IO

    def test_usage(self, tmp_path):
        assert cli.main(["transfers", "--input", str(FIX / "municipalities.csv")]) == cli.EXIT_VALIDATION
        assert cli.main(["sweep", "--input", str(FIX / "persons.csv")]) == cli.EXIT_VALIDATION
        assert cli.main(["compute", "--input", str(FIX / "municipalities.csv")]) == cli.EXIT_VALIDATION
