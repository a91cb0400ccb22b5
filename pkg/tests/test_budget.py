import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fiscal_engine.budget import RevenueEntry, allocate_revenue, consolidate
from fiscal_engine.errors import DataError
from fiscal_engine.geo_tax import TAX_KINDS

entries = st.builds(
    RevenueEntry,
    tax_kind=st.sampled_from(TAX_KINDS),
    amount=st.integers(0, 10**12),
    jurisdiction=st.sampled_from(["X", "Y", "Z"]),
    in_autonomous_republic=st.booleans(),
)


def test_worked_example():
    report = allocate_revenue([
        RevenueEntry("vat", 100), RevenueEntry("profit", 50),
        RevenueEntry("property", 30, "X"), RevenueEntry("income", 70, "X"),
    ])
    assert report.state_total == 220
    assert report.local == {"X": 30}


def test_empty_ledger():
    report = allocate_revenue([])
    assert (report.state_total, report.local, report.consolidated_total) == (0, {}, 0)


def test_autonomous_republic_income():
    report = allocate_revenue([RevenueEntry("income", 70, "Y", in_autonomous_republic=True)])
    assert report.state_total == 0
    assert report.local == {"Y": 70}


@pytest.mark.parametrize("kind", ["profit", "vat", "excise", "import_duty"])
def test_state_taxes_ignore_locality(kind):
    report = allocate_revenue([RevenueEntry(kind, 9, "X", in_autonomous_republic=True)])
    assert report.state_total == 9 and report.local == {}


def test_unknown_kind():
    with pytest.raises(DataError):
        RevenueEntry("hotel_fee", 1, "X")


def test_consolidate():
    report = allocate_revenue([RevenueEntry("vat", 100), RevenueEntry("property", 5, "X")], ["Y"])
    after = consolidate(report, {"X": 20})
    assert after.state_total == 80 and after.local["X"] == 25
    assert after.consolidated_total == report.consolidated_total
    assert consolidate(report, {}) == report
    both = consolidate(report, {"X": 20, "Y": 30})
    assert both.state_total == report.state_total - 50
    assert sum(both.local.values()) == sum(report.local.values()) + 50


def test_consolidate_unknown_locality():
    with pytest.raises(DataError):
        consolidate(allocate_revenue([]), {"nowhere": 1})


@given(st.lists(entries, max_size=40), st.randoms())
def test_conservation_and_permutation(ledger, rnd):
    report = allocate_revenue(ledger)
    assert report.consolidated_total == sum(e.amount for e in ledger)
    shuffled = list(ledger)
    rnd.shuffle(shuffled)
    assert allocate_revenue(shuffled) == report


@given(st.lists(entries, max_size=40), st.dictionaries(st.sampled_from(["X", "Y", "Z"]), st.integers(0, 10**9)))
def test_consolidation_preserves_total(ledger, transfers):
    report = allocate_revenue(ledger, ["X", "Y", "Z"])
    after = consolidate(report, transfers)
    assert after.consolidated_total == report.consolidated_total
