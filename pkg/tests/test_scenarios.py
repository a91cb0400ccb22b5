from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fiscal_engine import scenarios as scn
from fiscal_engine import schedules as sch
from fiscal_engine.errors import CurrencyMismatchError, ValidationError
from fiscal_engine.money import gel

from oracles import per_unit_tax, revenue_curve

UK = scn.COMPARATORS["UK"]


def test_flat_population():
    assert scn.compare_schedules([gel("1000")], [sch.GEORGIA_FLAT_INCOME]) == [gel("200")]


def test_empty_population():
    assert scn.compare_schedules([], [sch.GEORGIA_FLAT_INCOME, sch.GEORGIA_INCOME_2004]) == [0, 0]


def test_uk_two_bracket():
    # oracle in pounds: per_unit_tax([0, 150000], [.20, .45], 20000, minimum=9441) == 2111.80
    expected = per_unit_tax([0, 150_000], [Fraction(20, 100), Fraction(45, 100)], 20_000, 9_441) * 100
    assert expected == gel("2111.80")
    pop = [(gel("9441"), "GBP"), (gel("20000"), "GBP")]
    assert scn.compare_schedules(pop, [UK.schedule]) == [gel("2111.80")]


def test_currency_mix_rejected():
    with pytest.raises(CurrencyMismatchError):
        scn.compare_schedules([(1, "GBP"), (1, "EUR")], [UK.schedule])
    with pytest.raises(CurrencyMismatchError):
        scn.compare_schedules([(1, "EUR")], [UK.schedule])


def test_comparators_carry_published_spans():
    spans = {k: (c.min_rate, c.max_rate, c.non_taxable_minimum, c.currency) for k, c in scn.COMPARATORS.items()}
    assert spans["AZ"] == (Fraction(12, 100), Fraction(35, 100), gel("1200000"), "AZN")
    assert spans["FR"] == (Fraction(55, 1000), Fraction(45, 100), gel("5963"), "EUR")
    assert spans["DE"][:2] == (Fraction(14, 100), Fraction(45, 100))
    assert spans["UK"] == (Fraction(20, 100), Fraction(45, 100), gel("9441"), "GBP")
    assert all(c.approximation and "approximation" in c.schedule.name for c in scn.COMPARATORS.values())
    with pytest.raises(ValidationError):
        scn.ComparatorSchedule("XX", Fraction(1, 2), Fraction(1, 3), 0, "EUR", 1)


@given(st.lists(st.integers(0, 10**8), max_size=30), st.integers(0, 100))
def test_flat_rate_identity(incomes, pct):
    s = sch.proportional(Fraction(pct, 100))
    total, = scn.compare_schedules(incomes, [s])
    exact = sum(sch.evaluate_exact(s, i) for i in incomes)
    assert exact == Fraction(pct, 100) * sum(incomes)
    assert abs(total - exact) <= len(incomes) / 2


@given(st.lists(st.integers(0, 10**8), max_size=30))
def test_dominance(incomes):
    # 2004 schedule is pointwise at least 12% flat, at most 20% flat
    low, hist, high = scn.compare_schedules(
        incomes, [sch.proportional(Fraction(12, 100)), sch.GEORGIA_INCOME_2004, sch.GEORGIA_FLAT_INCOME])
    assert low <= hist <= high


class TestSweep:
    def test_default_sweep(self):
        result = scn.laffer_sweep(scn.SweepConfig())
        assert len(result.points) == 101
        assert result.points[0].revenue == 0
        assert result.points[-1].revenue == 0
        assert 0.34 <= result.argmax_rate <= 0.36
        assert scn.is_unimodal(result.revenues)
        assert result.analytic_peak == pytest.approx(0.35)

    def test_matches_pointwise_oracle(self):
        rates, revenue = revenue_curve(scn.DEFAULT_GAMMA, base=1e9)
        result = scn.laffer_sweep(scn.SweepConfig(base_B0=1e9))
        np.testing.assert_allclose(result.revenues, revenue, rtol=1e-12, atol=1e-6)
        assert result.argmax_rate == pytest.approx(rates[int(np.argmax(revenue))])

    @settings(max_examples=50)
    @given(st.floats(0.2, 10))
    def test_argmax_tracks_gamma(self, gamma):
        result = scn.laffer_sweep(scn.SweepConfig(elasticity_gamma=gamma))
        assert abs(result.argmax_rate - 1 / (1 + gamma)) <= 0.01

    def test_invalid(self):
        with pytest.raises(ValidationError):
            scn.SweepConfig(elasticity_gamma=0)
        with pytest.raises(ValidationError):
            scn.SweepConfig(rate_grid=(0.5, 0.2))
        with pytest.raises(ValidationError):
            scn.SweepConfig(rate_grid=(0.0, 1.5))

    def test_custom_base_model(self):
        linear = lambda b0, r, g: b0 * (1 - r)  # noqa: E731
        result = scn.laffer_sweep(scn.SweepConfig(base_model=linear))
        assert result.argmax_rate == pytest.approx(0.5)

    def test_unimodal_helper(self):
        assert scn.is_unimodal([0, 1, 2, 1, 0])
        assert not scn.is_unimodal([0, 1, 0, 1, 0])
        assert not scn.is_unimodal([0, 1, 2])
