from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fiscal_engine import transfers as trf
from fiscal_engine.errors import DataError, DomainError, ValidationError
from fiscal_engine.money import gel

from oracles import ols_projection

M = 10**6  # "millions" in the fixtures


def unit(uid, share, kind="city", actuals=(0, 0, 0), current=0):
    return trf.Municipality(uid, kind, share, actuals, current)


def params(gdp=gel(40_000 * M), proposed=gel(1_400 * M)):
    return trf.TransferParams(gdp, proposed)


class TestPool:
    def test_floor_binds(self):
        assert trf.determine_G(params()) == gel(1_600 * M)

    def test_floor_slack(self):
        assert trf.determine_G(params(proposed=gel(2_000 * M))) == gel(2_000 * M)

    def test_boundary(self):
        assert trf.determine_G(params(proposed=gel(1_600 * M))) == gel(1_600 * M)

    def test_gdp_must_be_positive(self):
        with pytest.raises(DomainError):
            trf.determine_G(params(gdp=0))

    def test_split(self):
        assert trf.split_G(gel("1000")) == (gel("720"), gel("280"))
        assert trf.split_G(0) == (0, 0)
        assert trf.split_G(1) == (1, 0)
        assert trf.split_G(gel(1_600 * M)) == (gel(1_152 * M), gel(448 * M))

    @given(st.integers(0, 10**15))
    def test_split_conserves(self, G):
        city, m = trf.split_G(G)
        assert city + m == G
        assert abs(city - Fraction(72, 100) * G) < 1

    def test_params_invariants(self):
        with pytest.raises(ValidationError):
            trf.TransferParams(1, 1, city_share=Fraction(7, 10), municipality_share=Fraction(2, 10))


class TestNeedAndRevenue:
    def test_expenditure_need(self):
        assert trf.expenditure_need(unit("a", "0.6"), gel("100")) == gel("60")
        assert trf.expenditure_need(unit("a", 0), gel("100")) == 0

    def test_forecast_examples(self):
        assert trf.forecast_R(unit("a", 1, actuals=(90, 100, 110), current=120)) == 130
        assert trf.forecast_R(unit("a", 1, actuals=(100, 100, 100), current=100)) == 100
        assert trf.forecast_R(unit("a", 1, actuals=(30, 20, 10), current=0)) == 0

    @settings(max_examples=200)
    @given(st.lists(st.integers(0, 10**9), min_size=4, max_size=4))
    def test_forecast_matches_polyfit(self, ys):
        m = unit("a", 1, actuals=tuple(ys[:3]), current=ys[3])
        expected = max(0.0, ols_projection(ys, 1))
        assert abs(trf.forecast_R(m) - expected) <= 0.5 + 1e-6 * max(1.0, abs(expected))

    def test_missing_history(self):
        with pytest.raises(DataError):
            trf.forecast_R(unit("a", 1, actuals=(1, 2)))
        with pytest.raises(DataError):
            trf.forecast_R(trf.Municipality("a", "city", 1, (1, 2, 3), None))


class TestAllocate:
    def flat(self, uid, share, R, kind="city"):
        return unit(uid, share, kind, (R, R, R), R)

    def test_two_cities(self):
        alloc = trf.allocate([self.flat("tb", "0.6", 0), self.flat("bt", "0.4", 0)], params())
        assert alloc.G_city == gel(1_152 * M)
        assert alloc.units["tb"].E + alloc.units["bt"].E == alloc.G_city
        assert alloc.units["tb"].E == gel(691_200_000)

    def test_transfer_rule(self):
        # G = 1000.00 -> cities 720.00; shares chosen so E = 50.00
        p = trf.TransferParams(gel("25000"), gel("1000"))
        share = Fraction(50, 720)
        units = [self.flat("a", share, gel("30")), self.flat("b", share, gel("60")),
                 self.flat("c", 1 - 2 * share, 0)]
        alloc = trf.allocate(units, p)
        assert alloc.units["a"].E == gel("50")
        assert alloc.units["a"].T == gel("20")
        assert alloc.units["b"].T == 0
        assert alloc.units["c"].T == alloc.units["c"].E

    def test_share_sum_violation_names_group(self):
        with pytest.raises(ValidationError, match="municipality shares"):
            trf.allocate([self.flat("a", 1, 0), self.flat("m", "0.9", 0, "municipality")], params())

    def test_passthrough(self):
        alloc = trf.allocate([self.flat("a", 1, 0)], params(), targeted={"a": 5}, special={"a": 7})
        assert alloc.targeted_transfers == {"a": 5}
        assert alloc.total_outflow() == alloc.units["a"].T + 12
        with pytest.raises(DataError):
            trf.allocate([self.flat("a", 1, 0)], params(), targeted={"zz": 5})

    def test_units_sorted_by_id(self):
        alloc = trf.allocate([self.flat("z", "0.5", 0), self.flat("a", "0.5", 0)], params())
        assert list(alloc.units) == ["a", "z"]


@st.composite
def registries(draw):
    n_city = draw(st.integers(1, 6))
    n_muni = draw(st.integers(0, 6))
    units = []
    for kind, n in (("city", n_city), ("municipality", n_muni)):
        weights = draw(st.lists(st.integers(1, 1000), min_size=n, max_size=n))
        total = sum(weights)
        for i, w in enumerate(weights):
            ys = draw(st.lists(st.integers(0, gel(10**6)), min_size=4, max_size=4))
            units.append(trf.Municipality(f"{kind[0]}{i}", kind, Fraction(w, total), tuple(ys[:3]), ys[3]))
    return units


class TestAllocationProperties:
    @settings(max_examples=100)
    @given(registries(), st.integers(1, gel(10**7)), st.integers(0, gel(10**6)))
    def test_conservation_and_non_negativity(self, units, gdp, proposed):
        alloc = trf.allocate(units, trf.TransferParams(gdp, proposed))
        cities = [u for u in alloc.units.values() if u.kind is trf.UnitKind.CITY]
        munis = [u for u in alloc.units.values() if u.kind is trf.UnitKind.MUNICIPALITY]
        assert sum(u.E for u in cities) == alloc.G_city
        if munis:
            assert sum(u.E for u in munis) == alloc.G_m
        assert all(u.T >= 0 for u in alloc.units.values())
        assert all(u.T == max(u.E - u.R, 0) for u in alloc.units.values())

    @settings(max_examples=50)
    @given(registries(), st.integers(1, 1000))
    def test_share_rescaling(self, units, k):
        p = params()
        base = trf.allocate(units, p)
        scaled = []
        for kind in trf.UnitKind:
            group = [u for u in units if u.kind is kind]
            total = sum(u.coefficient_share * k for u in group)
            scaled += [trf.Municipality(u.id, u.kind, u.coefficient_share * k / total,
                                        u.own_revenue_actuals, u.own_revenue_forecast_current) for u in group]
        again = trf.allocate(scaled, p)
        assert {i: u.E for i, u in base.units.items()} == {i: u.E for i, u in again.units.items()}

    @given(st.integers(1, 10**12), st.integers(1, 10**12), st.integers(0, 10**12))
    def test_floor_monotone_in_gdp(self, g1, g2, proposed):
        lo, hi = sorted((g1, g2))
        assert trf.determine_G(trf.TransferParams(lo, proposed)) <= trf.determine_G(trf.TransferParams(hi, proposed))

    @settings(max_examples=50)
    @given(registries(), st.integers(0, gel(10**6)))
    def test_raising_revenue_never_raises_transfer(self, units, bump):
        p = params(gdp=gel(10**6), proposed=0)
        first = units[0]
        richer = trf.Municipality(first.id, first.kind, first.coefficient_share,
                                  tuple(a + bump for a in first.own_revenue_actuals),
                                  first.own_revenue_forecast_current + bump)
        before = trf.allocate(units, p)
        after = trf.allocate([richer] + units[1:], p)
        assert after.units[first.id].T <= before.units[first.id].T
        for uid, u in before.units.items():
            if uid != first.id:
                assert after.units[uid] == u
