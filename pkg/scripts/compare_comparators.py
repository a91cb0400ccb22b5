"""Revenue of the Georgian schedules and the foreign comparators on a lognormal population.

Each comparator is a two-bracket approximation between its lowest and top
rate, evaluated on incomes expressed in its own currency. Pivot points are
placeholders (see the README), so cross-country levels are illustrative.
"""

import argparse

import numpy as np

from fiscal_engine import scenarios as scn
from fiscal_engine import schedules as sch
from fiscal_engine.money import format_money


def population(rng, n, median, sigma=0.8):
    # minor units
    return [int(x) for x in np.round(rng.lognormal(np.log(median * 100), sigma, n))]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-n", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)

    # rough median annual incomes per currency; only the shape matters here
    medians = {"GEL": 12_000, "AZN": 8_000, "EUR": 30_000, "GBP": 28_000}
    pops = {cur: population(rng, args.n, m) for cur, m in medians.items()}

    rows = []
    for s in (sch.GEORGIA_FLAT_INCOME, sch.GEORGIA_INCOME_2004):
        (total,) = scn.compare_schedules(pops["GEL"], [s])
        rows.append((s.name, "GEL", total, sum(pops["GEL"])))
    for tag, comp in scn.COMPARATORS.items():
        pop = pops[comp.currency]
        (total,) = scn.compare_schedules(pop, [comp.schedule])
        rows.append((comp.schedule.name, comp.currency, total, sum(pop)))

    print(f"{'schedule':55s} {'cur':4s} {'revenue':>18s} {'avg rate':>9s}")
    for name, cur, total, base in rows:
        print(f"{name:55s} {cur:4s} {format_money(total):>18s} {total / base:9.2%}")


if __name__ == "__main__":
    main()
