"""Revenue-versus-rate sweep for a range of base elasticities.

For B(r) = B0 * (1 - r)**gamma the continuous peak is 1 / (1 + gamma);
the default gamma puts it at 0.35.
"""

import argparse

import numpy as np

from fiscal_engine import scenarios as scn


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--step", type=float, default=0.01)
    ap.add_argument("--gammas", type=float, nargs="*",
                    default=[0.5, 1.0, 1.5, scn.DEFAULT_GAMMA, 2.5, 4.0])
    ap.add_argument("--plot", help="write a PNG of the curves (needs matplotlib)")
    args = ap.parse_args()

    grid = scn.default_grid(args.step)
    print(f"{'gamma':>8} {'argmax':>7} {'peak':>7} {'unimodal':>9} {'max revenue/B0':>15}")
    curves = []
    for gamma in args.gammas:
        res = scn.laffer_sweep(scn.SweepConfig(base_B0=1.0, elasticity_gamma=gamma, rate_grid=grid))
        curves.append((gamma, res))
        print(f"{gamma:8.4f} {res.argmax_rate:7.2f} {res.analytic_peak:7.4f} "
              f"{str(scn.is_unimodal(res.revenues)):>9} {np.max(res.revenues):15.6f}")

    if args.plot:
        import matplotlib.pyplot as plt

        for gamma, res in curves:
            plt.plot(res.rates, res.revenues, label=f"gamma={gamma:.2f}")
        plt.axvspan(0.30, 0.40, alpha=0.1)
        plt.xlabel("rate")
        plt.ylabel("revenue / B0")
        plt.legend()
        plt.savefig(args.plot, dpi=120)
        print(f"wrote {args.plot}")


if __name__ == "__main__":
    main()
