"""Write a seeded synthetic dataset and time a compute run over it."""

import argparse
import time
from pathlib import Path

from fiscal_engine import cli
from fiscal_engine.synthetic import make_dataset


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("outdir", type=Path)
    ap.add_argument("-n", "--records", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--compute", action="store_true", help="also run compute and report the runtime")
    args = ap.parse_args()

    inputs = make_dataset(args.outdir, args.records, args.seed)
    for kind, path in inputs:
        print(f"{kind:12s} {path}")
    if args.compute:
        argv = ["compute", "--format", "json", "--out", str(args.outdir / "compute.json")]
        for kind, path in inputs:
            argv += ["--input", f"{kind}={path}"]
        start = time.perf_counter()
        code = cli.main(argv)
        print(f"compute exit {code} in {time.perf_counter() - start:.2f} s -> {args.outdir / 'compute.json'}")


if __name__ == "__main__":
    main()
