"""Approximation error of the clustered policy against the exact DP over (T, N)."""

import argparse
import csv
from pathlib import Path

from aoi_pricing.experiments import SWEEP_COLUMNS, error_sweep, sweep_rows


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/fig7")
    ap.add_argument("--N", type=int, nargs="+", default=[3, 7, 15])
    ap.add_argument("--g", type=int, default=1)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    cells = error_sweep(range(6, 13), tuple(args.N), g_of_n=args.g)
    with open(out / "error_sweep.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SWEEP_COLUMNS)
        w.writerows(sweep_rows(cells))
    for c in cells:
        err = "skipped" if c.exact_cost is None else f"{c.abs_error:.3e}"
        print(f"T={c.T:2d} N={c.N:2d} error={err:>10s} bound={c.bound_with_g:.3e}")


if __name__ == "__main__":
    main()
