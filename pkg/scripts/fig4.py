"""Single-path replication: price profile, one trajectory and policy comparison."""

import argparse
import csv
import json
from pathlib import Path

from aoi_pricing.experiments import fig4_problem
from aoi_pricing.sim import RunConfig, monte_carlo, run_single_path, write_trajectory_csv
from aoi_pricing.single_path import build_lookup_table, quote_online, write_table_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/fig4")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--runs", type=int, default=200)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    p, a0 = fig4_problem()
    table = build_lookup_table(p)
    write_table_csv(table, out / "table.csv", p)

    with open(out / "price_profile.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["foreseen_aoi", "price_t0", "price_t10", "price_t20"])
        for a in range(p.D, p.D + 16):
            w.writerow([a] + [quote_online(p, t, a, 0, table).price for t in (0, 10, 20)])

    tr = run_single_path(p, a0, RunConfig(args.seed, policy="optimal-single"))
    write_trajectory_csv(tr, out / "trajectory.csv")

    summary = monte_carlo(p, a0, RunConfig(args.seed, args.runs, "optimal-single"),
                          compare=("zero-price", f"fixed-price:{p.D / 2}"))
    (out / "summary.json").write_text(json.dumps(summary.to_json(), indent=2) + "\n")
    print(f"optimal-single  {summary.mean_cost:8.3f} +- {summary.stderr:.3f}")
    for name, s in summary.comparison.items():
        print(f"{name:15s} {s.mean_cost:8.3f} +- {s.stderr:.3f}")


if __name__ == "__main__":
    main()
