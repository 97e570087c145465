"""Three-path replication with the clustered approximate policy."""

import argparse
import json
from pathlib import Path

from aoi_pricing.experiments import fig6_problem
from aoi_pricing.sim import RunConfig, monte_carlo, run_multi_path, write_trajectory_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/fig6")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--runs", type=int, default=200)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    p, a0 = fig6_problem()
    for name in ("approx-multi", "myopic-max-current-AoI"):
        tr = run_multi_path(p, a0, RunConfig(args.seed, policy=name))
        write_trajectory_csv(tr, out / f"trajectory_{name}.csv")

    baselines = ("myopic-max-current-AoI", "zero-price", f"fixed-price:{max(p.delays) / 2}")
    summary = monte_carlo(p, a0, RunConfig(args.seed, args.runs, "approx-multi"), compare=baselines)
    (out / "summary.json").write_text(json.dumps(summary.to_json(), indent=2) + "\n")
    print(f"{'approx-multi':24s} {summary.mean_cost:8.3f} +- {summary.stderr:.3f}")
    for name, s in summary.comparison.items():
        print(f"{name:24s} {s.mean_cost:8.3f} +- {s.stderr:.3f}")


if __name__ == "__main__":
    main()
