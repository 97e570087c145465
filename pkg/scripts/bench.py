"""Timing of online pricing with fitted log-log growth exponents."""

import argparse
import json
from pathlib import Path

from aoi_pricing.experiments import run_bench


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/bench")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    report = run_bench().to_json()
    (out / "bench.json").write_text(json.dumps(report, indent=2) + "\n")
    print(f"single-path exponent {report['single_path']['fitted_exponent']:.2f}")
    print(f"multi-path exponent  {report['multi_path']['fitted_exponent']:.2f}")
    print(f"N=3 vs N=50 relative difference {report['n_independence']['relative_difference']:.1%}")


if __name__ == "__main__":
    main()
