"""Command-line front end.

Exit codes: 0 success, 1 usage, 2 domain error (bad config or out-of-range
state), 3 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .config import ExperimentConfig, load_config
from .cost_dist import KINDS, CostDistribution, check_regularity
from .errors import CapacityError, DomainError
from .experiments import SWEEP_COLUMNS, error_sweep, run_bench, sweep_rows
from .multi_path import MultiPathState, approx_price_online
from .single_path import build_lookup_table, quote_online, write_table_csv
from .sim import (RunConfig, monte_carlo, run_multi_path, run_single_path, write_summary_json,
                  write_trajectory_csv)

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _int_list(text: str) -> list[int]:
    """``"6..12"`` or ``"3,7,15"``."""
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(v) for v in text.split(",")]


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


def _load(args) -> ExperimentConfig:
    if not args.config:
        raise UsageError("--config PATH is required")
    return load_config(args.config)


def cmd_table(args) -> int:
    cfg = _load(args)
    if cfg.is_multi:
        raise DomainError("config field 'delays': table needs a single-path (scalar) delay")
    table = build_lookup_table(cfg.problem)
    path = _out_dir(args) / "table.csv"
    write_table_csv(table, path, cfg.problem)
    _emit({"path": str(path), "rows": len(table)})
    return EXIT_OK


def cmd_price(args) -> int:
    cfg = _load(args)
    p = cfg.problem
    aoi = args.aoi if args.aoi else list(cfg.initial_foreseen)
    if not 0 <= args.t <= p.T:
        raise DomainError(f"t must lie in 0..{p.T}, got {args.t}")
    if cfg.is_multi:
        if len(aoi) != p.n_paths:
            raise DomainError(f"--aoi needs {p.n_paths} values, got {len(aoi)}")
        if args.t >= p.last_slot:
            # no decision left: the sample could not return before the horizon
            _emit({"target": 0, "price": 0.0,
                   "predicted_cost": max(aoi) if args.t == p.last_slot else None})
            return EXIT_OK
        q = approx_price_online(p, args.t, MultiPathState(tuple(aoi), s_prev=args.s_prev))
        _emit({"target": q.target, "price": q.price, "predicted_cost": q.predicted_cost})
    else:
        if len(aoi) != 1:
            raise DomainError(f"--aoi needs one value, got {len(aoi)}")
        q = quote_online(p, args.t, aoi[0], args.s_prev, build_lookup_table(p))
        _emit({"price": q.price})
    return EXIT_OK


def cmd_sim(args) -> int:
    cfg = _load(args)
    run_cfg = RunConfig(seed=args.seed, n_runs=args.runs,
                        policy=args.policy or ("approx-multi" if cfg.is_multi else "optimal-single"))
    run = run_multi_path if cfg.is_multi else run_single_path
    a0 = cfg.initial_aoi if cfg.is_multi else cfg.initial_aoi[0]
    traj = run(cfg.problem, a0, run_cfg)
    out = _out_dir(args)
    write_trajectory_csv(traj, out / "trajectory.csv")
    if run_cfg.n_runs >= 2:
        summary = monte_carlo(cfg.problem, a0, run_cfg, compare=args.compare or ())
        report = summary.to_json()
        write_summary_json(summary, out / "summary.json")
    else:
        report = {"policy": run_cfg.policy, "mean_cost": traj.discounted_cost, "stderr": None,
                  "n_runs": 1, "seed": run_cfg.seed,
                  "mean_expected_payment_cost": traj.expected_payment_cost}
        (out / "summary.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    _emit(report)
    return EXIT_OK


def cmd_error_sweep(args) -> int:
    kw = {}
    if args.config:
        cfg = load_config(args.config)
        kw = {"rho": cfg.problem.rho, "chain": cfg.problem.chain, "dist": cfg.problem.dist}
    cells = error_sweep(args.T, args.N, g_of_n=args.g, **kw)
    path = _out_dir(args) / "error_sweep.csv"
    with path.open("w", newline="") as fh:
        fh.write("# approximation error |C_hat_0 - C*_0| at t=0, max delay 5, g(N)="
                 f"{args.g}\n")
        writer = csv.writer(fh)
        writer.writerow(SWEEP_COLUMNS)
        writer.writerows(sweep_rows(cells))
    _emit({"path": str(path), "cells": len(cells)})
    return EXIT_OK


def cmd_bench(args) -> int:
    report = run_bench().to_json()
    if args.out:
        (_out_dir(args) / "bench.json").write_text(json.dumps(report, indent=2) + "\n")
    _emit(report)
    return EXIT_OK


def cmd_check_dist(args) -> int:
    if args.config:
        dist = load_config(args.config).problem.dist
    else:
        params = json.loads(args.params) if args.params else None
        if params is None and args.kind == "truncated-normal":
            params = {"mean": 0.6, "variance": 0.7}
        dist = CostDistribution.from_config({"kind": args.kind, "params": params})
    r = check_regularity(dist, args.grid_step)
    _emit({"distribution": dist.to_config(), "is_globally_regular": r.is_globally_regular,
           "cutoff": r.cutoff, "grid_step": r.grid_step, "hazard_at_one": dist.hazard_at_one})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="aoi-pricing", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--config", metavar="PATH")
        sp.add_argument("--seed", type=_seed, default=0, metavar="U64")
        sp.add_argument("--runs", type=_positive, default=1, metavar="N")
        sp.add_argument("--out", default=".", metavar="DIR")
        sp.add_argument("--policy", metavar="NAME")
        sp.set_defaults(func=fn)
        return sp

    add("table", cmd_table, "write the look-up table C*_t(D,1) as CSV")
    sp = add("price", cmd_price, "online price at slot t")
    sp.add_argument("--t", type=int, default=0)
    sp.add_argument("--aoi", type=float, nargs="+", help="foreseen AoI per path "
                    "(default: initial_aoi + delays)")
    sp.add_argument("--s-prev", type=int, choices=(0, 1), default=0)
    sp = add("sim", cmd_sim, "simulate a policy; write trajectory CSV and summary JSON")
    sp.add_argument("--compare", nargs="*", metavar="POLICY")
    sp = add("error-sweep", cmd_error_sweep, "approximation error over (T, N)")
    sp.add_argument("--T", type=_int_list, default=list(range(6, 13)))
    sp.add_argument("--N", type=_int_list, default=[3, 7, 15])
    sp.add_argument("--g", type=int, default=1, help="cycle length g(N) in the error bound")
    add("bench", cmd_bench, "timing report with fitted growth exponents")
    sp = add("check-dist", cmd_check_dist, "hazard regularity report")
    sp.add_argument("--kind", default="truncated-normal", choices=KINDS)
    sp.add_argument("--params", help='JSON object, e.g. \'{"mean": 0.6, "variance": 0.7}\'')
    sp.add_argument("--grid-step", type=float, default=1e-4)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_usage().strip())
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (DomainError, CapacityError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
