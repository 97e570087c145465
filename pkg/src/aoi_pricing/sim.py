"""Forward Monte-Carlo simulation of pricing policies.

A run steps slots ``0..T``. Each slot draws two uniforms from the run's own
generator (arrival, then sensitivity), so every policy sees the same
arrivals and drivers under the same seed. Decisions stop after the last
decision slot. The realized cost mirrors the MDP objective: discounted
``max foreseen AoI + payment`` over decision slots before the last one,
plus the discounted foreseen AoI at the last decision slot.

Two AoI series are recorded. ``foreseen`` follows the decision state
exactly (reset to ``D_i`` one slot after an acceptance). ``actual`` is the
plotted AoI: it drops to ``D_i`` at slot ``acceptance + D_i``, when the
sample comes back, and otherwise grows by one per slot.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .arrival import expected_arrival, step
from .errors import DomainError
from .multi_path import (MultiPathProblem, MultiPathState, approx_price_online, driver_choice,
                         foreseen_from_actual, problem_metadata as multi_metadata)
from .single_path import (SinglePathProblem, build_lookup_table, optimal_price_online,
                          problem_metadata as single_metadata, receding_horizon_price)

SINGLE_POLICIES = ("optimal-single", "receding-horizon", "fixed-price", "zero-price")
MULTI_POLICIES = ("approx-multi", "myopic-max-current-AoI", "fixed-price", "zero-price")


def parse_policy(name: str) -> tuple[str, float | None]:
    """``"fixed-price:2.5"`` -> ``("fixed-price", 2.5)``; bare names take no parameter."""
    kind, _, arg = name.partition(":")
    if kind in ("fixed-price", "receding-horizon"):
        if not arg:
            raise DomainError(f"policy {kind} needs a parameter, e.g. {kind}:5")
        value = float(arg)
        if kind == "receding-horizon" and value != int(value):
            raise DomainError("receding-horizon window must be an integer")
        return kind, value
    if arg:
        raise DomainError(f"policy {kind} takes no parameter")
    if kind not in SINGLE_POLICIES + MULTI_POLICIES:
        raise DomainError(f"unknown policy {name!r}")
    return kind, None


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    n_runs: int = 1
    policy: str = "optimal-single"

    def __post_init__(self):
        if self.n_runs < 1:
            raise DomainError(f"n_runs must be >= 1, got {self.n_runs}")
        if not (0 <= self.seed < 2 ** 64):
            raise DomainError("seed must be an unsigned 64-bit integer")
        parse_policy(self.policy)


@dataclass
class Trajectory:
    delays: tuple[int, ...]
    policy: str
    t: np.ndarray
    arrival: np.ndarray
    target: np.ndarray            # priced path (1-based), 0 when nothing is offered
    prices: np.ndarray            # (T+1, N)
    accepted: np.ndarray
    accepted_path: np.ndarray     # 0 when no acceptance
    sensitivity: np.ndarray       # nan when no driver arrived
    payment: np.ndarray
    foreseen: np.ndarray          # (T+1, N)
    actual: np.ndarray            # (T+1, N)
    discounted_cost: float
    expected_payment_cost: float
    metadata: dict = field(default_factory=dict)

    @property
    def total_payment(self) -> float:
        return float(self.payment.sum())

    @property
    def n_samples(self) -> int:
        return int(self.accepted.sum())


# A policy maps (t, foreseen, s_prev, actual) to (priced path, price).
Policy = Callable[[int, tuple, int, tuple], tuple[int, float]]


def single_path_policy(p: SinglePathProblem, name: str) -> Policy:
    kind, arg = parse_policy(name)
    if kind not in SINGLE_POLICIES:
        raise DomainError(f"policy {name!r} does not apply to a single-path problem")
    cache: dict = {}
    if kind == "optimal-single":
        table = build_lookup_table(p)

        def price_of(t, a, s):
            return optimal_price_online(p, t, a, s, table)
    elif kind == "receding-horizon":
        window = int(arg)
        if window <= p.D:
            raise DomainError(f"receding-horizon window must exceed D={p.D}")

        def price_of(t, a, s):
            w = min(window, p.T - t)
            return receding_horizon_price(p, w, t, a, s) if w > p.D else 0.0
    elif kind == "fixed-price":
        fixed = min(max(arg, 0.0), p.D)

        def price_of(t, a, s):
            return fixed
    else:
        def price_of(t, a, s):
            return 0.0

    def policy(t, foreseen, s_prev, actual):
        a = foreseen[0]
        key = (t, a)
        if key not in cache:
            cache[key] = float(price_of(t, a, s_prev))
        price = cache[key]
        return (1 if price > 0 else 0), price

    return policy


def multi_path_policy(p: MultiPathProblem, name: str) -> Policy:
    kind, arg = parse_policy(name)
    if kind not in MULTI_POLICIES:
        raise DomainError(f"policy {name!r} does not apply to a multi-path problem")
    cache: dict = {}

    def policy(t, foreseen, s_prev, actual):
        if kind == "zero-price":
            return 0, 0.0
        target = int(np.argmax(foreseen)) + 1
        if kind == "fixed-price":
            return target, min(max(arg, 0.0), p.delays[target - 1])
        if kind == "myopic-max-current-AoI":
            target = int(np.argmax(actual)) + 1
        key = (t, foreseen, target)
        if key not in cache:
            q = approx_price_online(p, t, MultiPathState(foreseen), target=target)
            cache[key] = (q.target, q.price)
        return cache[key]

    return policy


def _simulate(delays, T, last_slot, rho, chain, dist, a0, policy: Policy, policy_name: str,
              rng: np.random.Generator, metadata: dict) -> Trajectory:
    n = len(delays)
    dl = np.asarray(delays, dtype=float)
    actual_now = np.asarray(a0, dtype=float)
    fore = np.asarray(foreseen_from_actual(a0, delays), dtype=float)

    rows = T + 1
    arrival = np.zeros(rows, dtype=int)
    target = np.zeros(rows, dtype=int)
    prices = np.zeros((rows, n))
    accepted = np.zeros(rows, dtype=int)
    accepted_path = np.zeros(rows, dtype=int)
    sensitivity = np.full(rows, np.nan)
    payment = np.zeros(rows)
    foreseen = np.zeros((rows, n))
    actual = np.zeros((rows, n))

    cost = expected_cost = 0.0
    s_prev = 0
    for t in range(rows):
        if t > 0:
            actual_now = actual_now + 1.0
            for i in range(n):
                back = t - delays[i]
                if back >= 0 and accepted_path[back] == i + 1:
                    actual_now[i] = dl[i]
        actual[t] = actual_now
        foreseen[t] = fore

        u_arrival, u_cost = rng.random(2)
        s = step(chain, s_prev, u_arrival)
        arrival[t] = s
        path, price = (0, 0.0)
        if t < last_slot:
            path, price = policy(t, tuple(fore.tolist()), s_prev, tuple(actual_now.tolist()))
        if path and price > 0:
            target[t] = path
            prices[t, path - 1] = price

        chosen = 0
        if s:
            x = float(dist.ppf(u_cost))
            sensitivity[t] = x
            if prices[t].any():
                chosen = driver_choice(prices[t], delays, x)
        if chosen:
            accepted[t] = 1
            accepted_path[t] = chosen
            payment[t] = prices[t, chosen - 1]

        top = fore.max()
        if t < last_slot:
            cost += rho ** t * (top + payment[t])
            expected_pay = 0.0
            if path and price > 0:
                e = expected_arrival(chain, s_prev)
                expected_pay = e * float(dist.cdf(price / delays[path - 1])) * price
            expected_cost += rho ** t * (top + expected_pay)
        elif t == last_slot:
            cost += rho ** t * top
            expected_cost += rho ** t * top

        fore = fore + 1.0
        if chosen:
            fore[chosen - 1] = dl[chosen - 1]
        s_prev = s

    return Trajectory(tuple(delays), policy_name, np.arange(rows), arrival, target, prices,
                      accepted, accepted_path, sensitivity, payment, foreseen, actual,
                      float(cost), float(expected_cost), metadata)


def run_single_path(p: SinglePathProblem, a0: float, cfg: RunConfig, run_index: int = 0,
                    policy: Policy | None = None) -> Trajectory:
    """One seeded run; run ``i`` of a batch uses seed ``cfg.seed + i``."""
    policy = policy or single_path_policy(p, cfg.policy)
    rng = np.random.default_rng(cfg.seed + run_index)
    meta = {"config": single_metadata(p), "initial_aoi": a0, "policy": cfg.policy,
            "seed": cfg.seed + run_index}
    return _simulate((p.D,), p.T, p.last_slot, p.rho, p.chain, p.dist, (float(a0),), policy,
                     cfg.policy, rng, meta)


def run_multi_path(p: MultiPathProblem, a0, cfg: RunConfig, run_index: int = 0,
                   policy: Policy | None = None) -> Trajectory:
    a0 = tuple(float(a) for a in np.atleast_1d(a0))
    if len(a0) != p.n_paths:
        raise DomainError(f"initial AoI has {len(a0)} entries, problem has {p.n_paths} paths")
    policy = policy or multi_path_policy(p, cfg.policy)
    rng = np.random.default_rng(cfg.seed + run_index)
    meta = {"config": multi_metadata(p), "initial_aoi": list(a0), "policy": cfg.policy,
            "seed": cfg.seed + run_index}
    return _simulate(p.delays, p.T, p.last_slot, p.rho, p.chain, p.dist, a0, policy,
                     cfg.policy, rng, meta)


@dataclass
class MonteCarloSummary:
    policy: str
    mean_cost: float
    stderr: float
    n_runs: int
    seed: int
    costs: np.ndarray
    mean_expected_cost: float
    comparison: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"policy": self.policy, "mean_cost": self.mean_cost, "stderr": self.stderr,
               "n_runs": self.n_runs, "seed": self.seed,
               "mean_expected_payment_cost": self.mean_expected_cost}
        if self.comparison:
            out["comparison"] = {k: {"mean_cost": v.mean_cost, "stderr": v.stderr}
                                 for k, v in self.comparison.items()}
        return out


def _runner(problem):
    if isinstance(problem, SinglePathProblem):
        return run_single_path, single_path_policy
    if isinstance(problem, MultiPathProblem):
        return run_multi_path, multi_path_policy
    raise TypeError(f"unsupported problem type {type(problem).__name__}")


def monte_carlo(problem, a0, cfg: RunConfig, compare=()) -> MonteCarloSummary:
    """Mean realized discounted cost over ``cfg.n_runs`` seeded runs.

    ``compare`` lists extra policy names run on the same seeds.
    """
    if cfg.n_runs < 2:
        raise DomainError("monte_carlo needs n_runs >= 2 for a standard error")
    run, make_policy = _runner(problem)
    policy = make_policy(problem, cfg.policy)
    costs = np.empty(cfg.n_runs)
    expected = np.empty(cfg.n_runs)
    for i in range(cfg.n_runs):
        traj = run(problem, a0, cfg, run_index=i, policy=policy)
        costs[i] = traj.discounted_cost
        expected[i] = traj.expected_payment_cost
    summary = MonteCarloSummary(cfg.policy, float(costs.mean()),
                                float(costs.std(ddof=1) / math.sqrt(cfg.n_runs)), cfg.n_runs,
                                cfg.seed, costs, float(expected.mean()))
    for name in compare:
        other = RunConfig(seed=cfg.seed, n_runs=cfg.n_runs, policy=name)
        summary.comparison[name] = monte_carlo(problem, a0, other)
    return summary


def trajectory_header(traj: Trajectory) -> list[str]:
    n = len(traj.delays)
    return (["t", "arrival", "target"] + [f"price_{i + 1}" for i in range(n)]
            + ["accepted", "accepted_path", "sensitivity", "payment"]
            + [f"foreseen_{i + 1}" for i in range(n)] + [f"actual_{i + 1}" for i in range(n)])


def write_trajectory_csv(traj: Trajectory, path) -> None:
    with Path(path).open("w", newline="") as fh:
        fh.write("# config: " + json.dumps(traj.metadata, sort_keys=True) + "\n")
        fh.write("# foreseen_i = A_i(t+D_i), reset to D_i one slot after acceptance; "
                 "actual_i resets to D_i at slot acceptance+D_i\n")
        fh.write(f"# discounted_cost={traj.discounted_cost!r} "
                 f"expected_payment_cost={traj.expected_payment_cost!r} "
                 f"total_payment={traj.total_payment!r} n_samples={traj.n_samples}\n")
        writer = csv.writer(fh)
        writer.writerow(trajectory_header(traj))
        for t in traj.t:
            sens = traj.sensitivity[t]
            writer.writerow(
                [int(t), int(traj.arrival[t]), int(traj.target[t])]
                + [repr(float(v)) for v in traj.prices[t]]
                + [int(traj.accepted[t]), int(traj.accepted_path[t]),
                   "" if np.isnan(sens) else repr(float(sens)), repr(float(traj.payment[t]))]
                + [repr(float(v)) for v in traj.foreseen[t]]
                + [repr(float(v)) for v in traj.actual[t]])


def read_trajectory_csv(path) -> list[dict]:
    with Path(path).open() as fh:
        lines = [line for line in fh if not line.startswith("#")]
    return list(csv.DictReader(lines))


def write_summary_json(summary: MonteCarloSummary, path) -> None:
    Path(path).write_text(json.dumps(summary.to_json(), indent=2, sort_keys=True) + "\n")
