"""Reference instances, the approximation-error sweep and timing benchmarks."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .arrival import ArrivalChain
from .cost_dist import CostDistribution
from .multi_path import (MultiPathProblem, MultiPathState, approx_price_online, error_bound,
                         foreseen_from_actual)
from .oracle import MULTI_MAX_HORIZON, MULTI_MAX_PATHS, approx_policy_cost, exact_multi_path_dp
from .single_path import SinglePathProblem, build_lookup_table, optimal_price_online

FIG_CHAIN = ArrivalChain(0.8, 0.6)
FIG_DIST = CostDistribution.truncated_normal(0.6, 0.7)
FIG_RHO = 0.85


def fig4_problem() -> tuple[SinglePathProblem, float]:
    """Single path, T=30, D=5, A(0)=4."""
    return SinglePathProblem(30, 5, FIG_RHO, FIG_CHAIN, FIG_DIST), 4.0


def fig6_problem() -> tuple[MultiPathProblem, tuple[float, ...]]:
    """Three paths, D=(2,3,5), A(0)=(2,4,3), T=30."""
    return MultiPathProblem((2, 3, 5), 30, FIG_RHO, FIG_CHAIN, FIG_DIST), (2.0, 4.0, 3.0)


def fig_config(multi: bool) -> dict:
    """JSON config for the captioned instances."""
    base = {"horizon": 30, "rho": FIG_RHO, "alpha": 0.8, "beta": 0.6,
            "distribution": FIG_DIST.to_config()}
    if multi:
        return {**base, "delays": [2, 3, 5], "initial_aoi": [2, 4, 3]}
    return {**base, "delays": 5, "initial_aoi": 4}


# Sweep family: delays cycle so that max D = 5 for every N >= 3.
SWEEP_DELAYS = (2, 3, 5, 4)
SWEEP_AOI = (2, 4, 3, 1)


def sweep_instance(N: int, T: int, rho=FIG_RHO, chain=FIG_CHAIN, dist=FIG_DIST):
    delays = tuple(SWEEP_DELAYS[i % 4] for i in range(N))
    a0 = tuple(float(SWEEP_AOI[i % 4]) for i in range(N))
    p = MultiPathProblem(delays, T, rho, chain, dist)
    return p, MultiPathState(foreseen_from_actual(a0, delays))


@dataclass
class SweepCell:
    T: int
    N: int
    approx_cost: float
    predicted_cost: float
    exact_cost: float | None
    bound_with_g: float
    flag: str = ""

    @property
    def abs_error(self) -> float | None:
        if self.exact_cost is None:
            return None
        return abs(self.approx_cost - self.exact_cost)


SWEEP_COLUMNS = ("T", "N", "approx_cost", "exact_cost", "abs_error", "bound_with_g",
                 "predicted_cost", "flag")


def error_sweep(T_values=range(6, 13), N_values=(3, 7, 15), g_of_n=1, **instance_kw):
    """``approx_cost`` is the true expected cost of following the clustered
    policy from t=0; ``predicted_cost`` is the clustered estimate itself."""
    cells = []
    for N in N_values:
        for T in T_values:
            p, st = sweep_instance(N, T, **instance_kw)
            approx = approx_policy_cost(p, 0, st)
            predicted = approx_price_online(p, 0, st).predicted_cost
            exact, flag = None, ""
            if p.n_paths <= MULTI_MAX_PATHS and p.last_slot <= MULTI_MAX_HORIZON:
                exact = exact_multi_path_dp(p, 0, st)[2]
            else:
                flag = "exact_skipped_capacity"
            cells.append(SweepCell(T, N, approx, predicted, exact, error_bound(p, 0, g_of_n), flag))
    return cells


def sweep_rows(cells):
    def fmt(v):
        return "" if v is None else repr(float(v))
    for c in cells:
        yield [c.T, c.N, fmt(c.approx_cost), fmt(c.exact_cost), fmt(c.abs_error),
               fmt(c.bound_with_g), fmt(c.predicted_cost), c.flag]


def _best_time(fn, repeats: int) -> float:
    best = math.inf
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def fitted_exponent(sizes, seconds) -> float:
    """Slope of the log-log least-squares line."""
    return float(np.polyfit(np.log(sizes), np.log(seconds), 1)[0])


@dataclass
class BenchReport:
    single_T: list[int]
    single_seconds: list[float]
    single_exponent: float
    multi_K: list[int]
    multi_seconds: list[float]
    multi_exponent: float
    n_compare: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "single_path": {"T": self.single_T, "K": [T - 5 for T in self.single_T],
                            "seconds": self.single_seconds, "fitted_exponent": self.single_exponent},
            "multi_path": {"K": self.multi_K, "seconds": self.multi_seconds,
                           "fitted_exponent": self.multi_exponent},
            "n_independence": self.n_compare,
        }


def bench_single(T_values=(50, 100, 200, 400, 800), D=5, repeats=5):
    """Online pricing at t=0; the table is built once outside the timer."""
    out = []
    for T in T_values:
        p = SinglePathProblem(T, D, FIG_RHO, FIG_CHAIN, FIG_DIST)
        table = build_lookup_table(p)
        out.append(_best_time(lambda: optimal_price_online(p, 0, D + 4.0, 0, table), repeats))
    return out


def _multi_instance(N: int, K: int):
    delays = tuple(SWEEP_DELAYS[i % 4] for i in range(N))
    p = MultiPathProblem(delays, 5 + K, FIG_RHO, FIG_CHAIN, FIG_DIST)
    a0 = tuple(float(SWEEP_AOI[i % 4]) for i in range(N))
    return p, MultiPathState(foreseen_from_actual(a0, delays))


def bench_multi(K_values=(20, 40, 80, 160), N=3, repeats=3):
    out = []
    for K in K_values:
        p, st = _multi_instance(N, K)
        out.append(_best_time(lambda: approx_price_online(p, 0, st), repeats))
    return out


def bench_n_independence(K=80, N_pair=(3, 50), repeats=5) -> dict:
    times = {}
    for N in N_pair:
        p, st = _multi_instance(N, K)
        times[N] = _best_time(lambda: approx_price_online(p, 0, st), repeats)
    a, b = (times[n] for n in N_pair)
    return {"K": K, f"N{N_pair[0]}_seconds": a, f"N{N_pair[1]}_seconds": b,
            "relative_difference": abs(b - a) / min(a, b)}


def run_bench(T_values=(50, 100, 200, 400, 800), K_values=(20, 40, 80, 160)) -> BenchReport:
    single = bench_single(T_values)
    multi = bench_multi(K_values)
    return BenchReport(list(T_values), single, fitted_exponent([T - 5 for T in T_values], single),
                       list(K_values), multi, fitted_exponent(K_values, multi),
                       bench_n_independence())

