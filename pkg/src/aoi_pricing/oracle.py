"""Brute-force exact dynamic programs used as ground truth.

Each solver memoises on ``(t, foreseen AoI)``: the arrival bit only enters
through the arrival probability, which cancels out of the pricing
decision, so one memo entry stores the costs for both bits.
"""

from __future__ import annotations

import csv
import itertools
from pathlib import Path
from typing import Callable

import numpy as np

from .arrival import expected_arrival
from .errors import CapacityError, DomainError
from .multi_path import (MultiPathProblem, MultiPathState, approx_price_online,
                         choice_probabilities, target_backup)
from .single_path import SinglePathProblem, SinglePathState, backup

SINGLE_MAX_HORIZON = 12
MULTI_MAX_HORIZON = 12
MULTI_MAX_PATHS = 8
EXHAUSTIVE_MAX_HORIZON = 5
EXHAUSTIVE_MIN_GRID = 0.25


class ExactSinglePathDP:
    """Memoised backward induction over every reachable ``(t, a)``."""

    def __init__(self, p: SinglePathProblem):
        if p.last_slot > SINGLE_MAX_HORIZON:
            raise CapacityError(f"T - D = {p.last_slot} exceeds the oracle guard {SINGLE_MAX_HORIZON}")
        self.p = p
        self.memo: dict[tuple[int, float], tuple[float, float, float]] = {}

    def value(self, t: int, a: float) -> tuple[float, float, float]:
        """``(price, C_t(a, 0), C_t(a, 1))``."""
        key = (t, a)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        p = self.p
        if t == p.last_slot:
            out = (0.0, float(a), float(a))
        else:
            _, n0, n1 = self.value(t + 1, a + 1)
            ns = self.value(t + 1, p.D)[2]
            price, c0, c1 = backup(p, a, n0, n1, ns)
            out = (float(price), float(c0), float(c1))
        self.memo[key] = out
        return out

    def cost(self, t: int, a: float, s: int) -> float:
        return self.value(t, a)[1 + s]


def exact_single_path_dp(p: SinglePathProblem, t: int, state: SinglePathState,
                         solver: ExactSinglePathDP | None = None) -> tuple[float, float]:
    if not (0 <= t <= p.last_slot):
        raise DomainError(f"t must lie in 0..{p.last_slot}, got {t}")
    solver = solver or ExactSinglePathDP(p)
    price, c0, c1 = solver.value(t, state.a_foreseen)
    return price, (c1 if state.s_prev else c0)


PricingRule = Callable[[int, tuple], tuple]


class ExactMultiPathDP:
    """Exact recursion over the full branching tree with single-target pricing.

    Without ``rule`` every node prices its max-foreseen-AoI path optimally.
    With ``rule(t, aoi) -> (target, price)`` the tree evaluates that fixed
    policy instead, giving its true expected cost.
    """

    def __init__(self, p: MultiPathProblem, rule: PricingRule | None = None):
        # evaluating a fixed rule never searches over paths, so only the
        # optimising solve is capped in N
        too_wide = rule is None and p.n_paths > MULTI_MAX_PATHS
        if p.last_slot > MULTI_MAX_HORIZON or too_wide:
            raise CapacityError(
                f"instance (K={p.last_slot}, N={p.n_paths}) exceeds the oracle guards "
                f"(K<={MULTI_MAX_HORIZON}, N<={MULTI_MAX_PATHS})")
        self.p = p
        self.rule = rule
        self.delays = np.asarray(p.delays, dtype=float)
        self.memo: dict[tuple[int, tuple], tuple[int, float, float, float]] = {}

    def value(self, t: int, aoi: tuple) -> tuple[int, float, float, float]:
        """``(target, price, C_t(aoi, 0), C_t(aoi, 1))``; target is 1-based."""
        key = (t, aoi)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        p = self.p
        top = max(aoi)
        if t == p.last_slot:
            out = (aoi.index(top) + 1, 0.0, float(top), float(top))
            self.memo[key] = out
            return out
        if self.rule is None:
            target = aoi.index(top) + 1
        else:
            target, fixed_price = self.rule(t, aoi)
        aged = tuple(a + 1 for a in aoi)
        reset = list(aged)
        reset[target - 1] = float(p.delays[target - 1])
        _, _, n0, n1 = self.value(t + 1, aged)
        ns = self.value(t + 1, tuple(reset))[3]
        d_target = p.delays[target - 1]
        if self.rule is None:
            price, c0, c1 = target_backup(p, top, d_target, n0, n1, ns)
        else:
            price = fixed_price
            accept = float(p.dist.cdf(price / d_target))
            c0, c1 = (
                top + e * accept * price
                + p.rho * ((1 - e) * n0 + e * (1 - accept) * n1 + e * accept * ns)
                for e in (expected_arrival(p.chain, 0), expected_arrival(p.chain, 1)))
        out = (target, float(price), float(c0), float(c1))
        self.memo[key] = out
        return out


def _root(p: MultiPathProblem, t: int, state: MultiPathState) -> tuple:
    if not (0 <= t <= p.last_slot):
        raise DomainError(f"t must lie in 0..{p.last_slot}, got {t}")
    if len(state.aoi) != p.n_paths:
        raise DomainError(f"state has {len(state.aoi)} paths, problem has {p.n_paths}")
    return tuple(float(a) for a in state.aoi)


def exact_multi_path_dp(p: MultiPathProblem, t: int, state: MultiPathState,
                        solver: ExactMultiPathDP | None = None) -> tuple[int, float, float]:
    solver = solver or ExactMultiPathDP(p)
    target, price, c0, c1 = solver.value(t, _root(p, t, state))
    return target, price, (c1 if state.s_prev else c0)


def approx_policy_rule(p: MultiPathProblem) -> PricingRule:
    cache: dict = {}

    def rule(t, aoi):
        hit = cache.get((t, aoi))
        if hit is None:
            q = approx_price_online(p, t, MultiPathState(aoi))
            hit = cache[(t, aoi)] = (q.target, q.price)
        return hit

    return rule


def approx_policy_cost(p: MultiPathProblem, t: int, state: MultiPathState) -> float:
    """True expected cost of following the clustered approximation at every node."""
    solver = ExactMultiPathDP(p, rule=approx_policy_rule(p))
    c = solver.value(t, _root(p, t, state))
    return c[3] if state.s_prev else c[2]


class ExhaustivePolicyDP:
    """Exact DP whose action is any price vector on a grid over the full cube.

    The driver's path choice is integrated exactly over the sensitivity law.
    ``nodes`` records, for every non-terminal node, the minimising vector
    (ties go to the vector with the fewest positive prices).
    """

    def __init__(self, p: MultiPathProblem, grid_step: float = 0.25):
        if p.n_paths != 2:
            raise CapacityError(f"exhaustive search is limited to N=2, got N={p.n_paths}")
        if p.last_slot > EXHAUSTIVE_MAX_HORIZON:
            raise CapacityError(f"T - max D = {p.last_slot} exceeds the guard {EXHAUSTIVE_MAX_HORIZON}")
        if grid_step < EXHAUSTIVE_MIN_GRID:
            raise CapacityError(f"grid_step must be >= {EXHAUSTIVE_MIN_GRID}")
        self.p = p
        axes = [np.unique(np.append(np.arange(0.0, d + 1e-12, grid_step), float(d)))
                for d in p.delays]
        self.grid = np.array(list(itertools.product(*axes)))
        self.q = np.array([choice_probabilities(row, p.delays, p.dist) for row in self.grid])
        self.n_positive = (self.grid > 0).sum(axis=1)
        self.memo: dict = {}
        self.nodes: dict[tuple[int, tuple], np.ndarray] = {}

    def node_gains(self, t: int, aoi: tuple) -> np.ndarray:
        """Price-dependent part of the expected cost, per grid vector, scaled
        by the arrival probability: ``sum_i q_i (p_i + rho (C_sampled_i - C_reject))``."""
        p = self.p
        aged = tuple(a + 1 for a in aoi)
        n1 = self.value(t + 1, aged)[1]
        sampled = []
        for i, d in enumerate(p.delays):
            reset = list(aged)
            reset[i] = float(d)
            sampled.append(self.value(t + 1, tuple(reset))[1])
        return (self.q * (self.grid + p.rho * (np.asarray(sampled) - n1))).sum(axis=1)

    def value(self, t: int, aoi: tuple) -> tuple[float, float]:
        key = (t, aoi)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        p = self.p
        top = max(aoi)
        if t == p.last_slot:
            out = (float(top), float(top))
            self.memo[key] = out
            return out
        n0, n1 = self.value(t + 1, tuple(a + 1 for a in aoi))
        gain = self.node_gains(t, aoi)
        best = gain.min()
        tol = 1e-12 * max(1.0, abs(best))
        ties = np.flatnonzero(gain <= best + tol)
        choice = ties[np.argmin(self.n_positive[ties])]
        self.nodes[key] = self.grid[choice]
        costs = []
        for s in (0, 1):
            e = expected_arrival(p.chain, s)
            costs.append(float(top + p.rho * ((1 - e) * n0 + e * n1) + e * gain[choice]))
        out = (costs[0], costs[1])
        self.memo[key] = out
        return out


def exhaustive_policy_dp(p: MultiPathProblem, t: int, state: MultiPathState,
                         grid_step: float = 0.25,
                         solver: ExhaustivePolicyDP | None = None) -> tuple[np.ndarray, float]:
    solver = solver or ExhaustivePolicyDP(p, grid_step)
    root = _root(p, t, state)
    c0, c1 = solver.value(t, root)
    prices = solver.nodes.get((t, root), np.zeros(p.n_paths))
    return prices, (c1 if state.s_prev else c0)


def write_memo_csv(memo: dict, path) -> None:
    """Dump a solver memo table: one row per ``(t, aoi)`` key."""
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "aoi", "values"])
        for (t, aoi), vals in sorted(memo.items(), key=lambda kv: (kv[0][0], str(kv[0][1]))):
            aoi_s = ";".join(repr(float(a)) for a in np.atleast_1d(aoi))
            writer.writerow([t, aoi_s, ";".join(repr(float(v)) for v in np.atleast_1d(vals))])


NODE_CLASSES = ("single_on_max", "zero_within_grid", "zero", "several_positive", "single_off_max")


def classify_exhaustive_nodes(solver: ExhaustivePolicyDP) -> dict[str, int]:
    """Count solved nodes by the shape of their minimising price vector.

    A zero minimiser is ``zero_within_grid`` when the continuous optimal
    price for the max-AoI path at that node is below one grid step, i.e. the
    coarse grid simply has no point small enough to beat zero.
    """
    p = solver.p
    counts = dict.fromkeys(NODE_CLASSES, 0)
    step = float(np.min(np.diff(np.unique(solver.grid[:, 0]))))
    for (t, aoi), vec in solver.nodes.items():
        positive = np.flatnonzero(vec > 0)
        top = max(aoi)
        if len(positive) > 1:
            counts["several_positive"] += 1
        elif len(positive) == 1:
            counts["single_on_max" if aoi[positive[0]] == top else "single_off_max"] += 1
        else:
            i = aoi.index(top)
            aged = tuple(a + 1 for a in aoi)
            reset = list(aged)
            reset[i] = float(p.delays[i])
            n1 = solver.value(t + 1, aged)[1]
            ns = solver.value(t + 1, tuple(reset))[1]
            price = target_backup(p, top, p.delays[i], 0.0, n1, ns)[0]
            counts["zero_within_grid" if price < step else "zero"] += 1
    return counts
