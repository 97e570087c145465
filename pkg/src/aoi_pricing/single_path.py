"""Optimal online pricing on a single non-shortest path.

States are ``(a, s)``: the foreseen AoI ``A(t+D)`` and last slot's arrival
bit. Decisions happen at slots ``0..T-D``; at ``T-D`` the cost-to-go is the
foreseen AoI itself. The sampled continuation always lands in ``(D, 1)``,
so its costs are precomputed once (the look-up table) and online pricing
only walks the non-sampled chain ``a, a+1, ...`` back from the horizon.
"""

from __future__ import annotations

import csv
import json
import math
import re
from dataclasses import dataclass, field, replace
from functools import lru_cache
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .arrival import ArrivalChain, expected_arrival
from .cost_dist import CostDistribution, check_regularity, invert_hazard
from .errors import DomainError


@dataclass(frozen=True)
class SinglePathProblem:
    T: int
    D: int
    rho: float
    chain: ArrivalChain
    dist: CostDistribution
    eps: float | None = None
    cutoff: float = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if int(self.T) != self.T or self.T < 1:
            raise DomainError(f"T must be a positive integer, got {self.T}")
        if int(self.D) != self.D or self.D < 1:
            raise DomainError(f"D must be a positive integer, got {self.D}")
        if not self.D < self.T:
            raise DomainError(f"D must be smaller than T (D={self.D}, T={self.T})")
        if not (0.0 < self.rho < 1.0):
            raise DomainError(f"rho must lie in (0, 1), got {self.rho}")
        if self.eps is None:
            object.__setattr__(self, "eps", 1e-6 * self.D)
        if not self.eps > 0:
            raise DomainError(f"eps must be positive, got {self.eps}")
        object.__setattr__(self, "cutoff", _regularity_cutoff(self.dist))

    @property
    def last_slot(self) -> int:
        """Last decision slot, ``T - D``."""
        return self.T - self.D


@lru_cache(maxsize=64)
def _regularity_cutoff(dist: CostDistribution) -> float:
    report = check_regularity(dist)
    if report.cutoff is None:
        raise DomainError(f"hazard of {dist} is not eventually nondecreasing on [0, 1]")
    return report.cutoff


@dataclass(frozen=True)
class SinglePathState:
    a_foreseen: float
    s_prev: int = 0

    def __post_init__(self):
        if not self.a_foreseen >= 1:
            raise DomainError(f"a_foreseen must be >= 1, got {self.a_foreseen}")
        if self.s_prev not in (0, 1):
            raise DomainError(f"s_prev must be 0 or 1, got {self.s_prev}")


class TransitionTriple(NamedTuple):
    q_sample: float
    q_noarrival: float
    q_reject: float


@dataclass(frozen=True)
class LookupTable:
    """``c_bar[t] = C*_t(D, 1)`` for ``t = 0..T-D``."""

    T: int
    D: int
    c_bar: tuple[float, ...]

    def __len__(self):
        return len(self.c_bar)

    def __getitem__(self, t):
        return self.c_bar[t]

    def matches(self, p: SinglePathProblem) -> bool:
        return self.T == p.T and self.D == p.D


class OnlineQuote(NamedTuple):
    price: float
    cost: float | None
    active: bool


def _check_price(price, upper):
    if np.any(np.asarray(price) < 0.0) or np.any(np.asarray(price) > upper):
        raise DomainError(f"price must lie in [0, {upper}]")


def transition_probs(p: SinglePathProblem, st: SinglePathState, price: float) -> TransitionTriple:
    _check_price(price, p.D)
    e = expected_arrival(p.chain, st.s_prev)
    accept = float(p.dist.cdf(price / p.D))
    return TransitionTriple(e * accept, 1.0 - e, e * (1.0 - accept))


def immediate_cost(p: SinglePathProblem, st: SinglePathState, price: float) -> float:
    q = transition_probs(p, st, price)
    return st.a_foreseen + q.q_sample * price


def terminal_cost(st: SinglePathState) -> float:
    return st.a_foreseen


def solve_price(p: SinglePathProblem, delta_c):
    """Price solving the first-order condition ``H(p/D) = rho * delta_c / D``.

    Negative ``delta_c`` (rounding noise) is clamped to zero.
    """
    target = p.rho * np.maximum(delta_c, 0.0) / p.D
    return p.D * invert_hazard(p.dist, target, p.cutoff, p.eps / p.D)


def backup(p: SinglePathProblem, a, next0, next1, next_sampled):
    """One Bellman step at foreseen AoI ``a``.

    ``next0``/``next1`` are ``C_{t+1}(a+1, 0/1)`` and ``next_sampled`` is
    ``C_{t+1}(D, 1)``. Returns ``(price, C_t(a, 0), C_t(a, 1))``; the price is
    the same for both arrival bits because the arrival probability cancels
    out of the first-order condition. Broadcasts over arrays.
    """
    price = solve_price(p, next1 - next_sampled)
    accept = p.dist.cdf(price / p.D)
    out = []
    for s in (0, 1):
        e = expected_arrival(p.chain, s)
        q_sample = e * accept
        cont = (1.0 - e) * next0 + e * (1.0 - accept) * next1 + q_sample * next_sampled
        out.append(a + q_sample * price + p.rho * cont)
    return price, out[0], out[1]


def build_lookup_table(p: SinglePathProblem, method: str = "layered") -> LookupTable:
    """Precompute ``C*_t(D, 1)`` for every decision slot by backward induction.

    ``method="literal"`` runs the nested ``i``/``j`` loops state by state;
    ``"layered"`` sweeps one decision slot at a time and solves all foreseen
    AoI values of that slot in one vectorised bisection. Both evaluate the
    same recursion over the same ``(t, a)`` states.
    """
    m = p.last_slot
    c_bar = [math.nan] * (m + 1)
    c_bar[m] = float(p.D)
    if method == "literal":
        for i in range(1, m + 1):
            c0 = c1 = float(p.D + i)
            for j in range(1, i + 1):
                tau = m - j
                _, c0, c1 = backup(p, p.D + i - j, c0, c1, c_bar[tau + 1])
            c_bar[m - i] = float(c1)
    elif method == "layered":
        # slot tau holds foreseen AoI D..D+tau
        costs0 = costs1 = p.D + np.arange(m + 1, dtype=float)
        for tau in range(m - 1, -1, -1):
            a = p.D + np.arange(tau + 1, dtype=float)
            _, costs0, costs1 = backup(p, a, costs0[1:tau + 2], costs1[1:tau + 2], c_bar[tau + 1])
            c_bar[tau] = float(costs1[0])
    else:
        raise ValueError(f"unknown method {method!r}")
    return LookupTable(p.T, p.D, tuple(c_bar))


def quote_online(p: SinglePathProblem, t: int, a_foreseen: float, s_prev: int,
                 table: LookupTable) -> OnlineQuote:
    """Price and cost-to-go at slot ``t`` in linear time from the look-up table.

    Only the non-sampled chain ``(a + k, s)`` for ``k = 0..T-D-t`` is
    expanded; each slot needs one bisection. After ``T - D`` the quote is
    zero with ``active=False``.
    """
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    if s_prev not in (0, 1):
        raise DomainError(f"s_prev must be 0 or 1, got {s_prev}")
    if not a_foreseen >= 1:
        raise DomainError(f"a_foreseen must be >= 1, got {a_foreseen}")
    if not table.matches(p):
        raise DomainError("look-up table was built for a different problem")
    m = p.last_slot
    if t > m:
        return OnlineQuote(0.0, None, False)
    if t == m:
        return OnlineQuote(0.0, float(a_foreseen), True)
    c0 = c1 = float(a_foreseen + m - t)
    price = 0.0
    for tau in range(m - 1, t - 1, -1):
        price, c0, c1 = backup(p, a_foreseen + tau - t, c0, c1, table[tau + 1])
    return OnlineQuote(float(price), float(c1 if s_prev else c0), True)


def optimal_price_online(p: SinglePathProblem, t: int, a_foreseen: float, s_prev: int,
                         table: LookupTable) -> float:
    return quote_online(p, t, a_foreseen, s_prev, table).price


@lru_cache(maxsize=256)
def _cached_table(p: SinglePathProblem) -> LookupTable:
    return build_lookup_table(p)


def receding_horizon_price(p: SinglePathProblem, window: int, t: int, a_foreseen: float,
                           s_prev: int) -> float:
    """Price from a problem truncated to ``window`` slots ahead of ``t``.

    The dynamics are time-homogeneous, so the truncated problem is solved
    at its own slot 0; its table is cached per window.
    """
    if int(window) != window or window <= p.D:
        raise DomainError(f"window must be an integer > D={p.D}, got {window}")
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    sub = replace(p, T=int(window))
    return optimal_price_online(sub, 0, a_foreseen, s_prev, _cached_table(sub))


def problem_metadata(p: SinglePathProblem) -> dict:
    return {"horizon": p.T, "delays": p.D, "rho": p.rho, "alpha": p.chain.alpha,
            "beta": p.chain.beta, "distribution": p.dist.to_config(), "eps": p.eps}


def write_table_csv(table: LookupTable, path, problem: SinglePathProblem | None = None) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        fh.write(f"# lookup table C*_t(D,1), T={table.T}, D={table.D}\n")
        if problem is not None:
            fh.write("# config: " + json.dumps(problem_metadata(problem), sort_keys=True) + "\n")
        writer = csv.writer(fh)
        writer.writerow(["t", "c_bar"])
        for t, v in enumerate(table.c_bar):
            writer.writerow([t, repr(float(v))])


def read_table_csv(path) -> LookupTable:
    T = D = None
    values = []
    with Path(path).open() as fh:
        rows = []
        for line in fh:
            if line.startswith("#"):
                m = re.search(r"\bT=(\d+), D=(\d+)", line)
                if m:
                    T, D = int(m.group(1)), int(m.group(2))
                continue
            rows.append(line)
    reader = csv.DictReader(rows)
    for expect_t, row in enumerate(reader):
        if int(row["t"]) != expect_t:
            raise ValueError(f"table rows out of order at t={row['t']}")
        values.append(float(row["c_bar"]))
    if T is None:
        D = int(round(values[-1]))
        T = D + len(values) - 1
    return LookupTable(T, D, tuple(values))
