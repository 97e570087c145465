"""Pricing over N non-shortest paths with a min-max foreseen AoI objective.

Paths are numbered ``1..N`` in every public interface; ``0`` means "no path"
(no driver, or the driver kept to the shortest path). Only the path with
the largest foreseen AoI is priced at each slot, so every Bellman step has
the three single-path outcomes: no arrival, arrival that rejects, arrival
that samples the target.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .arrival import ArrivalChain, expected_arrival
from .cost_dist import CostDistribution, invert_hazard
from .errors import DomainError
from .single_path import _regularity_cutoff


@dataclass(frozen=True)
class MultiPathProblem:
    delays: tuple[int, ...]
    T: int
    rho: float
    chain: ArrivalChain
    dist: CostDistribution
    eps: float | None = None
    cutoff: float = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        delays = tuple(int(d) for d in np.atleast_1d(self.delays))
        if not delays:
            raise DomainError("delays must name at least one path")
        if any(d < 1 or d != dd for d, dd in zip(delays, np.atleast_1d(self.delays))):
            raise DomainError(f"delays must be positive integers, got {self.delays}")
        object.__setattr__(self, "delays", delays)
        if int(self.T) != self.T or not max(delays) < self.T:
            raise DomainError(f"max delay must be smaller than T (delays={delays}, T={self.T})")
        if not (0.0 < self.rho < 1.0):
            raise DomainError(f"rho must lie in (0, 1), got {self.rho}")
        if self.eps is None:
            object.__setattr__(self, "eps", 1e-6 * max(delays))
        if not self.eps > 0:
            raise DomainError(f"eps must be positive, got {self.eps}")
        object.__setattr__(self, "cutoff", _regularity_cutoff(self.dist))

    @property
    def n_paths(self) -> int:
        return len(self.delays)

    @property
    def max_delay(self) -> int:
        return max(self.delays)

    @property
    def last_slot(self) -> int:
        """Last decision slot, ``T - max_i D_i``."""
        return self.T - self.max_delay


@dataclass(frozen=True)
class MultiPathState:
    aoi: tuple[float, ...]
    last_sampled: int = 0
    s_prev: int = 0

    def __post_init__(self):
        aoi = tuple(float(a) for a in self.aoi)
        if not aoi:
            raise DomainError("aoi must be nonempty")
        if min(aoi) < 1:
            raise DomainError(f"aoi entries must be >= 1, got {aoi}")
        if not (0 <= self.last_sampled <= len(aoi)):
            raise DomainError(f"last_sampled must lie in 0..{len(aoi)}")
        if self.s_prev not in (0, 1):
            raise DomainError(f"s_prev must be 0 or 1, got {self.s_prev}")
        object.__setattr__(self, "aoi", aoi)


class ApproxQuote(NamedTuple):
    target: int
    price: float
    predicted_cost: float


def foreseen_from_actual(actual: Sequence[float], delays: Sequence[int]) -> tuple[float, ...]:
    """Foreseen AoI ``A_i(t + D_i)`` when nothing is in flight: ``A_i(t) + D_i``."""
    return tuple(float(a) + d for a, d in zip(actual, delays))


def select_target_path(state) -> int:
    aoi = state.aoi if isinstance(state, MultiPathState) else state
    if len(aoi) == 0:
        raise DomainError("aoi must be nonempty")
    return int(np.argmax(np.asarray(aoi, dtype=float))) + 1


def driver_choice(prices: Sequence[float], delays: Sequence[int], x: float) -> int:
    utility = np.asarray(prices, dtype=float) - x * np.asarray(delays, dtype=float)
    best = int(np.argmax(utility))
    return best + 1 if utility[best] >= 0.0 else 0


def choice_probabilities(prices: Sequence[float], delays: Sequence[int],
                         dist: CostDistribution) -> np.ndarray:
    """P(a driver picks path i) for every path, integrated exactly over ``x``.

    The winning path is constant between the points where a utility crosses
    zero or two utilities cross, so the probability is a sum of CDF
    increments over those intervals.
    """
    p = np.asarray(prices, dtype=float)
    dl = np.asarray(delays, dtype=float)
    points = {0.0, 1.0}
    points.update((p / dl).tolist())
    n = p.size
    for i in range(n):
        for j in range(i + 1, n):
            if dl[i] != dl[j]:
                points.add((p[i] - p[j]) / (dl[i] - dl[j]))
    xs = sorted(x for x in points if 0.0 <= x <= 1.0)
    probs = np.zeros(n)
    for lo, hi in zip(xs[:-1], xs[1:]):
        if hi <= lo:
            continue
        winner = driver_choice(p, dl, 0.5 * (lo + hi))
        if winner:
            probs[winner - 1] += float(dist.cdf(hi)) - float(dist.cdf(lo))
    return probs


def immediate_cost_multi(p: MultiPathProblem, state: MultiPathState, target: int,
                         price: float) -> float:
    d_target = p.delays[target - 1]
    if not (0.0 <= price <= d_target):
        raise DomainError(f"price must lie in [0, {d_target}]")
    e = expected_arrival(p.chain, state.s_prev)
    return max(state.aoi) + e * float(p.dist.cdf(price / d_target)) * price


def clustered_aoi_update(aoi, target: int, k: int, j: int, delays: Sequence[int]) -> np.ndarray:
    """Reset the target's entry to ``D_target + (k - j) / 2``, the mean AoI over
    the slots ``j..k`` at which it could have been sampled."""
    if not (0 <= j <= k):
        raise DomainError(f"need 0 <= j <= k, got j={j}, k={k}")
    out = np.array(aoi, dtype=float)
    out[target - 1] = delays[target - 1] + (k - j) / 2.0
    return out


def target_backup(p: MultiPathProblem, max_aoi, d_target, next0, next1, next_sampled):
    """Bellman step pricing one target path with delay ``d_target``.

    ``next_sampled`` is the arrival-state continuation after the target was
    sampled. Returns ``(price, C(., 0), C(., 1))``; broadcasts over arrays.
    """
    delta = np.maximum(next1 - next_sampled, 0.0)
    y = invert_hazard(p.dist, p.rho * delta / d_target, p.cutoff, p.eps / p.max_delay)
    price = d_target * y
    accept = p.dist.cdf(y)
    out = []
    for s in (0, 1):
        e = expected_arrival(p.chain, s)
        q = e * accept
        cont = (1.0 - e) * next0 + e * (1.0 - accept) * next1 + q * next_sampled
        out.append(max_aoi + q * price + p.rho * cont)
    return price, out[0], out[1]


@dataclass
class ClusteredLayer:
    """Offset ``k`` from the current slot; entry ``j`` clusters every future in
    which ``j`` samples were taken since the current slot."""

    k: int
    aoi_sets: np.ndarray          # (k + 1, N)
    targets: np.ndarray           # (k + 1,), 1-based
    prices: np.ndarray
    cost_arrival: np.ndarray      # C^(j)(., 1)
    cost_noarrival: np.ndarray    # C^(j)(., 0)

    def __len__(self):
        return self.k + 1


@dataclass
class ClusteredComputation:
    layers: list[ClusteredLayer]
    vectors_built: int

    @property
    def entries(self) -> int:
        return sum(len(layer) for layer in self.layers)


def clustered_layers(p: MultiPathProblem, t: int, aoi: Sequence[float],
                     first_target: int | None = None) -> ClusteredComputation:
    """Backward-clustered cost computation from slot ``t``.

    For offset ``k`` the unsampled vector is the current one aged by ``k``;
    entry ``j + 1`` is entry ``j`` with its max-AoI path reset by
    :func:`clustered_aoi_update`. The last offset is terminal (cost = max
    AoI). ``first_target`` forces the path priced at offset 0.
    """
    if not (0 <= t <= p.last_slot):
        raise DomainError(f"t must lie in 0..{p.last_slot}, got {t}")
    a0 = np.asarray(aoi, dtype=float)
    if a0.shape != (p.n_paths,):
        raise DomainError(f"aoi must have {p.n_paths} entries")
    delays = np.asarray(p.delays, dtype=float)
    K = p.last_slot - t

    sets, targets = [], []
    vectors = 0
    for k in range(K + 1):
        vecs = np.empty((k + 2, p.n_paths))
        vecs[0] = a0 + k
        tg = np.empty(k + 1, dtype=int)
        for j in range(k + 1):
            i = int(np.argmax(vecs[j]))
            if k == 0 and first_target is not None:
                i = first_target - 1
            tg[j] = i
            vecs[j + 1] = vecs[j]
            vecs[j + 1, i] = delays[i] + (k - j) / 2.0
        vectors += k + 2
        sets.append(vecs[:k + 1])
        targets.append(tg)

    layers: list[ClusteredLayer] = [None] * (K + 1)
    term = sets[K].max(axis=1)
    layers[K] = ClusteredLayer(K, sets[K], targets[K] + 1, np.zeros(K + 1), term, term.copy())
    for k in range(K - 1, -1, -1):
        nxt = layers[k + 1]
        price, c0, c1 = target_backup(
            p, sets[k].max(axis=1), delays[targets[k]],
            nxt.cost_noarrival[:k + 1], nxt.cost_arrival[:k + 1], nxt.cost_arrival[1:k + 2])
        layers[k] = ClusteredLayer(k, sets[k], targets[k] + 1, np.asarray(price), c1, c0)
    return ClusteredComputation(layers, vectors)


def approx_price_online(p: MultiPathProblem, t: int, state: MultiPathState,
                        target: int | None = None) -> ApproxQuote:
    """Approximate online price via the backward-clustered computation.

    Cost is quadratic in ``T - max D - t`` and does not depend on ``N``
    beyond vector copies. ``target`` overrides the priced path at slot ``t``
    (used by baselines); by default it is the max-foreseen-AoI path.
    """
    comp = clustered_layers(p, t, state.aoi, first_target=target)
    root = comp.layers[0]
    cost = root.cost_arrival[0] if state.s_prev else root.cost_noarrival[0]
    return ApproxQuote(int(root.targets[0]), float(root.prices[0]), float(cost))


def error_bound(p: MultiPathProblem, t: int, g_of_n: Callable[[int], int] | int) -> float:
    """Worst-case gap of the clustered policy, for a caller-supplied cycle ``g(N)``."""
    g = g_of_n(p.n_paths) if callable(g_of_n) else g_of_n
    if g < 0 or int(g) != g:
        raise DomainError(f"g(N) must be a nonnegative integer, got {g}")
    K = p.last_slot - t
    return (p.rho ** (g + 1) - p.rho ** (K + 1)) / (1.0 - p.rho) ** 2


def problem_metadata(p: MultiPathProblem) -> dict:
    return {"horizon": p.T, "delays": list(p.delays), "rho": p.rho, "alpha": p.chain.alpha,
            "beta": p.chain.beta, "distribution": p.dist.to_config(), "eps": p.eps}
