import numpy as np
import pytest

from aoi_pricing.arrival import ArrivalChain, expected_arrival
from aoi_pricing.errors import CapacityError, DomainError
from aoi_pricing.multi_path import MultiPathProblem, MultiPathState
from aoi_pricing.oracle import (NODE_CLASSES, classify_exhaustive_nodes, ExactMultiPathDP, ExactSinglePathDP, ExhaustivePolicyDP,
                                exact_multi_path_dp, exact_single_path_dp,
                                exhaustive_policy_dp, write_memo_csv)
from aoi_pricing.single_path import (SinglePathProblem, SinglePathState, immediate_cost,
                                     transition_probs)

from conftest import NORMAL, UNIFORM
from reference import law, single_path_reference

CHAIN = ArrivalChain(0.8, 0.6)


def test_single_guard():
    with pytest.raises(CapacityError):
        ExactSinglePathDP(SinglePathProblem(20, 5, 0.85, CHAIN, NORMAL))


def test_single_terminal_and_range():
    p = SinglePathProblem(10, 3, 0.85, CHAIN, NORMAL)
    assert exact_single_path_dp(p, 7, SinglePathState(11, 1)) == (0.0, 11.0)
    with pytest.raises(DomainError):
        exact_single_path_dp(p, 8, SinglePathState(11))


def test_single_against_minimisation_reference():
    p = SinglePathProblem(11, 4, 0.7, ArrivalChain(0.6, 0.2), NORMAL)
    ref = single_path_reference(11, 4, 0.7, 0.6, 0.2, law(NORMAL.kind, NORMAL.params))
    dp = ExactSinglePathDP(p)
    for t in range(p.last_slot):
        for a in range(4, 4 + p.T):
            price, c0, c1 = dp.value(t, a)
            rp, r0, r1 = ref(t, a)
            assert abs(price - rp) <= 2 * p.eps
            assert c0 == pytest.approx(r0, abs=1e-8) and c1 == pytest.approx(r1, abs=1e-8)


def test_single_self_consistency():
    p = SinglePathProblem(12, 4, 0.85, CHAIN, NORMAL)
    dp = ExactSinglePathDP(p)
    dp.value(0, 6)
    for (t, a), (price, c0, c1) in list(dp.memo.items()):
        if t == p.last_slot:
            continue
        for s, c in ((0, c0), (1, c1)):
            st = SinglePathState(a, s)
            q = transition_probs(p, st, price)
            cont = (q.q_noarrival * dp.cost(t + 1, a + 1, 0) + q.q_reject * dp.cost(t + 1, a + 1, 1)
                    + q.q_sample * dp.cost(t + 1, p.D, 1))
            assert abs(c - (immediate_cost(p, st, price) + p.rho * cont)) <= 1e-9


def test_single_cost_monotone_in_a():
    p = SinglePathProblem(11, 3, 0.9, CHAIN, UNIFORM)
    dp = ExactSinglePathDP(p)
    for t in range(p.last_slot + 1):
        for s in (0, 1):
            costs = [dp.cost(t, a, s) for a in range(3, 3 + p.T + 1)]
            assert all(b >= a for a, b in zip(costs, costs[1:]))


def test_determinism():
    p = SinglePathProblem(11, 3, 0.9, CHAIN, NORMAL)
    assert (exact_single_path_dp(p, 0, SinglePathState(5))
            == exact_single_path_dp(p, 0, SinglePathState(5)))


def test_multi_guards():
    with pytest.raises(CapacityError):
        ExactMultiPathDP(MultiPathProblem((2, 3, 5), 18, 0.85, CHAIN, NORMAL))
    with pytest.raises(CapacityError):
        ExactMultiPathDP(MultiPathProblem(tuple([3] * 9), 8, 0.85, CHAIN, NORMAL))


def test_multi_n1_matches_single():
    single = SinglePathProblem(12, 4, 0.85, CHAIN, NORMAL)
    one = MultiPathProblem((4,), 12, 0.85, CHAIN, NORMAL)
    for t in (0, 3, 7):
        for a in (4, 6, 10):
            for s in (0, 1):
                ps, cs = exact_single_path_dp(single, t, SinglePathState(a, s))
                tg, pm, cm = exact_multi_path_dp(one, t, MultiPathState((a,), s_prev=s))
                assert tg == 1
                assert abs(ps - pm) <= 2 * single.eps
                assert cm == pytest.approx(cs, abs=1e-12)


def test_multi_terminal():
    p = MultiPathProblem((2, 3, 5), 10, 0.85, CHAIN, NORMAL)
    assert exact_multi_path_dp(p, 5, MultiPathState((3, 9, 6))) == (2, 0.0, 9.0)


def test_multi_fixed_rule_evaluation():
    # zero prices everywhere: cost is the deterministic discounted max-AoI sum
    p = MultiPathProblem((2, 3, 5), 11, 0.85, CHAIN, NORMAL)
    dp = ExactMultiPathDP(p, rule=lambda t, aoi: (1, 0.0))
    a = (4.0, 7.0, 8.0)
    got = dp.value(0, a)[2]
    K = p.last_slot
    want = sum(0.85 ** k * (8 + k) for k in range(K)) + 0.85 ** K * (8 + K)
    assert got == pytest.approx(want, abs=1e-9)


def test_exhaustive_guards():
    with pytest.raises(CapacityError):
        ExhaustivePolicyDP(MultiPathProblem((2, 3, 5), 9, 0.85, CHAIN, NORMAL))
    with pytest.raises(CapacityError):
        ExhaustivePolicyDP(MultiPathProblem((2, 3), 10, 0.85, CHAIN, NORMAL))
    with pytest.raises(CapacityError):
        ExhaustivePolicyDP(MultiPathProblem((2, 3), 7, 0.85, CHAIN, NORMAL), grid_step=0.1)


def test_exhaustive_symmetric_state():
    p = MultiPathProblem((3, 3), 7, 0.85, CHAIN, NORMAL)
    dp = ExhaustivePolicyDP(p)
    prices, _ = exhaustive_policy_dp(p, 0, MultiPathState((6, 6)), solver=dp)
    gains = dp.node_gains(0, (6.0, 6.0))
    one = [k for k, row in enumerate(dp.grid) if row[0] > 0 and row[1] == 0]
    two = [k for k, row in enumerate(dp.grid) if row[1] > 0 and row[0] == 0]
    assert min(gains[one]) == pytest.approx(min(gains[two]), abs=1e-12)
    assert np.count_nonzero(prices) == 1


def test_exhaustive_not_worse_than_single_target():
    # single-target pricing is a subset of the grid only up to grid resolution,
    # so compare against the single-target DP restricted to the same grid
    p = MultiPathProblem((2, 5), 8, 0.85, CHAIN, UNIFORM)
    dp = ExhaustivePolicyDP(p, 0.25)
    single_target = dp.grid[np.count_nonzero(dp.grid, axis=1) <= 1]
    _, cost = exhaustive_policy_dp(p, 0, MultiPathState((5, 8)), solver=dp)
    sub = ExhaustivePolicyDP(p, 0.25)
    sub.grid = single_target
    sub.q = dp.q[np.count_nonzero(dp.grid, axis=1) <= 1]
    sub.n_positive = sub.n_positive[np.count_nonzero(dp.grid, axis=1) <= 1]
    _, restricted = exhaustive_policy_dp(p, 0, MultiPathState((5, 8)), solver=sub)
    assert cost <= restricted + 1e-12


def test_exhaustive_single_target_matches_exact_on_grid_prices():
    # the exact oracle prices continuously; the grid optimum can only be worse
    p = MultiPathProblem((2, 4), 8, 0.85, CHAIN, NORMAL)
    _, grid_cost = exhaustive_policy_dp(p, 0, MultiPathState((4, 9)))
    _, _, exact = exact_multi_path_dp(p, 0, MultiPathState((4, 9)))
    assert grid_cost >= exact - 1e-3


def test_exhaustive_accounting():
    p = MultiPathProblem((2, 3), 7, 0.85, CHAIN, UNIFORM)
    dp = ExhaustivePolicyDP(p)
    n0, n1 = dp.value(0, (4.0, 6.0))
    e0, e1 = expected_arrival(CHAIN, 0), expected_arrival(CHAIN, 1)
    # both bits share the same arrival-conditional gain
    a0, a1 = dp.value(1, (5.0, 7.0))
    g = dp.node_gains(0, (4.0, 6.0)).min()
    assert n0 == pytest.approx(6 + 0.85 * ((1 - e0) * a0 + e0 * a1) + e0 * g, abs=1e-12)
    assert n1 == pytest.approx(6 + 0.85 * ((1 - e1) * a0 + e1 * a1) + e1 * g, abs=1e-12)


def test_classify_nodes_counts_every_solved_node():
    p = MultiPathProblem((2, 4), 7, 0.85, CHAIN, NORMAL)
    dp = ExhaustivePolicyDP(p, 0.25)
    exhaustive_policy_dp(p, 0, MultiPathState((4, 9)), solver=dp)
    counts = classify_exhaustive_nodes(dp)
    assert tuple(counts) == NODE_CLASSES
    assert sum(counts.values()) == len(dp.nodes) > 0
    assert counts["single_off_max"] == 0


def test_memo_csv(tmp_path):
    p = SinglePathProblem(8, 3, 0.85, CHAIN, NORMAL)
    dp = ExactSinglePathDP(p)
    dp.value(0, 4)
    write_memo_csv(dp.memo, tmp_path / "memo.csv")
    lines = (tmp_path / "memo.csv").read_text().splitlines()
    assert lines[0] == "t,aoi,values"
    assert len(lines) == len(dp.memo) + 1
