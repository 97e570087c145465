import numpy as np
import pytest
from hypothesis import given, strategies as st

from aoi_pricing.arrival import ArrivalChain
from aoi_pricing.errors import DomainError
from aoi_pricing.multi_path import (MultiPathProblem, MultiPathState, approx_price_online,
                                    choice_probabilities, clustered_aoi_update, clustered_layers,
                                    driver_choice, error_bound, foreseen_from_actual,
                                    immediate_cost_multi, select_target_path)
from aoi_pricing.oracle import approx_policy_cost, exact_single_path_dp
from aoi_pricing.single_path import SinglePathProblem, SinglePathState, immediate_cost

from conftest import ALL_DISTS, NORMAL, UNIFORM
from reference import clustered_reference, law

CHAIN = ArrivalChain(0.8, 0.6)

# three-path demo instance at t=0, from the scalar clustered reference in tests/reference.py
FIG6_PRICE = 4.548938958522794
FIG6_COST = 64.31267024456446


def test_problem_validation():
    with pytest.raises(DomainError):
        MultiPathProblem((2, 3, 5), 5, 0.85, CHAIN, UNIFORM)
    with pytest.raises(DomainError):
        MultiPathProblem((2, 0), 10, 0.85, CHAIN, UNIFORM)
    with pytest.raises(DomainError):
        MultiPathProblem((), 10, 0.85, CHAIN, UNIFORM)
    with pytest.raises(DomainError):
        MultiPathState((3.0, 0.5))
    p = MultiPathProblem([2, 3, 5], 30, 0.85, CHAIN, UNIFORM)
    assert p.delays == (2, 3, 5) and p.last_slot == 25 and p.eps == pytest.approx(5e-6)


def test_select_target_path():
    assert foreseen_from_actual((2, 4, 3), (2, 3, 5)) == (4.0, 7.0, 8.0)
    assert select_target_path(MultiPathState((4, 7, 8))) == 3
    assert select_target_path((5, 5, 3)) == 1
    assert select_target_path((9,)) == 1


def test_driver_choice_examples():
    assert driver_choice((0, 0, 0), (2, 3, 5), 0.3) == 0
    assert driver_choice((0, 0, 3), (2, 3, 5), 0.5) == 3
    assert driver_choice((1, 0, 0), (2, 3, 5), 0.6) == 0
    # ties go to the lowest index
    assert driver_choice((2, 3), (2, 3), 1.0) == 1


@pytest.mark.parametrize("d", ALL_DISTS, ids=lambda d: d.kind)
def test_choice_probabilities_single_price(d):
    q = choice_probabilities((0, 0, 3.0), (2, 3, 5), d)
    assert q[:2].tolist() == [0.0, 0.0]
    assert q[2] == pytest.approx(float(d.cdf(0.6)), abs=1e-14)


def test_choice_probabilities_against_sampling():
    prices, delays = (1.5, 2.0), (3, 5)
    x = NORMAL.ppf(np.random.default_rng(5).random(200_000))
    picks = np.array([driver_choice(prices, delays, v) for v in x])
    q = choice_probabilities(prices, delays, NORMAL)
    for i in (1, 2):
        freq = np.mean(picks == i)
        assert abs(freq - q[i - 1]) < 4 * np.sqrt(q[i - 1] * (1 - q[i - 1]) / x.size) + 1e-12


def test_immediate_cost_multi():
    p = MultiPathProblem((2, 3, 5), 30, 0.85, CHAIN, UNIFORM)
    st8 = MultiPathState((4, 7, 8))
    assert immediate_cost_multi(p, st8, 3, 0.0) == 8
    assert immediate_cost_multi(p, st8, 3, 2.5) == pytest.approx(9.0)
    with pytest.raises(DomainError):
        immediate_cost_multi(p, st8, 1, 2.5)
    single = SinglePathProblem(30, 5, 0.85, CHAIN, UNIFORM)
    one = MultiPathProblem((5,), 30, 0.85, CHAIN, UNIFORM)
    assert immediate_cost_multi(one, MultiPathState((7,), s_prev=1), 1, 3.0) == \
        immediate_cost(single, SinglePathState(7, 1), 3.0)


def test_clustered_aoi_update():
    base = np.array([10.0, 11.0, 12.0])
    assert clustered_aoi_update(base, 3, 2, 2, (2, 3, 5))[2] == 5.0
    assert clustered_aoi_update(base, 3, 4, 0, (2, 3, 5))[2] == 7.0
    out = clustered_aoi_update(base, 1, 3, 1, (2, 3, 5))
    assert out.tolist() == [3.0, 11.0, 12.0]
    assert base.tolist() == [10.0, 11.0, 12.0]
    with pytest.raises(DomainError):
        clustered_aoi_update(base, 1, 1, 2, (2, 3, 5))


@pytest.mark.parametrize("N", [1, 3, 9])
@pytest.mark.parametrize("T", [6, 11, 20])
def test_layer_cardinality(N, T):
    delays = tuple((2, 3, 5, 4)[i % 4] for i in range(N))
    p = MultiPathProblem(delays, T, 0.85, CHAIN, NORMAL)
    K = p.last_slot
    comp = clustered_layers(p, 0, [a + 3 for a in delays])
    assert [len(layer) for layer in comp.layers] == list(range(1, K + 2))
    assert comp.entries == (K + 1) * (K + 2) // 2
    assert comp.vectors_built == (K + 1) * (K + 2) // 2 + K + 1


def test_fig6_first_decision(fig6):
    p, a0 = fig6
    st0 = MultiPathState(foreseen_from_actual(a0, p.delays))
    q = approx_price_online(p, 0, st0)
    assert q.target == 3
    assert 0 < q.price <= 5
    assert abs(q.price - FIG6_PRICE) <= 2 * p.eps
    assert q.predicted_cost == pytest.approx(FIG6_COST, abs=1e-8)


@pytest.mark.parametrize("t,aoi,s", [(0, (3, 9, 6), 0), (7, (12, 4, 9), 1), (15, (5, 5, 5), 0)])
def test_clustered_against_reference(t, aoi, s):
    p = MultiPathProblem((2, 3, 5), 24, 0.9, ArrivalChain(0.5, 0.3), NORMAL)
    want = clustered_reference(p.delays, p.T, p.rho, 0.5, 0.3, law(NORMAL.kind, NORMAL.params),
                               t, aoi)
    q = approx_price_online(p, t, MultiPathState(aoi, s_prev=s))
    assert q.target == want[0]
    assert abs(q.price - want[1]) <= 2 * p.eps
    assert q.predicted_cost == pytest.approx(want[2 + s], abs=1e-8)


def test_terminal_slot_prices_zero(fig6):
    p, _ = fig6
    q = approx_price_online(p, p.last_slot, MultiPathState((6, 7, 8)))
    assert q.price == 0.0 and q.predicted_cost == 8.0
    for t in (-1, p.last_slot + 1):
        with pytest.raises(DomainError):
            approx_price_online(p, t, MultiPathState((6, 7, 8)))


def test_single_path_degenerate_k0():
    one = MultiPathProblem((5,), 6, 0.85, CHAIN, NORMAL)
    q = approx_price_online(one, 1, MultiPathState((9,)))
    assert q.target == 1 and q.price == 0.0


def test_single_path_degenerate_policy_gap():
    # one path: following the clustered policy is never better than the exact
    # optimum, and the gap stays inside the worst-case bound
    for T in (6, 8, 10, 14):
        single = SinglePathProblem(T, 5, 0.85, CHAIN, NORMAL)
        one = MultiPathProblem((5,), T, 0.85, CHAIN, NORMAL)
        for a in (5, 8, 12):
            gap = (approx_policy_cost(one, 0, MultiPathState((a,)))
                   - exact_single_path_dp(single, 0, SinglePathState(a))[1])
            assert -1e-9 <= gap <= error_bound(one, 0, 0)


@pytest.mark.xfail(strict=True, reason="literal (k-j)/2 clustering is not exact for one path "
                   "at K=1 or K=2; see decisions ledger")
def test_single_path_clustering_exact_up_to_k2():
    for T in (6, 7):
        single = SinglePathProblem(T, 5, 0.85, CHAIN, NORMAL)
        one = MultiPathProblem((5,), T, 0.85, CHAIN, NORMAL)
        for a in range(5, 12):
            exact = exact_single_path_dp(single, 0, SinglePathState(a))[0]
            approx = approx_price_online(one, 0, MultiPathState((a,))).price
            assert abs(exact - approx) <= 2 * single.eps


def test_error_bound():
    p = MultiPathProblem((2, 3, 5), 12, 0.85, CHAIN, NORMAL)
    assert error_bound(p, 0, 1) == pytest.approx((0.85 ** 2 - 0.85 ** 8) / 0.15 ** 2)
    assert error_bound(p, 0, lambda n: 7) == pytest.approx(0.0, abs=1e-15)
    bounds = [error_bound(p, 0, g) for g in range(7)]
    assert all(b <= a for a, b in zip(bounds, bounds[1:]))
    Ts = [error_bound(MultiPathProblem((2, 3, 5), T, 0.85, CHAIN, NORMAL), 0, 1)
          for T in range(6, 13)]
    assert all(b >= a for a, b in zip(Ts, Ts[1:]))
    with pytest.raises(DomainError):
        error_bound(p, 0, -1)


@given(st.lists(st.integers(1, 5), min_size=1, max_size=5),
       st.integers(0, 8), st.data(), st.sampled_from([UNIFORM, NORMAL]))
def test_approx_decision_properties(delays, extra, data, d):
    T = max(delays) + 1 + extra
    p = MultiPathProblem(tuple(delays), T, 0.85, CHAIN, d)
    aoi = tuple(data.draw(st.integers(1, 25)) for _ in delays)
    t = data.draw(st.integers(0, p.last_slot))
    q = approx_price_online(p, t, MultiPathState(aoi))
    assert q.target == select_target_path(aoi)
    assert 0.0 <= q.price <= p.delays[q.target - 1]
    comp = clustered_layers(p, t, aoi)
    for layer in comp.layers:
        assert np.all(layer.prices >= 0)
        assert np.all(layer.prices <= np.asarray(p.delays)[layer.targets - 1])
        for vec, tg in zip(layer.aoi_sets, layer.targets):
            assert tg == select_target_path(tuple(vec))
