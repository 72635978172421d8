import pytest

from tempoflow import (
    INF,
    SUPER,
    StaticFlow,
    decompose_standard,
    extend,
    min_cost_circulation,
    residual_capacity,
    shortest_walk_from_super,
)
from tempoflow.static_flow import NegativeCycleError

from instances import crossover_unit, random_network, rng


def test_residual_capacity_orientations():
    host = extend(crossover_unit(), set(), 4)
    x = StaticFlow.zero(host)
    assert residual_capacity(x, "s1", "v") == 1
    y = StaticFlow(host, {("s1", "v"): 1})
    assert residual_capacity(y, "v", "s1") == 1
    assert residual_capacity(y, "s1", "v") == 0
    assert residual_capacity(y, "t1", SUPER) is INF


def test_labels_of_zero_flow():
    host = extend(crossover_unit(), {"s1", "s2", "t1", "t2"}, 4)
    labels, pred = shortest_walk_from_super(StaticFlow.zero(host))
    # w is reached directly through s2, so its label is 2 (not 3 via v)
    assert labels == {"s1": 0, "s2": 0, "v": 1, "w": 1, "t1": 2, "t2": 2, SUPER: 0}
    assert pred["w"] == ("s2", "w")


def test_unreachable_nodes_flagged():
    host = extend(crossover_unit(), {"s1", "t1", "t2"}, 4)
    labels, _ = shortest_walk_from_super(StaticFlow.zero(host))
    assert labels["s2"] is None and labels["w"] == 2


def test_negative_cycle_witness():
    host = extend(crossover_unit(), {"s1", "t1", "s2"}, 4)
    with pytest.raises(NegativeCycleError) as info:
        shortest_walk_from_super(StaticFlow.zero(host))
    assert info.value.cost < 0
    assert SUPER in info.value.cycle


def test_first_sink_step():
    host = extend(crossover_unit(), {"s1", "t1", "s2"}, 4)
    res = min_cost_circulation(host)
    assert [(g.nodes, g.value, g.cost) for g in res.delta] == [
        ((SUPER, "s2", "w", "t2", SUPER), 1, -2)
    ]
    assert res.flow.cost() == -2


def test_source_removal_reroutes_flow():
    net = crossover_unit()
    x1 = min_cost_circulation(extend(net, {"s1", "t1", "s2"}, 4)).flow
    res = min_cost_circulation(extend(net, {"s1", "t1"}, 4), x1, (SUPER, "s2"))
    assert [(g.nodes, g.cost) for g in res.delta] == [((SUPER, "s1", "v", "w", "s2", SUPER), 1)]
    # the chain uses s2->w backwards
    assert not res.delta.chains[0].steps[-2].forward


def test_no_super_arcs_gives_zero():
    host = extend(crossover_unit(), {"s1", "s2", "t1", "t2"}, 7)
    res = min_cost_circulation(host)
    assert res.flow.values == {} and len(res.delta) == 0


def test_decompose_zero_flow():
    host = extend(crossover_unit(), {"s1", "s2"}, 4)
    assert len(decompose_standard(StaticFlow.zero(host))) == 0


def test_decompose_two_disjoint_cycles():
    host = extend(crossover_unit(), {"s1", "s2"}, 4)
    x = StaticFlow(
        host,
        {
            (SUPER, "s1"): 1, ("s1", "v"): 1, ("v", "t1"): 1, ("t1", SUPER): 1,
            (SUPER, "s2"): 1, ("s2", "w"): 1, ("w", "t2"): 1, ("t2", SUPER): 1,
        },
    )
    gamma = decompose_standard(x)
    assert sorted(g.nodes for g in gamma) == [
        (SUPER, "s1", "v", "t1", SUPER),
        (SUPER, "s2", "w", "t2", SUPER),
    ]
    assert all(g.value == 1 for g in gamma)
    assert gamma.arc_sum() == x.values
    assert gamma.cost == x.cost()


def _has_negative_cycle(x):
    try:
        shortest_walk_from_super(x)
    except NegativeCycleError:
        return True
    return False


@pytest.mark.parametrize("case", range(25))
def test_random_circulations_are_optimal(case):
    r = rng(100 + case)
    net = random_network(r, max_nodes=7)
    T = r.randint(4, 12)
    host = extend(net, net.sources, T)
    res = min_cost_circulation(host, record_labels=True)
    x = res.flow
    assert x.is_circulation() and x.is_feasible()
    assert not _has_negative_cycle(x)
    gamma = decompose_standard(x)
    assert gamma.arc_sum() == x.values
    assert gamma.cost == x.cost()
    assert res.delta.arc_sum() == x.values
    # augmenting never shortens a distance from the super-node
    for before, after in zip(res.labels, res.labels[1:]):
        for v, d in before.items():
            if d is not None:
                assert after[v] is None or after[v] >= d


def test_cost_is_orientation_independent():
    host = extend(crossover_unit(), {"s1", "s2"}, 4)
    x = min_cost_circulation(host).flow
    transit = {a.key: a.transit for a in host.arcs}
    # τ_wv x_wv with τ_wv = -τ_vw and x_wv = -x_vw
    by_reverse = sum((-transit[k]) * (-v) for k, v in x.values.items())
    assert by_reverse == x.cost() == -4
    assert all(x.value(h, t) == -v for (t, h), v in x.values.items())


def test_iteration_cap():
    from tempoflow.static_flow import IterationLimitError

    host = extend(crossover_unit(), {"s1", "s2"}, 4)
    with pytest.raises(IterationLimitError):
        min_cost_circulation(host, max_augmentations=1)
