from fractions import Fraction
from itertools import combinations, permutations

import pytest

from tempoflow import (
    feasible,
    greedy_vertex,
    lex_max,
    make_network,
    net_outflow,
    o_value,
    quickest_horizon,
    sfm_min_norm,
    transshipment,
    verify,
)
from tempoflow.network import NetworkError
from tempoflow.oracle import exhaustive_feasible
from tempoflow.transshipment import InfeasibleError, NoFiniteHorizonError, supply_vector

from instances import crossover, crossover_unit, random_network, rng, single_arc

F = Fraction
ORDER = ("s1", "t1", "s2", "t2")


def subsets(items):
    items = list(items)
    for size in range(len(items) + 1):
        for combo in combinations(items, size):
            yield frozenset(combo)


# the o-oracle

def test_o_values_on_unit_crossover():
    net = crossover_unit()
    assert o_value(net, 4, {"s1"}) == 2
    assert o_value(net, 4, set()) == 0
    assert o_value(net, 4, net.terminals) == 0
    # s1,v,t1 and s2,w,t2 are disjoint paths of length 2
    assert o_value(net, 4, net.sources) == 4


def test_o_value_all_sources_crossover():
    assert o_value(crossover(), 4, {"s1", "s2"}) == 1


def test_o_is_monotone_in_horizon():
    net = crossover()
    for X in subsets(net.terminals):
        values = [o_value(net, T, X) for T in range(0, 10)]
        assert values == sorted(values)


# greedy vertices

def test_greedy_vertex_example():
    assert greedy_vertex(crossover_unit(), 4, ORDER) == {"s1": 2, "t1": -1, "s2": 1, "t2": -2}


def test_greedy_vertex_zero_horizon():
    assert set(greedy_vertex(crossover_unit(), 0, ORDER).values()) == {0}


def test_greedy_vertex_prefix_sums():
    net = crossover_unit()
    order = tuple(reversed(ORDER))
    z = greedy_vertex(net, 4, order)
    for j in range(len(order) + 1):
        assert sum((z[r] for r in order[:j]), F(0)) == o_value(net, 4, order[:j])


@pytest.mark.parametrize("order", list(permutations(ORDER)))
def test_greedy_vertex_is_lex_max_nets(order):
    net = crossover_unit()
    assert greedy_vertex(net, 4, order) == lex_max(net, 4, order).nets


# minimum norm point

def test_sfm_zero_function():
    res = sfm_min_norm(lambda X: F(0), ["a", "b", "c"])
    assert res.min_value == 0 and res.minimizer == frozenset()


def test_sfm_on_vertex_supplies():
    net = crossover_unit()
    b = {"s1": 2, "t1": -1, "s2": 1, "t2": -2}
    res = sfm_min_norm(lambda X: o_value(net, 4, X) - sum(b[r] for r in X), list(net.terminals))
    assert res.min_value == 0
    assert [(tuple(o), c) for o, c in res.combination] == [(ORDER, 1)]


def test_sfm_on_excess_supplies():
    net = crossover_unit()
    b = {"s1": 3, "s2": 0, "t1": 0, "t2": -3}
    g = lambda X: o_value(net, 4, X) - sum(b[r] for r in X)
    res = sfm_min_norm(g, list(net.terminals))
    brute = min(g(X) for X in subsets(net.terminals))
    # o({s1, t1}) = 1, so {s1, t1} beats {s1} (o = 2)
    assert res.min_value == brute == -2
    assert res.minimizer == frozenset({"s1", "t1"})


def _cut_function(r, n):
    """Cut function of a random weighted digraph minus a modular term."""
    weights = {(i, j): F(r.randint(0, 3)) for i in range(n) for j in range(n) if i != j}
    modular = [F(r.randint(-4, 4), r.randint(1, 3)) for _ in range(n)]

    def g(X):
        cut = sum(w for (i, j), w in weights.items() if i in X and j not in X)
        return cut - sum(modular[i] for i in X)

    return g


@pytest.mark.parametrize("case", range(25))
def test_sfm_matches_brute_force(case):
    r = rng(700 + case)
    n = r.randint(1, 6)
    g = _cut_function(r, n)
    res = sfm_min_norm(g, list(range(n)))
    assert res.min_value == min(g(X) for X in subsets(range(n)))
    assert res.min_value == sum(min(v, 0) for v in res.point.values())
    coeffs = [c for _, c in res.combination]
    assert sum(coeffs) == 1 and all(c > 0 for c in coeffs)
    assert len(coeffs) <= n


# feasibility

def test_feasible_vertex():
    cert = feasible(crossover_unit(), 4, {"s1": 2, "t1": -1, "s2": 1, "t2": -2})
    assert cert.feasible
    assert cert.combination.terms == ((ORDER, 1),)


def test_infeasible_certificate():
    net = crossover_unit()
    b = {"s1": 3, "t2": -3}
    cert = feasible(net, 4, b)
    assert not cert.feasible
    X = cert.violating_set
    assert sum(F(b.get(r, 0)) for r in X) - o_value(net, 4, X) == cert.gap > 0
    assert cert.gap == 2


def test_zero_supplies_feasible():
    cert = feasible(crossover_unit(), 4, {})
    assert cert.feasible and len(cert.combination) == 0


def test_supplies_default_to_network_field():
    net = crossover_unit()  # carries supplies s1:2, s2:1, t1:-1, t2:-2
    assert feasible(net, 4).feasible


@pytest.mark.parametrize(
    "b", [{"s1": -1, "t1": 1}, {"s1": 1}, {"v": 1, "t1": -1}, {"t1": 1, "s1": -1}]
)
def test_invalid_supplies(b):
    with pytest.raises(NetworkError):
        supply_vector(crossover_unit(), b)


@pytest.mark.parametrize("case", range(20))
def test_feasible_agrees_with_enumeration(case):
    r = rng(800 + case)
    net = random_network(r, max_nodes=7, max_terminals=5)
    T = r.randint(2, 10)
    b = {t: F(0) for t in net.terminals}
    for s in net.sources:
        t = r.choice(net.sinks)
        amount = F(r.randint(0, 12), r.randint(1, 2))
        b[s] += amount
        b[t] -= amount
    cert = feasible(net, T, b)
    ok, _, gap = exhaustive_feasible(lambda X: o_value(net, T, X), net.terminals, b)
    assert cert.feasible == ok
    if not ok:
        assert cert.gap == gap


# transshipments

def test_transshipment_of_a_vertex_is_the_lex_max_flow():
    net = crossover_unit()
    res = transshipment(net, 4, {"s1": 2, "t1": -1, "s2": 1, "t2": -2})
    assert res.flow == lex_max(net, 4, ORDER).flow


def test_transshipment_midpoint():
    net = crossover_unit()
    a = greedy_vertex(net, 4, ORDER)
    c = greedy_vertex(net, 4, ("s2", "t2", "s1", "t1"))
    b = {r: (a[r] + c[r]) / 2 for r in net.terminals}
    res = transshipment(net, 4, b)
    assert verify(res.flow).ok
    assert {r: net_outflow(res.flow, r) for r in net.terminals} == b
    assert sum(c for _, c in res.combination) == 1


def test_transshipment_zero():
    assert transshipment(crossover_unit(), 4, {}).flow.is_zero


def test_transshipment_infeasible():
    with pytest.raises(InfeasibleError) as info:
        transshipment(crossover_unit(), 4, {"s1": 3, "t2": -3})
    assert info.value.certificate.gap == 2


# quickest horizon

def test_quickest_unit_crossover():
    net = crossover_unit()
    b = {"s1": 1, "t2": -1}
    T = quickest_horizon(net, b, F(1, 64))
    assert T == 4
    assert feasible(net, T, b).feasible and not feasible(net, T - F(1, 64), b).feasible


def test_quickest_single_arc():
    assert quickest_horizon(single_arc(), {"s": 2, "t": -2}, F(1, 1024)) == 3


def test_quickest_rational_answer():
    net = single_arc(capacity=3)
    # 2 units at rate 3 need 2/3 time units plus transit 1
    T = quickest_horizon(net, {"s": 2, "t": -2}, F(1, 9))
    assert T == F(5, 3)


def test_quickest_zero_supplies():
    assert quickest_horizon(crossover_unit(), {}) == 0


def test_quickest_disconnected():
    net = make_network(["s", "t"], [], ["s"], ["t"])
    with pytest.raises(NoFiniteHorizonError):
        quickest_horizon(net, {"s": 1, "t": -1})
