"""Maximum flows over time, earliest arrival flows and lexicographically
maximum flows over time, all driven by one minimum cost circulation engine."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .flow_over_time import (
    ArrivalPattern,
    CutOverTime,
    FlowOverTime,
    _induce,
    arrival_pattern,
    cut_capacity,
    extract_cut,
    induce_finite,
    induce_infinite,
    verify,
)
from .network import INF, SUPER, Network, NetworkError, Number, extend
from .static_flow import (
    ChainDecomposition,
    IterationLimitError,
    StaticFlow,
    decompose_standard,
    min_cost_circulation,
    shortest_walk_from_super,
)

__all__ = [
    "EarliestArrivalResult",
    "IterationLimitError",
    "LexMaxResult",
    "LabelPropertyError",
    "LexOrderError",
    "MaxFlowResult",
    "earliest_arrival",
    "lex_max",
    "lex_order",
    "max_flow_over_time",
    "prefix_sets",
]

ZERO = Fraction(0)


class LexOrderError(NetworkError):
    """The terminal order is not a permutation of the terminals."""


class LabelPropertyError(AssertionError):
    """Distance labels broke the monotonicity or window property."""


@dataclass
class MaxFlowResult:
    flow: FlowOverTime
    value: Fraction
    certificate: CutOverTime
    static: StaticFlow
    decomposition: ChainDecomposition

    @property
    def certificate_capacity(self) -> Number:
        return cut_capacity(self.certificate, self.flow.network, self.static.host.horizon)


def max_flow_over_time(net: Network, horizon) -> MaxFlowResult:
    """Temporally repeated flow from a minimum cost circulation in the
    network extended by all sources."""
    horizon = Fraction(horizon)
    host = extend(net, net.sources, horizon)
    x = min_cost_circulation(host).flow
    gamma = decompose_standard(x)
    flow = induce_finite(gamma, net, horizon)
    return MaxFlowResult(flow, -x.cost(), extract_cut(x), x, gamma)


@dataclass
class EarliestArrivalResult:
    flow: FlowOverTime
    pattern: ArrivalPattern
    chains: ChainDecomposition
    static: StaticFlow


def earliest_arrival(net: Network, horizon, max_iterations: int | None = None) -> EarliestArrivalResult:
    """Shortest-cycle canceling; every saturated cycle becomes one chain.

    ``horizon`` may be :data:`INF`, in which case cycles are canceled until no
    source-sink path with residual capacity is left and the chains send flow
    forever.  ``max_iterations`` caps the number of saturated cycles.
    """
    if horizon is INF:
        # longer than any simple path, so every residual path is improving
        effective = sum((a.transit for a in net.arcs), ZERO) + 1
    else:
        effective = horizon = Fraction(horizon)
    host = extend(net, net.sources, effective)
    res = min_cost_circulation(host, max_augmentations=max_iterations)
    chains = res.augmentations
    if horizon is INF:
        flow = _induce_forever(chains, net)
    else:
        flow = induce_finite(chains, net, horizon)
    return EarliestArrivalResult(flow, arrival_pattern(flow), chains, res.flow)


def _induce_forever(chains: ChainDecomposition, net: Network) -> FlowOverTime:
    windows = [(ZERO, INF)] * len(chains)
    return FlowOverTime(net, _induce(net, chains, windows), INF)


# ---------------------------------------------------------------------------
# lexicographically maximum flows

def lex_order(net: Network, order: Sequence[str]) -> tuple[str, ...]:
    """Validate a priority order ``r_k, ..., r_1`` of all terminals."""
    order = tuple(order)
    if sorted(order) != sorted(net.terminals) or len(set(order)) != len(order):
        raise LexOrderError(
            f"order {list(order)} is not a permutation of the terminals {list(net.terminals)}"
        )
    return order


def prefix_sets(order: Sequence[str]) -> list[frozenset]:
    """``X_0 = S, X_1, ..., X_k = ∅`` where ``X_i`` drops the last ``i`` entries."""
    k = len(order)
    return [frozenset(order[: k - i]) for i in range(k + 1)]


@dataclass
class LexMaxResult:
    """Outcome of :func:`lex_max`.

    ``deltas[i - 1]`` is the decomposition added when terminal
    ``order[k - i]`` leaves the subset; ``labels[i]`` the distance labels of
    the ``i``-th circulation.
    """

    flow: FlowOverTime
    decomposition: ChainDecomposition
    deltas: list[ChainDecomposition]
    nets: dict[str, Fraction]
    order: tuple[str, ...]
    labels: list[dict] = field(default_factory=list)

    def prefix_values(self) -> list[tuple[frozenset, Fraction]]:
        """``(X_i, Σ_{r∈X_i} net_r)`` for ``i = 0..k``."""
        return [(X, sum((self.nets[r] for r in X), ZERO)) for X in prefix_sets(self.order)]


def _le(a, b) -> bool:
    """``a <= b`` with ``None`` read as +infinity."""
    if b is None:
        return True
    if a is None:
        return False
    return a <= b


def _check_labels(prev: dict, cur: dict, delta: ChainDecomposition, horizon, i: int) -> None:
    for v, p in prev.items():
        if not _le(ZERO, p):
            raise LabelPropertyError(f"step {i}: label of {v} is negative ({p})")
        if not _le(p, cur[v]):
            raise LabelPropertyError(f"step {i}: label of {v} dropped from {p} to {cur[v]}")
    for chain in delta:
        d = ZERO
        for step in chain.steps[:-1]:
            d += step.transit
            v = step.head
            hi = horizon if cur[v] is None else min(cur[v], horizon)
            if not (_le(prev[v], d) and d <= hi):
                raise LabelPropertyError(
                    f"step {i}: chain {chain.nodes} reaches {v} at {d}, outside [{prev[v]}, {hi}]"
                )


def lex_max(
    net: Network,
    horizon,
    order: Sequence[str],
    *,
    check: bool = True,
    max_iterations: int | None = None,
) -> LexMaxResult:
    """Lexicographically maximum flow over time for the order ``r_k, ..., r_1``.

    Terminals are dropped from the subset starting with the last entry of
    ``order``.  A sink that drops out gains an arc to the super-node; a source
    that drops out loses its arc from the super-node and the flow it carried
    is rerouted.  The union of all augmenting decompositions sums to zero and
    induces the result.  With ``check`` the distance-label properties and
    feasibility of the result are asserted.
    """
    order = lex_order(net, order)
    horizon = Fraction(horizon)
    k = len(order)
    sets = prefix_sets(order)
    host = extend(net, sets[0], horizon)
    x = StaticFlow.zero(host)
    labels = [shortest_walk_from_super(x)[0]]
    deltas = []
    nets = {}
    for i in range(1, k + 1):
        r = order[k - i]
        host = extend(net, sets[i], horizon)
        cancel = (SUPER, r) if net.is_source(r) else None
        res = min_cost_circulation(host, x, cancel, max_augmentations=max_iterations)
        x = res.flow
        deltas.append(res.delta)
        nets[r] = res.delta.cost
        labels.append(shortest_walk_from_super(x)[0])
        if check:
            _check_labels(labels[-2], labels[-1], res.delta, horizon, i)
    if x.values:
        raise RuntimeError("final circulation is not zero")
    gamma = ChainDecomposition(tuple(g for d in deltas for g in d.chains), standard=False)
    flow = induce_infinite(gamma, net, horizon)
    if check:
        report = verify(flow)
        if not report.ok:
            raise LabelPropertyError(f"lexicographically maximum flow is infeasible: {report.violations[0]}")
    return LexMaxResult(flow, gamma, deltas, {r: nets[r] for r in order}, order, labels)
