"""Brute-force reference computations for tests.

Everything here is deliberately independent of the solver modules: the
time-expanded network turns a flow over time problem with integral data
into a plain static maximum flow, solved by breadth-first augmentation.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Callable, Iterable, Mapping

from .network import INF, Network, NetworkError

__all__ = [
    "TimeExpandedNetwork",
    "exhaustive_feasible",
    "oracle_o_value",
    "time_expand",
]


@dataclass(frozen=True)
class TimeExpandedNetwork:
    """Copies ``(v, θ)`` for layers ``θ = 1..T`` and arc copies
    ``(v, θ) -> (w, θ + τ_vw)``; no holdover arcs."""

    base: Network
    horizon: int
    nodes: tuple
    arcs: tuple  # ((v, θ), (w, θ'), capacity)


def _integral(value, what):
    value = Fraction(value)
    if value.denominator != 1:
        raise NetworkError(f"{what} {value} is not integral")
    return int(value)


def time_expand(net: Network, horizon) -> TimeExpandedNetwork:
    T = _integral(horizon, "horizon")
    if T < 0:
        raise NetworkError("horizon must be non-negative")
    nodes = tuple((v, t) for t in range(1, T + 1) for v in net.nodes)
    arcs = []
    for a in net.arcs:
        tau = _integral(a.transit, f"transit time of {a.tail}->{a.head}")
        for t in range(1, T - tau + 1):
            arcs.append(((a.tail, t), (a.head, t + tau), a.capacity))
    return TimeExpandedNetwork(net, T, nodes, tuple(arcs))


def _max_flow(arcs, source, sink) -> Fraction:
    residual: dict = {}
    neighbours: dict = {}
    for u, v, c in arcs:
        residual[(u, v)] = residual.get((u, v), Fraction(0)) + c
        residual.setdefault((v, u), Fraction(0))
        neighbours.setdefault(u, set()).add(v)
        neighbours.setdefault(v, set()).add(u)
    value = Fraction(0)
    while True:
        parent = {source: None}
        queue = deque([source])
        while queue:
            u = queue.popleft()
            for v in neighbours.get(u, ()):
                if v not in parent and residual[(u, v)] > 0:
                    parent[v] = u
                    queue.append(v)
        if sink not in parent:
            return value
        path = []
        v = sink
        while parent[v] is not None:
            path.append((parent[v], v))
            v = parent[v]
        push = min(residual[e] for e in path)
        if push is INF:
            raise ValueError("unbounded maximum flow")
        for u, v in path:
            residual[(u, v)] = residual[(u, v)] - push
            residual[(v, u)] = residual[(v, u)] + push
        value += push


def oracle_o_value(net: Network, horizon, subset: Iterable[str]) -> Fraction:
    """Maximum flow from copies of sources in ``subset`` to copies of sinks
    outside it, in the time-expanded network."""
    subset = set(subset)
    tex = time_expand(net, horizon)
    src, snk = ("<source>", 0), ("<sink>", 0)
    arcs = list(tex.arcs)
    for v, t in tex.nodes:
        if v in net.sources and v in subset:
            arcs.append((src, (v, t), INF))
        elif v in net.sinks and v not in subset:
            arcs.append(((v, t), snk, INF))
    return _max_flow(arcs, src, snk)


def exhaustive_feasible(
    o: Callable[[frozenset], Fraction], terminals: Iterable[str], b: Mapping[str, Fraction]
) -> tuple[bool, frozenset | None, Fraction]:
    """Check ``b(X) <= o(X)`` for every subset.

    Returns ``(feasible, worst subset, largest excess b(X) - o(X))``; the
    subset is ``None`` when feasible.
    """
    terminals = list(terminals)
    worst, worst_gap = None, Fraction(0)
    for size in range(len(terminals) + 1):
        for combo in combinations(terminals, size):
            X = frozenset(combo)
            gap = sum((Fraction(b.get(r, 0)) for r in X), Fraction(0)) - o(X)
            if gap > worst_gap:
                worst, worst_gap = X, gap
    return worst is None, worst, worst_gap
