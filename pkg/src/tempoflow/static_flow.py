"""Static circulations on extended networks.

The solver here is successive shortest augmentation from the super-node.
Because the only negative arcs of an extended network are the ``t -> SUPER``
arcs, every negative residual cycle passes through the super-node.  Splitting
the super-node into an "out" copy and an "in" copy turns each such cycle into
a shortest path between the two copies, so one Bellman-Ford engine serves the
maximum flow, earliest arrival and lexicographic algorithms alike.

Ties between equally short paths are broken by arc order: orientations are
relaxed in arc-index order (forward before backward) and a label is only
replaced on strict improvement.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple

from .network import INF, SUPER, Arc, ExtendedNetwork, Number

__all__ = [
    "ChainDecomposition",
    "ChainFlow",
    "CirculationResult",
    "NegativeCycleError",
    "StaticFlow",
    "Step",
    "UnboundedError",
    "decompose_standard",
    "min_cost_circulation",
    "residual_capacity",
    "shortest_walk_from_super",
]

ZERO = Fraction(0)


class NegativeCycleError(RuntimeError):
    """A negative-cost residual cycle was found; ``cycle`` lists its nodes."""

    def __init__(self, cycle: list[str], cost: Fraction):
        super().__init__(f"negative cycle {' -> '.join(cycle)} of cost {cost}")
        self.cycle = cycle
        self.cost = cost


class UnboundedError(RuntimeError):
    """A negative cycle has infinite residual capacity."""


class Step(NamedTuple):
    """One traversed arc orientation of a chain."""

    tail: str
    head: str
    transit: Fraction
    forward: bool  # True when (tail, head) is the stored arc

    @property
    def key(self) -> tuple[str, str]:
        return (self.tail, self.head) if self.forward else (self.head, self.tail)

    @property
    def sign(self) -> int:
        return 1 if self.forward else -1


@dataclass(frozen=True)
class ChainFlow:
    """``value`` units along a closed walk of arc orientations.

    Chains through the super-node start and end there; ``path`` is what is
    left after dropping the super-node and its two incident steps.
    """

    value: Fraction
    steps: tuple[Step, ...]

    def __post_init__(self):
        if self.value <= 0:
            raise ValueError("chain value must be positive")
        if not self.steps:
            raise ValueError("empty chain")
        for a, b in zip(self.steps, self.steps[1:] + self.steps[:1]):
            if a.head != b.tail:
                raise ValueError("chain is not a closed walk")

    @property
    def nodes(self) -> tuple[str, ...]:
        return tuple(s.tail for s in self.steps) + (self.steps[-1].head,)

    @property
    def length(self) -> Fraction:
        return sum((s.transit for s in self.steps), ZERO)

    @property
    def cost(self) -> Fraction:
        return self.value * self.length

    @property
    def through_super(self) -> bool:
        return self.steps[0].tail == SUPER

    @property
    def path_steps(self) -> tuple[Step, ...]:
        if not self.through_super:
            raise ValueError("chain does not pass through the super-node")
        return self.steps[1:-1]

    @property
    def path(self) -> tuple[str, ...]:
        return self.nodes[1:-1]

    @property
    def path_length(self) -> Fraction:
        return sum((s.transit for s in self.path_steps), ZERO)

    @property
    def start_time(self) -> Fraction:
        """Transit of the orientation leaving the super-node."""
        return self.steps[0].transit

    def uses(self, tail: str, head: str) -> bool:
        return any(s.tail == tail and s.head == head for s in self.steps)

    def scaled(self, factor) -> ChainFlow:
        return ChainFlow(self.value * factor, self.steps)


@dataclass(frozen=True)
class ChainDecomposition:
    """A multiset of chain flows.

    ``standard`` records whether every chain follows the direction of the
    flow it decomposes (as opposed to the augmenting cycles of a cycle
    canceling run, which may use backward orientations).
    """

    chains: tuple[ChainFlow, ...] = ()
    standard: bool = True

    def __iter__(self):
        return iter(self.chains)

    def __len__(self):
        return len(self.chains)

    @property
    def cost(self) -> Fraction:
        return sum((g.cost for g in self.chains), ZERO)

    def arc_sum(self) -> dict[tuple[str, str], Fraction]:
        """Signed value per stored arc key; zero entries omitted."""
        total: dict[tuple[str, str], Fraction] = {}
        for g in self.chains:
            for s in g.steps:
                total[s.key] = total.get(s.key, ZERO) + s.sign * g.value
        return {k: v for k, v in total.items() if v != 0}

    def using(self, tail: str, head: str) -> tuple[ChainFlow, ...]:
        return tuple(g for g in self.chains if g.uses(tail, head))

    def __add__(self, other: ChainDecomposition) -> ChainDecomposition:
        return ChainDecomposition(self.chains + other.chains, self.standard and other.standard)

    def scaled(self, factor) -> ChainDecomposition:
        return ChainDecomposition(tuple(g.scaled(factor) for g in self.chains), self.standard)


class StaticFlow:
    """Antisymmetric flow on the arcs of an extended network.

    Values are stored per arc key ``(tail, head)`` of the host; the opposite
    orientation is the negation.
    """

    def __init__(self, host: ExtendedNetwork, values: dict | None = None):
        self.host = host
        self._arcs = {a.key: a for a in host.arcs}
        self.values: dict[tuple[str, str], Fraction] = {}
        for key, val in (values or {}).items():
            if key not in self._arcs:
                raise KeyError(f"{key} is not an arc of the host network")
            if val != 0:
                self.values[key] = Fraction(val)

    @classmethod
    def zero(cls, host: ExtendedNetwork) -> StaticFlow:
        return cls(host)

    def __repr__(self):
        body = ", ".join(f"{t}->{h}: {v}" for (t, h), v in self.values.items())
        return f"StaticFlow({{{body}}})"

    def __eq__(self, other):
        if not isinstance(other, StaticFlow):
            return NotImplemented
        return self.host == other.host and self.values == other.values

    def value(self, tail: str, head: str) -> Fraction:
        if (tail, head) in self._arcs:
            return self.values.get((tail, head), ZERO)
        if (head, tail) in self._arcs:
            return -self.values.get((head, tail), ZERO)
        raise KeyError((tail, head))

    def arc(self, tail: str, head: str) -> Arc:
        return self._arcs[(tail, head)]

    def cost(self) -> Fraction:
        """Sum of transit times weighted by flow, one orientation per pair."""
        return sum((self._arcs[k].transit * v for k, v in self.values.items()), ZERO)

    def excess(self, node: str) -> Fraction:
        """Net flow leaving ``node``."""
        out = ZERO
        for (t, h), v in self.values.items():
            if t == node:
                out += v
            elif h == node:
                out -= v
        return out

    def is_circulation(self) -> bool:
        return all(self.excess(v) == 0 for v in self.host.nodes)

    def is_feasible(self) -> bool:
        return all(0 <= v <= self._arcs[k].capacity for k, v in self.values.items())

    def rehost(self, host: ExtendedNetwork, drop: Iterable[tuple[str, str]] = ()) -> StaticFlow:
        """Reinterpret the flow on another extended network of the same base.

        Arcs missing from ``host`` must carry zero flow unless listed in
        ``drop``, whose flow is discarded.
        """
        drop = set(drop)
        keep = {}
        for key, val in self.values.items():
            if key in drop:
                continue
            keep[key] = val
        return StaticFlow(host, keep)


def residual_capacity(x: StaticFlow, tail: str, head: str) -> Number:
    """Residual capacity ``u_vw - x_vw`` of either orientation."""
    if (tail, head) in x._arcs:
        return x._arcs[(tail, head)].capacity - x.values.get((tail, head), ZERO)
    if (head, tail) in x._arcs:
        return x.values.get((head, tail), ZERO)
    raise KeyError((tail, head))


# ---------------------------------------------------------------------------
# shortest paths

class _Edge(NamedTuple):
    u: int
    v: int
    cost: Fraction
    cap: Number
    step: Step


class _Residual:
    """Dense residual graph of ``values`` on ``arcs``.

    With ``split`` the super-node becomes two nodes: index ``n`` keeps the
    outgoing orientations, index ``n + 1`` receives the incoming ones.
    """

    def __init__(self, nodes: tuple[str, ...], arcs: tuple[Arc, ...], values: dict, split: bool):
        self.names = list(nodes)
        self.index = {v: i for i, v in enumerate(nodes)}
        self.psi = self.index[SUPER]
        self.psi_in = len(nodes) if split else self.psi
        self.size = len(nodes) + (1 if split else 0)
        self.edges: list[_Edge] = []
        for a in arcs:
            x = values.get(a.key, ZERO)
            fwd = a.capacity - x
            if fwd > 0:
                self._add(a.tail, a.head, a.transit, fwd, True)
            if x > 0:
                self._add(a.head, a.tail, -a.transit, x, False)

    def _add(self, tail, head, cost, cap, forward):
        u = self.index[tail]
        v = self.psi_in if head == SUPER else self.index[head]
        self.edges.append(_Edge(u, v, cost, cap, Step(tail, head, cost, forward)))

    def bellman_ford(self, source: int):
        """Labels and predecessor edges from ``source``; raises on negative cycles."""
        n = self.size
        dist: list[Fraction | None] = [None] * n
        pred: list[int | None] = [None] * n
        dist[source] = ZERO
        for _ in range(n):
            changed = False
            for ei, e in enumerate(self.edges):
                du = dist[e.u]
                if du is None:
                    continue
                nd = du + e.cost
                dv = dist[e.v]
                if dv is None or nd < dv:
                    dist[e.v] = nd
                    pred[e.v] = ei
                    changed = True
            if not changed:
                return dist, pred
        # still relaxing after n rounds
        for e in self.edges:
            if dist[e.u] is not None and dist[e.u] + e.cost < dist[e.v]:
                v = e.v
                break
        for _ in range(n):
            v = self.edges[pred[v]].u
        cycle = [v]
        cost = ZERO
        u = v
        while True:
            e = self.edges[pred[u]]
            cost += e.cost
            u = e.u
            cycle.append(u)
            if u == v:
                break
        cycle.reverse()
        names = [self._name(i) for i in cycle]
        raise NegativeCycleError(names, cost)

    def _name(self, i: int) -> str:
        return SUPER if i >= len(self.names) else self.names[i]

    def path_to(self, pred, target: int) -> list[_Edge]:
        path = []
        v = target
        seen = 0
        while v != self.psi:
            e = self.edges[pred[v]]
            path.append(e)
            v = e.u
            seen += 1
            if seen > self.size:
                raise RuntimeError("predecessor structure is cyclic")
        path.reverse()
        return path

    def labels(self, dist) -> dict[str, Fraction | None]:
        return {name: dist[i] for i, name in enumerate(self.names)}


def shortest_walk_from_super(x: StaticFlow):
    """Shortest residual distances from the super-node.

    Returns ``(labels, pred)``: ``labels[v]`` is the minimum cost of a
    super-node-to-``v`` path with positive residual capacity (``None`` when
    unreachable) and ``pred[v]`` the ``(tail, head)`` orientation entering
    ``v`` on such a path.  Raises :class:`NegativeCycleError` with a witness
    if a negative cycle is reachable.
    """
    res = _Residual(x.host.nodes, x.host.arcs, x.values, split=False)
    dist, pred = res.bellman_ford(res.psi)
    labels = res.labels(dist)
    preds = {
        res.names[i]: (res.edges[p].step.tail, res.edges[p].step.head)
        for i, p in enumerate(pred)
        if p is not None
    }
    return labels, preds


def _super_labels(arcs, nodes, values) -> dict[str, Fraction | None]:
    res = _Residual(nodes, arcs, values, split=True)
    dist, _ = res.bellman_ford(res.psi)
    return res.labels(dist)


# ---------------------------------------------------------------------------
# decomposition

def _decompose(values: dict, transit: dict, order: list) -> tuple[list[ChainFlow], list[ChainFlow]]:
    """Peel a signed circulation into flow-aligned cycles.

    Returns ``(through_super, free)``.  Walks start at the super-node while it
    still carries flow and follow the first flow-carrying orientation in
    ``order``; a node revisited before returning closes a super-free cycle.
    """
    rem: dict[tuple[str, str], Fraction] = {}
    out: dict[str, list[tuple[str, str]]] = {}
    for key in order:
        val = values.get(key, ZERO)
        if val == 0:
            continue
        t, h = key
        step = (t, h) if val > 0 else (h, t)
        rem[key] = abs(val)
        out.setdefault(step[0], []).append(key)

    def next_step(u):
        for key in out.get(u, ()):
            if rem[key] > 0:
                t, h = key
                forward = t == u and values[key] > 0
                head = h if forward else t
                tau = transit[key] if forward else -transit[key]
                return key, Step(u, head, tau, forward)
        return None

    psi_chains: list[ChainFlow] = []
    free: list[ChainFlow] = []
    while True:
        start = SUPER if next_step(SUPER) else None
        if start is None:
            start = next((u for u in out if next_step(u)), None)
            if start is None:
                break
        walk = [start]
        pos = {start: 0}
        steps: list[Step] = []
        keys: list[tuple[str, str]] = []
        while True:
            nxt = next_step(walk[-1])
            if nxt is None:
                raise ValueError(f"flow is not a circulation at {walk[-1]}")
            key, step = nxt
            steps.append(step)
            keys.append(key)
            if step.head in pos:
                j = pos[step.head]
                cyc_steps, cyc_keys = steps[j:], keys[j:]
                amount = min(rem[k] for k in cyc_keys)
                for k in cyc_keys:
                    rem[k] -= amount
                chain = ChainFlow(amount, tuple(cyc_steps))
                if chain.through_super:
                    psi_chains.append(chain)
                else:
                    free.append(chain)
                break
            pos[step.head] = len(walk)
            walk.append(step.head)
    return psi_chains, free


def decompose_standard(x: StaticFlow) -> ChainDecomposition:
    """Standard chain decomposition of a circulation.

    Cycles through the super-node come first, then super-free cycles; both
    in deterministic arc order.
    """
    arcs = x.host.arcs
    transit = {a.key: a.transit for a in arcs}
    psi_chains, free = _decompose(x.values, transit, [a.key for a in arcs])
    return ChainDecomposition(tuple(psi_chains + free), standard=True)


# ---------------------------------------------------------------------------
# minimum cost circulation

@dataclass
class CirculationResult:
    """Outcome of :func:`min_cost_circulation`.

    ``delta`` is a standard chain decomposition of the augmenting flow
    ``flow - warm_start`` (every chain through the super-node);
    ``augmentations`` lists the shortest cycles in the order they were
    saturated; ``labels`` holds super-node distances before the first and
    after every augmentation.
    """

    flow: StaticFlow
    delta: ChainDecomposition
    augmentations: ChainDecomposition
    labels: list[dict[str, Fraction | None]] = field(default_factory=list)
    dropped: tuple[ChainFlow, ...] = ()


def _augment(values: dict, path: list[_Edge], amount) -> None:
    for e in path:
        key = e.step.key
        values[key] = values.get(key, ZERO) + e.step.sign * amount


def min_cost_circulation(
    host: ExtendedNetwork,
    warm_start: StaticFlow | None = None,
    must_cancel: tuple[str, str] | None = None,
    *,
    max_augmentations: int | None = None,
    record_labels: bool = False,
) -> CirculationResult:
    """Minimum cost circulation in ``host``, starting from ``warm_start``.

    ``warm_start`` must have no negative residual cycle avoiding the
    super-node (zero flow qualifies, as does a minimum cost circulation of an
    extended network differing from ``host`` by one super-arc).  If
    ``must_cancel`` names a super-arc ``(SUPER, r)`` absent from ``host``, the
    flow it carries in ``warm_start`` is first rerouted along shortest
    residual ``SUPER -> r`` paths; each such path is closed into a chain by the
    reverse of the removed arc.  Remaining negative cycles are then saturated
    shortest first.
    """
    arcs = host.arcs
    host_keys = {a.key for a in arcs}
    values: dict[tuple[str, str], Fraction] = {}
    cancel_amount = ZERO
    cancel_arc = None
    if warm_start is not None:
        for key, val in warm_start.values.items():
            if key == must_cancel:
                cancel_amount = val
                cancel_arc = warm_start.arc(*key)
                continue
            if key not in host_keys:
                raise ValueError(f"warm start carries flow on {key}, which the host lacks")
            values[key] = val
    if must_cancel is not None:
        if must_cancel in host_keys:
            raise ValueError(f"{must_cancel} is still an arc of the host")
        if must_cancel[0] != SUPER:
            raise ValueError("must_cancel has to be a super-node arc")
        if cancel_arc is None:
            cancel_arc = Arc(SUPER, must_cancel[1], INF, ZERO)
    start = dict(values)
    nodes = host.nodes
    augmentations: list[ChainFlow] = []
    labels: list[dict] = []

    def budget():
        if max_augmentations is not None and len(augmentations) >= max_augmentations:
            raise IterationLimitError(
                f"stopped after {len(augmentations)} augmentations", len(augmentations)
            )

    # reroute the flow of a removed SUPER -> r arc
    remaining = cancel_amount
    while remaining > 0:
        budget()
        res = _Residual(nodes, arcs, values, split=True)
        dist, pred = res.bellman_ford(res.psi)
        if record_labels:
            labels.append(res.labels(dist))
        target = res.index[must_cancel[1]]
        if dist[target] is None:
            raise RuntimeError(f"no residual path to {must_cancel[1]}")
        path = res.path_to(pred, target)
        amount = min([e.cap for e in path] + [remaining])
        _augment(values, path, amount)
        remaining -= amount
        close = Step(must_cancel[1], SUPER, -cancel_arc.transit, False)
        augmentations.append(ChainFlow(amount, tuple(e.step for e in path) + (close,)))

    # saturate negative cycles through the super-node
    while True:
        res = _Residual(nodes, arcs, values, split=True)
        dist, pred = res.bellman_ford(res.psi)
        if record_labels:
            labels.append(res.labels(dist))
        d = dist[res.psi_in]
        if d is None or d >= 0:
            break
        budget()
        path = res.path_to(pred, res.psi_in)
        amount = min(e.cap for e in path)
        if amount is INF:
            raise UnboundedError("negative cycle of infinite capacity: " + " -> ".join(
                [path[0].step.tail] + [e.step.head for e in path]))
        _augment(values, path, amount)
        augmentations.append(ChainFlow(amount, tuple(e.step for e in path)))

    # augmenting flow y = values - start, on host arcs plus the removed arc
    y = {k: values.get(k, ZERO) - start.get(k, ZERO) for k in set(values) | set(start)}
    transit = {a.key: a.transit for a in arcs}
    order = [a.key for a in arcs]
    if must_cancel is not None:
        y[must_cancel] = -cancel_amount
        transit[must_cancel] = cancel_arc.transit
        order.append(must_cancel)
    psi_chains, free = _decompose(y, transit, order)
    for c in free:
        # zero-cost super-free cycles are dropped from the result
        if c.cost != 0:
            raise RuntimeError(f"augmenting flow contains a cycle of cost {c.cost}")
        for s in c.steps:
            if s.key in host_keys:
                values[s.key] = values.get(s.key, ZERO) - s.sign * c.value
    flow = StaticFlow(host, values)
    return CirculationResult(
        flow=flow,
        delta=ChainDecomposition(tuple(psi_chains), standard=True),
        augmentations=ChainDecomposition(tuple(augmentations), standard=False),
        labels=labels,
        dropped=tuple(free),
    )


class IterationLimitError(RuntimeError):
    """An iteration cap was reached before the algorithm finished."""

    def __init__(self, message: str, iterations: int):
        super().__init__(message)
        self.iterations = iterations


__all__.append("IterationLimitError")
