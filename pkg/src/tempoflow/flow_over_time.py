"""Flows over time as piecewise-constant rate functions on the stored arcs."""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .network import INF, Network, NetworkError, Number, format_number, parse_rational
from .static_flow import ChainDecomposition, StaticFlow, shortest_walk_from_super

__all__ = [
    "ArrivalPattern",
    "CutOverTime",
    "FlowOverTime",
    "StepFunction",
    "VerificationReport",
    "Violation",
    "arrival_pattern",
    "cut_capacity",
    "extract_cut",
    "induce_finite",
    "induce_infinite",
    "net_outflow",
    "schedule_from_dict",
    "schedule_to_dict",
    "verify",
]

ZERO = Fraction(0)


class StepFunction:
    """Right-continuous piecewise-constant function of time.

    Stored as breakpoints ``(time, rate)``: the function takes ``rate`` from
    ``time`` up to the next breakpoint, and is 0 before the first one.
    Breakpoint lists are canonical (no repeated rates, no leading zero), so
    two step functions are equal exactly when their breakpoints are.
    """

    __slots__ = ("breakpoints",)

    def __init__(self, breakpoints: Iterable[tuple] = ()):
        canon: list[tuple[Fraction, Fraction]] = []
        last_time = None
        for t, r in breakpoints:
            t, r = Fraction(t), Fraction(r)
            if last_time is not None and t <= last_time:
                raise ValueError("breakpoint times must increase")
            last_time = t
            prev = canon[-1][1] if canon else ZERO
            if r != prev:
                canon.append((t, r))
        self.breakpoints = tuple(canon)

    @classmethod
    def from_pieces(cls, pieces: Iterable[tuple]) -> StepFunction:
        """Sum of ``rate`` on ``[start, end)`` over ``(start, end, rate)`` pieces.

        ``end`` may be :data:`INF`.
        """
        events: dict[Fraction, Fraction] = {}
        for start, end, rate in pieces:
            if rate == 0:
                continue
            start = Fraction(start)
            if end is not INF:
                end = Fraction(end)
                if end <= start:
                    continue
                events[end] = events.get(end, ZERO) - rate
            events[start] = events.get(start, ZERO) + rate
        level = ZERO
        points = []
        for t in sorted(events):
            level += events[t]
            points.append((t, level))
        return cls(points)

    @classmethod
    def zero(cls) -> StepFunction:
        return cls()

    def __eq__(self, other):
        if not isinstance(other, StepFunction):
            return NotImplemented
        return self.breakpoints == other.breakpoints

    def __hash__(self):
        return hash(self.breakpoints)

    def __repr__(self):
        pts = ", ".join(f"({t}, {r})" for t, r in self.breakpoints)
        return f"StepFunction([{pts}])"

    def __bool__(self):
        return bool(self.breakpoints)

    def __call__(self, time) -> Fraction:
        times = [t for t, _ in self.breakpoints]
        i = bisect.bisect_right(times, Fraction(time))
        return self.breakpoints[i - 1][1] if i else ZERO

    def __add__(self, other: StepFunction) -> StepFunction:
        return StepFunction.from_pieces(list(self.pieces()) + list(other.pieces()))

    def __neg__(self) -> StepFunction:
        return self.scale(-1)

    def __sub__(self, other: StepFunction) -> StepFunction:
        return self + (-other)

    def scale(self, factor) -> StepFunction:
        factor = Fraction(factor)
        if factor == 0:
            return StepFunction()
        return StepFunction((t, r * factor) for t, r in self.breakpoints)

    def shift(self, delta) -> StepFunction:
        """``g(θ) = f(θ - delta)``."""
        delta = Fraction(delta)
        return StepFunction((t + delta, r) for t, r in self.breakpoints)

    def pieces(self):
        """All maximal constant pieces ``(start, end, rate)`` with nonzero rate."""
        bps = self.breakpoints
        for i, (t, r) in enumerate(bps):
            end = bps[i + 1][0] if i + 1 < len(bps) else INF
            if r != 0:
                yield (t, end, r)

    segments = pieces

    @property
    def bounded(self) -> bool:
        return not self.breakpoints or self.breakpoints[-1][1] == 0

    def support(self) -> tuple[Fraction, Number] | None:
        """Smallest interval ``[a, b)`` outside which the function is 0."""
        if not self.breakpoints:
            return None
        last_t, last_r = self.breakpoints[-1]
        return self.breakpoints[0][0], (last_t if last_r == 0 else INF)

    def integral(self) -> Fraction:
        if not self.bounded:
            raise ValueError("integral of a function with unbounded support")
        return sum(((e - s) * r for s, e, r in self.pieces()), ZERO)

    def integral_until(self, time) -> Fraction:
        time = Fraction(time)
        total = ZERO
        for s, e, r in self.pieces():
            if s >= time:
                break
            hi = time if e is INF or e > time else e
            total += (hi - s) * r
        return total


@dataclass(frozen=True)
class FlowOverTime:
    """Rates entering each stored arc of ``network``.

    The opposite orientation is implicit: ``f_wv(θ) = -f_vw(θ - τ_vw)``.
    Missing arcs carry rate 0.
    """

    network: Network
    rates: Mapping[tuple[str, str], StepFunction]
    horizon: Number

    def __post_init__(self):
        clean = {}
        for key, fn in self.rates.items():
            if not self.network.has_arc(*key):
                raise NetworkError(f"{key} is not a stored arc")
            if fn:
                clean[key] = fn
        object.__setattr__(self, "rates", clean)

    def rate(self, tail: str, head: str) -> StepFunction:
        """Rate function of either orientation."""
        if self.network.has_arc(tail, head):
            return self.rates.get((tail, head), StepFunction())
        fwd = self.rates.get((head, tail), StepFunction())
        return -fwd.shift(self.network.transit(head, tail))

    def __add__(self, other: FlowOverTime) -> FlowOverTime:
        if other.network != self.network:
            raise ValueError("flows live on different networks")
        keys = set(self.rates) | set(other.rates)
        rates = {k: self.rates.get(k, StepFunction()) + other.rates.get(k, StepFunction()) for k in keys}
        return FlowOverTime(self.network, rates, max(self.horizon, other.horizon))

    def scale(self, factor) -> FlowOverTime:
        return FlowOverTime(self.network, {k: f.scale(factor) for k, f in self.rates.items()}, self.horizon)

    def __eq__(self, other):
        if not isinstance(other, FlowOverTime):
            return NotImplemented
        return (self.network, self.horizon, self.rates) == (other.network, other.horizon, other.rates)

    @property
    def is_zero(self) -> bool:
        return not self.rates

    def inflow(self, node: str) -> StepFunction:
        """Rate at which flow arrives at ``node`` through stored arcs."""
        total = []
        for a in self.network.arcs:
            if a.head == node and a.key in self.rates:
                total.extend(self.rates[a.key].shift(a.transit).pieces())
        return StepFunction.from_pieces(total)

    def outflow(self, node: str) -> StepFunction:
        total = []
        for a in self.network.arcs:
            if a.tail == node and a.key in self.rates:
                total.extend(self.rates[a.key].pieces())
        return StepFunction.from_pieces(total)


# ---------------------------------------------------------------------------
# inducing flows over time from chain decompositions

def _induce(net: Network, gamma: ChainDecomposition, windows) -> dict:
    pieces: dict[tuple[str, str], list] = {}
    for chain, (lo, hi) in zip(gamma.chains, windows):
        d = ZERO
        for step in chain.path_steps:
            if step.forward:
                piece = (lo + d, hi if hi is INF else hi + d, chain.value)
            else:
                # flow entering w->v at time θ is flow leaving v->w at θ - τ_vw
                piece = (
                    lo + d + step.transit,
                    hi if hi is INF else hi + d + step.transit,
                    -chain.value,
                )
            pieces.setdefault(step.key, []).append(piece)
            d += step.transit
    for key in pieces:
        if not net.has_arc(*key):
            raise ValueError(f"chain uses {key}, which is not in the network")
    return {k: StepFunction.from_pieces(p) for k, p in pieces.items()}


def induce_finite(gamma: ChainDecomposition, net: Network, horizon) -> FlowOverTime:
    """Send ``|γ|`` into ``P_γ`` during ``[0, T - τ(P_γ))`` for every chain."""
    horizon = Fraction(horizon)
    windows = []
    for chain in gamma.chains:
        first = chain.steps[0] if chain.steps else None
        if not chain.through_super or not first.forward or not net.is_source(first.head):
            raise ValueError(f"chain {chain.nodes} does not leave the super-node into a source")
        length = chain.path_length
        if length > horizon:
            raise ValueError(f"path {chain.path} is longer than the horizon {horizon}")
        windows.append((ZERO, horizon - length))
    return FlowOverTime(net, _induce(net, gamma, windows), horizon)


def induce_infinite(gamma: ChainDecomposition, net: Network, horizon) -> FlowOverTime:
    """Send ``|γ|`` into ``P_γ`` from the chain's start time on, forever.

    The chains must add up to the zero flow, so that all rates cancel after
    a bounded time.
    """
    residue = gamma.arc_sum()
    if residue:
        key, val = next(iter(residue.items()))
        raise ValueError(f"chains do not sum to zero (arc {key} carries {val})")
    windows = []
    for chain in gamma.chains:
        if not chain.through_super:
            raise ValueError(f"chain {chain.nodes} avoids the super-node")
        windows.append((chain.start_time, INF))
    return FlowOverTime(net, _induce(net, gamma, windows), Fraction(horizon))


# ---------------------------------------------------------------------------
# verification

@dataclass(frozen=True)
class Violation:
    kind: str  # "capacity", "horizon" or "conservation"
    where: str
    start: Fraction
    end: Number
    value: Fraction

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "where": self.where,
            "from": format_number(self.start),
            "to": format_number(self.end),
            "value": format_number(self.value),
        }


@dataclass
class VerificationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def of_kind(self, kind: str) -> list[Violation]:
        return [v for v in self.violations if v.kind == kind]

    def to_dict(self) -> dict:
        return {"ok": self.ok, "violations": [v.to_dict() for v in self.violations]}


def _arc_name(tail, head) -> str:
    return f"{tail}->{head}"


def verify(f: FlowOverTime) -> VerificationReport:
    """Check capacities, horizon and conservation of a flow over time.

    Capacities are checked on every constant piece, so a piece whose rate is
    negative or above capacity is reported with its full interval.
    """
    net = f.network
    report = VerificationReport()
    T = f.horizon
    for a in net.arcs:
        fn = f.rates.get(a.key)
        if fn is None:
            continue
        name = _arc_name(a.tail, a.head)
        for s, e, r in fn.pieces():
            if r < 0 or r > a.capacity:
                report.violations.append(Violation("capacity", name, s, e, r))
        # flow entering after T - τ would still be travelling at T
        limit = INF if T is INF else T - a.transit
        for s, e, r in fn.pieces():
            if s < 0:
                report.violations.append(Violation("horizon", name, s, min(e, ZERO), r))
            if e > limit:
                report.violations.append(Violation("horizon", name, max(s, limit), e, r))
    for v in net.nodes:
        if v in net.sources or v in net.sinks:
            continue
        balance = f.outflow(v) - f.inflow(v)
        for s, e, r in balance.pieces():
            report.violations.append(Violation("conservation", v, s, e, r))
    return report


# ---------------------------------------------------------------------------
# measures

def net_outflow(f: FlowOverTime, node: str) -> Fraction:
    """Total amount of flow leaving ``node`` minus the amount arriving."""
    return f.outflow(node).integral() - f.inflow(node).integral()


@dataclass(frozen=True)
class ArrivalPattern:
    """Cumulative sink arrivals: breakpoints ``(time, amount, slope)``.

    Between breakpoints the amount grows linearly with the given slope.
    """

    breakpoints: tuple[tuple[Fraction, Fraction, Fraction], ...]

    def __call__(self, time) -> Fraction:
        time = Fraction(time)
        best = None
        for bp in self.breakpoints:
            if bp[0] <= time:
                best = bp
            else:
                break
        if best is None:
            return ZERO
        t, amount, slope = best
        return amount + slope * (time - t)

    @property
    def times(self) -> tuple[Fraction, ...]:
        return tuple(t for t, _, _ in self.breakpoints)

    @property
    def total(self) -> Number:
        if not self.breakpoints:
            return ZERO
        if self.breakpoints[-1][2] != 0:
            return INF
        return self.breakpoints[-1][1]

    def to_list(self) -> list[dict]:
        return [
            {"time": format_number(t), "arrived": format_number(a), "slope": format_number(s)}
            for t, a, s in self.breakpoints
        ]


def arrival_pattern(f: FlowOverTime) -> ArrivalPattern:
    """Cumulative amount of flow that has reached the sinks by each time."""
    pieces = []
    for t in f.network.sinks:
        pieces.extend((f.inflow(t) - f.outflow(t)).pieces())
    rate = StepFunction.from_pieces(pieces)
    points = []
    amount = ZERO
    prev_t, prev_r = ZERO, ZERO
    if not rate.breakpoints or rate.breakpoints[0][0] > 0:
        points.append((ZERO, ZERO, ZERO))
    for t, r in rate.breakpoints:
        amount += prev_r * (t - prev_t)
        points.append((t, amount, r))
        prev_t, prev_r = t, r
    return ArrivalPattern(tuple(points))


# ---------------------------------------------------------------------------
# cuts over time

@dataclass(frozen=True)
class CutOverTime:
    """Switch-over time ``alpha[v]`` of every node."""

    alpha: Mapping[str, Fraction]

    def is_valid(self, net: Network, horizon) -> bool:
        return all(self.alpha[s] <= 0 for s in net.sources) and all(
            self.alpha[t] >= horizon for t in net.sinks
        )

    def to_dict(self) -> dict:
        return {v: format_number(a) for v, a in self.alpha.items()}


def cut_capacity(cut: CutOverTime, net: Network, horizon) -> Number:
    """``Σ max(0, α_w - τ_vw - α_v) u_vw`` over the stored arcs."""
    total: Number = ZERO
    for a in net.arcs:
        gap = cut.alpha[a.head] - a.transit - cut.alpha[a.tail]
        if gap > 0:
            if a.capacity is INF:
                return INF
            total += gap * a.capacity
    return total


def extract_cut(x: StaticFlow) -> CutOverTime:
    """Cut over time from a minimum cost circulation.

    ``α_v`` is the shortest residual distance from the super-node to ``v``,
    capped at the horizon; unreachable nodes get the horizon.
    """
    horizon = x.host.horizon
    labels, _ = shortest_walk_from_super(x)
    alpha = {}
    for v in x.host.base.nodes:
        d = labels[v]
        alpha[v] = horizon if d is None or d > horizon else d
    return CutOverTime(alpha)


# ---------------------------------------------------------------------------
# schedule documents

def schedule_to_dict(f: FlowOverTime) -> dict:
    arcs = []
    for a in f.network.arcs:
        fn = f.rates.get(a.key)
        if fn is None:
            continue
        arcs.append(
            {
                "tail": a.tail,
                "head": a.head,
                "segments": [
                    {"from": format_number(s), "to": format_number(e), "rate": format_number(r)}
                    for s, e, r in fn.pieces()
                ],
            }
        )
    return {"horizon": format_number(f.horizon), "arcs": arcs}


def schedule_from_dict(doc, net: Network) -> FlowOverTime:
    """Read a schedule document; overlapping segments add up."""
    try:
        horizon = parse_rational(doc["horizon"], allow_inf=True)
        rates = {}
        for entry in doc["arcs"]:
            key = (str(entry["tail"]), str(entry["head"]))
            if not net.has_arc(*key):
                raise NetworkError(f"schedule uses unknown arc {key[0]}->{key[1]}")
            pieces = [
                (
                    parse_rational(seg["from"]),
                    parse_rational(seg["to"], allow_inf=True),
                    parse_rational(seg["rate"]),
                )
                for seg in entry["segments"]
            ]
            fn = StepFunction.from_pieces(pieces)
            rates[key] = rates.get(key, StepFunction()) + fn
    except (KeyError, TypeError) as exc:
        raise NetworkError(f"malformed schedule: {exc}") from None
    return FlowOverTime(net, rates, horizon)
