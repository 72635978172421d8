"""Flow networks with transit times.

A :class:`Network` stores each arc once, in the direction it was given.  The
opposite arc of a stored arc ``vw`` is implicit: it has capacity 0 and transit
time ``-tau_vw``.  All numbers are :class:`fractions.Fraction`; infinite
capacities are represented by the :data:`INF` singleton.

The JSON file format is::

    {
      "nodes": ["s", "v", "t"],
      "arcs": [{"tail": "s", "head": "v", "capacity": "2", "transit": "1/2"},
               {"tail": "v", "head": "t", "capacity": "inf", "transit": 3}],
      "sources": ["s"],
      "sinks": ["t"],
      "supplies": {"s": "4", "t": "-4"}
    }
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

__all__ = [
    "INF",
    "SUPER",
    "Arc",
    "ExtendedNetwork",
    "Network",
    "NetworkError",
    "ParseError",
    "extend",
    "format_number",
    "load_network",
    "make_network",
    "network_to_dict",
    "parse_network",
    "parse_rational",
]

#: Id of the super-node added by :func:`extend`; reserved, never a user node.
SUPER = "ψ"


class _Infinity:
    """Infinite capacity.  Compares greater than every finite number."""

    _instance: _Infinity | None = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())

    def __hash__(self):
        return hash("tempoflow.INF")

    def __eq__(self, other):
        return other is self

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __sub__(self, other):
        if other is self:
            raise ArithmeticError("inf - inf is undefined")
        return self

    def __rsub__(self, other):
        raise ArithmeticError("finite - inf is not a capacity")

    def __mul__(self, other):
        if other > 0:
            return self
        if other == 0:
            return Fraction(0)
        raise ArithmeticError("negative multiple of inf")

    __rmul__ = __mul__


INF = _Infinity()

Number = Union[Fraction, _Infinity]

_RATIONAL_RE = re.compile(r"^\s*(-?\d+)(?:\s*/\s*(\d+))?\s*$")


class NetworkError(ValueError):
    """Invalid network data."""


class ParseError(NetworkError):
    """Malformed network document."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)
        self.line = line
        self.column = column


def parse_rational(value, *, allow_inf: bool = False) -> Number:
    """Parse ``"p/q"``, ``"p"`` or an integer literal into a Fraction.

    ``"inf"`` is accepted only with ``allow_inf``.  Floats are rejected: they
    would smuggle rounding into an exact pipeline.
    """
    if isinstance(value, bool):
        raise ParseError(f"expected a rational, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        if allow_inf and value.strip().lower() in ("inf", "infinity"):
            return INF
        m = _RATIONAL_RE.match(value)
        if m:
            den = int(m.group(2)) if m.group(2) else 1
            if den == 0:
                raise ParseError(f"zero denominator in {value!r}")
            return Fraction(int(m.group(1)), den)
    raise ParseError(f"expected a rational 'p/q' or integer, got {value!r}")


def format_number(value: Number) -> str:
    """Canonical text form: ``"inf"``, ``"3"`` or ``"-3/2"``."""
    if value is INF:
        return "inf"
    return str(Fraction(value))


@dataclass(frozen=True)
class Arc:
    tail: str
    head: str
    capacity: Number
    transit: Fraction

    @property
    def key(self) -> tuple[str, str]:
        return (self.tail, self.head)


@dataclass(frozen=True)
class Network:
    """Directed network with capacities, transit times and terminals.

    Validation happens on construction; an invalid combination raises
    :class:`NetworkError`.  ``supplies`` is an optional tuple of
    ``(terminal, value)`` pairs carried along from the input file.
    """

    nodes: tuple[str, ...]
    arcs: tuple[Arc, ...]
    sources: tuple[str, ...]
    sinks: tuple[str, ...]
    supplies: tuple[tuple[str, Fraction], ...] | None = None

    def __post_init__(self):
        nodes = tuple(self.nodes)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "arcs", tuple(self.arcs))
        object.__setattr__(self, "sources", tuple(self.sources))
        object.__setattr__(self, "sinks", tuple(self.sinks))
        if self.supplies is not None:
            object.__setattr__(self, "supplies", tuple((r, Fraction(b)) for r, b in self.supplies))

        if len(set(nodes)) != len(nodes):
            raise NetworkError("duplicate node id")
        if SUPER in nodes:
            raise NetworkError(f"node id {SUPER!r} is reserved for the super-node")
        known = set(nodes)
        seen: set[tuple[str, str]] = set()
        for i, arc in enumerate(self.arcs):
            where = f"arc {i} ({arc.tail}->{arc.head})"
            if arc.tail not in known or arc.head not in known:
                raise NetworkError(f"{where}: unknown endpoint")
            if arc.tail == arc.head:
                raise NetworkError(f"{where}: self-loop")
            if arc.key in seen:
                raise NetworkError(f"{where}: duplicate arc")
            if (arc.head, arc.tail) in seen:
                raise NetworkError(f"{where}: opposite arc already stored")
            seen.add(arc.key)
            if not isinstance(arc.transit, Fraction):
                raise NetworkError(f"{where}: transit time must be a Fraction")
            if arc.transit < 0:
                raise NetworkError(f"{where}: negative transit time")
            if arc.capacity is not INF and (not isinstance(arc.capacity, Fraction) or arc.capacity <= 0):
                raise NetworkError(f"{where}: capacity must be positive")

        src, snk = set(self.sources), set(self.sinks)
        if len(src) != len(self.sources) or len(snk) != len(self.sinks):
            raise NetworkError("duplicate terminal")
        if src & snk:
            raise NetworkError(f"nodes {sorted(src & snk)} are both source and sink")
        if not (src | snk) <= known:
            raise NetworkError(f"unknown terminals {sorted((src | snk) - known)}")
        for arc in self.arcs:
            if arc.head in src:
                raise NetworkError(f"terminal violation: source {arc.head} has incoming arc {arc.tail}->{arc.head}")
            if arc.tail in snk:
                raise NetworkError(f"terminal violation: sink {arc.tail} has outgoing arc {arc.tail}->{arc.head}")
        if self.supplies is not None:
            for r, _ in self.supplies:
                if r not in src and r not in snk:
                    raise NetworkError(f"supply given for non-terminal {r!r}")
        object.__setattr__(self, "_index", {a.key: a for a in self.arcs})

    @property
    def terminals(self) -> tuple[str, ...]:
        """Terminals in node order."""
        term = set(self.sources) | set(self.sinks)
        return tuple(v for v in self.nodes if v in term)

    @property
    def k(self) -> int:
        return len(self.sources) + len(self.sinks)

    def is_source(self, v: str) -> bool:
        return v in self.sources

    def is_sink(self, v: str) -> bool:
        return v in self.sinks

    def arc(self, tail: str, head: str) -> Arc:
        return self._index[(tail, head)]

    def has_arc(self, tail: str, head: str) -> bool:
        return (tail, head) in self._index

    def capacity(self, tail: str, head: str) -> Number:
        """Capacity of either orientation; opposite arcs have capacity 0."""
        try:
            return self.arc(tail, head).capacity
        except KeyError:
            self.arc(head, tail)
            return Fraction(0)

    def transit(self, tail: str, head: str) -> Fraction:
        """Transit time of either orientation; opposite arcs are negated."""
        try:
            return self.arc(tail, head).transit
        except KeyError:
            return -self.arc(head, tail).transit

    def supply_map(self) -> dict[str, Fraction] | None:
        if self.supplies is None:
            return None
        return dict(self.supplies)


@dataclass(frozen=True)
class ExtendedNetwork:
    """``base`` plus the super-node wired for terminal subset ``subset``.

    Arcs ``SUPER -> s`` (infinite capacity, transit 0) for sources in the
    subset and ``t -> SUPER`` (infinite capacity, transit ``-horizon``) for
    sinks outside it.
    """

    base: Network
    subset: frozenset
    horizon: Fraction

    @property
    def super_arcs(self) -> tuple[Arc, ...]:
        out = []
        for v in self.base.nodes:
            if v in self.base.sources and v in self.subset:
                out.append(Arc(SUPER, v, INF, Fraction(0)))
            elif v in self.base.sinks and v not in self.subset:
                out.append(Arc(v, SUPER, INF, -self.horizon))
        return tuple(out)

    @property
    def arcs(self) -> tuple[Arc, ...]:
        return self.base.arcs + self.super_arcs

    @property
    def nodes(self) -> tuple[str, ...]:
        return self.base.nodes + (SUPER,)

    def strip(self) -> Network:
        """The base network with the super-node and its arcs removed."""
        return self.base


def extend(net: Network, subset: Iterable[str], horizon) -> ExtendedNetwork:
    """Build the extended network for a terminal subset and time horizon."""
    subset = frozenset(subset)
    bad = subset - set(net.terminals)
    if bad:
        raise NetworkError(f"subset contains non-terminals {sorted(bad)}")
    horizon = Fraction(horizon)
    if horizon < 0:
        raise NetworkError("time horizon must be non-negative")
    return ExtendedNetwork(net, subset, horizon)


def _network_from_dict(doc) -> Network:
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    for field in ("nodes", "arcs", "sources", "sinks"):
        if field not in doc:
            raise ParseError(f"missing field {field!r}")
        if not isinstance(doc[field], list):
            raise ParseError(f"field {field!r} must be a list")
    nodes = [str(v) for v in doc["nodes"]]
    arcs = []
    for i, a in enumerate(doc["arcs"]):
        if not isinstance(a, dict) or not {"tail", "head", "capacity", "transit"} <= a.keys():
            raise ParseError(f"arc {i}: needs tail, head, capacity, transit")
        try:
            cap = parse_rational(a["capacity"], allow_inf=True)
            tau = parse_rational(a["transit"])
        except ParseError as exc:
            raise ParseError(f"arc {i}: {exc}") from None
        arcs.append(Arc(str(a["tail"]), str(a["head"]), cap, tau))
    supplies = None
    if doc.get("supplies") is not None:
        if not isinstance(doc["supplies"], dict):
            raise ParseError("field 'supplies' must be an object")
        supplies = tuple((str(r), parse_rational(b)) for r, b in doc["supplies"].items())
    return Network(
        tuple(nodes),
        tuple(arcs),
        tuple(str(v) for v in doc["sources"]),
        tuple(str(v) for v in doc["sinks"]),
        supplies,
    )


def parse_network(text: str) -> Network:
    """Parse a JSON network document and validate it."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    return _network_from_dict(doc)


def load_network(path) -> Network:
    with open(path, encoding="utf-8") as fh:
        return parse_network(fh.read())


def network_to_dict(net: Network) -> dict:
    doc = {
        "nodes": list(net.nodes),
        "arcs": [
            {
                "tail": a.tail,
                "head": a.head,
                "capacity": format_number(a.capacity),
                "transit": format_number(a.transit),
            }
            for a in net.arcs
        ],
        "sources": list(net.sources),
        "sinks": list(net.sinks),
    }
    if net.supplies is not None:
        doc["supplies"] = {r: format_number(b) for r, b in net.supplies}
    return doc


def make_network(
    nodes: Iterable[str],
    arcs: Iterable[tuple],
    sources: Iterable[str],
    sinks: Iterable[str],
    supplies: Mapping[str, object] | None = None,
) -> Network:
    """Convenience constructor: arcs as ``(tail, head, capacity, transit)``.

    Numbers may be ints, Fractions, ``"p/q"`` strings or ``"inf"``.
    """
    built = [
        Arc(t, h, parse_rational(u, allow_inf=True), parse_rational(tau))
        for t, h, u, tau in arcs
    ]
    sup = None
    if supplies is not None:
        sup = tuple((r, parse_rational(b)) for r, b in supplies.items())
    return Network(tuple(nodes), tuple(built), tuple(sources), tuple(sinks), sup)
