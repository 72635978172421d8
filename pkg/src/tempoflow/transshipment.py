"""Transshipments over time.

``o(X)`` is the maximum amount that can be sent from the sources in ``X`` to
the sinks outside ``X`` within the horizon.  A supply vector ``b`` is
feasible exactly when ``b(X) <= o(X)`` for every terminal subset; this is
decided by minimizing the submodular function ``o - b`` with the
minimum-norm-point method, which also yields the convex combination of
lexicographically maximum flows that realizes ``b``.
"""

from __future__ import annotations

import functools
import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .algorithms import lex_max, lex_order
from .flow_over_time import FlowOverTime, induce_infinite, verify
from .network import INF, Network, NetworkError, extend, format_number
from .static_flow import ChainDecomposition, min_cost_circulation

__all__ = [
    "ConvexCombination",
    "Feasible",
    "Infeasible",
    "InfeasibleError",
    "NoFiniteHorizonError",
    "SFMIterationError",
    "SFMResult",
    "TransshipmentResult",
    "feasible",
    "greedy_vertex",
    "o_value",
    "quickest_horizon",
    "sfm_min_norm",
    "supply_vector",
    "transshipment",
]

ZERO = Fraction(0)


# ---------------------------------------------------------------------------
# the o-oracle

@functools.lru_cache(maxsize=65536)
def _o_cached(net: Network, horizon: Fraction, subset: frozenset) -> Fraction:
    host = extend(net, subset, horizon)
    return -min_cost_circulation(host).flow.cost()


def o_value(net: Network, horizon, subset: Iterable[str]) -> Fraction:
    """Maximum flow over time from sources in ``subset`` to sinks outside it."""
    return _o_cached(net, Fraction(horizon), frozenset(subset))


def greedy_vertex(net: Network, horizon, order: Sequence[str]) -> dict[str, Fraction]:
    """Vertex of the base polytope of ``o`` for the order ``r_k, ..., r_1``.

    The entry for ``order[j]`` is ``o(order[:j+1]) - o(order[:j])``.
    """
    order = lex_order(net, order)
    z = {}
    prev = ZERO
    for j, r in enumerate(order):
        cur = o_value(net, horizon, order[: j + 1])
        z[r] = cur - prev
        prev = cur
    return z


def supply_vector(net: Network, b: Mapping[str, object] | None) -> dict[str, Fraction]:
    """Complete and validate a supply vector over all terminals."""
    if b is None:
        b = net.supply_map() or {}
    out = {r: ZERO for r in net.terminals}
    for r, val in b.items():
        if r not in out:
            raise NetworkError(f"supply given for non-terminal {r!r}")
        out[r] = Fraction(val)
    for r, val in out.items():
        if net.is_source(r) and val < 0:
            raise NetworkError(f"source {r} has negative supply {val}")
        if net.is_sink(r) and val > 0:
            raise NetworkError(f"sink {r} has positive supply {val}")
    if sum(out.values()) != 0:
        raise NetworkError("supplies do not sum to zero")
    return out


# ---------------------------------------------------------------------------
# minimum-norm-point submodular minimization

class SFMIterationError(RuntimeError):
    pass


@dataclass
class SFMResult:
    min_value: Fraction
    minimizer: frozenset
    combination: list[tuple[tuple, Fraction]]  # (greedy order, coefficient)
    point: dict
    iterations: int


def _greedy(g, ground, weights):
    order = tuple(sorted(ground, key=lambda e: (weights[e], ground.index(e))))
    vertex = {}
    prev = ZERO
    for j, e in enumerate(order):
        cur = g(frozenset(order[: j + 1]))
        vertex[e] = cur - prev
        prev = cur
    return order, vertex


def _dot(p, q, ground):
    return sum((p[e] * q[e] for e in ground), ZERO)


def _solve(matrix: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Exact Gauss-Jordan elimination; raises on singular systems."""
    n = len(rhs)
    rows = [row[:] + [r] for row, r in zip(matrix, rhs)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if rows[r][col] != 0), None)
        if pivot is None:
            raise ZeroDivisionError("singular affine system")
        rows[col], rows[pivot] = rows[pivot], rows[col]
        p = rows[col][col]
        rows[col] = [v / p for v in rows[col]]
        for r in range(n):
            if r != col and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [a - f * c for a, c in zip(rows[r], rows[col])]
    return [rows[r][n] for r in range(n)]


def _affine_minimizer(points, ground):
    """Coefficients (summing to 1) of the min-norm point of the affine hull."""
    m = len(points)
    matrix = [[_dot(p, q, ground) for q in points] + [Fraction(1)] for p in points]
    matrix.append([Fraction(1)] * m + [ZERO])
    sol = _solve(matrix, [ZERO] * m + [Fraction(1)])
    return sol[:m]


def _combine(points, coeffs, ground):
    return {e: sum((c * p[e] for p, c in zip(points, coeffs)), ZERO) for e in ground}


def sfm_min_norm(
    g: Callable[[frozenset], Fraction],
    ground: Sequence,
    max_iterations: int = 10000,
) -> SFMResult:
    """Minimize a submodular ``g`` with ``g(∅) = 0`` over subsets of ``ground``.

    Runs the minimum-norm-point method in exact arithmetic.  The returned
    combination expresses the minimum-norm point of the base polytope as a
    convex combination of greedy vertices, each identified by its order.
    """
    ground = list(ground)
    if not ground:
        return SFMResult(ZERO, frozenset(), [], {}, 0)
    order, q = _greedy(g, ground, {e: 0 for e in ground})
    orders, points, lam = [order], [q], [Fraction(1)]
    x = dict(q)
    iterations = 0
    while True:
        iterations += 1
        if iterations > max_iterations:
            raise SFMIterationError(f"no convergence after {max_iterations} major cycles")
        order, q = _greedy(g, ground, x)
        if _dot(x, q, ground) >= _dot(x, x, ground):
            break
        orders.append(order)
        points.append(q)
        lam.append(ZERO)
        while True:
            mu = _affine_minimizer(points, ground)
            if all(m >= 0 for m in mu):
                lam = mu
            else:
                theta = min(l / (l - m) for l, m in zip(lam, mu) if m < 0)
                lam = [(1 - theta) * l + theta * m for l, m in zip(lam, mu)]
            keep = [i for i, l in enumerate(lam) if l != 0]
            orders = [orders[i] for i in keep]
            points = [points[i] for i in keep]
            lam = [lam[i] for i in keep]
            x = _combine(points, lam, ground)
            if all(m >= 0 for m in mu):
                break
    minimizer = frozenset(e for e in ground if x[e] < 0)
    return SFMResult(g(minimizer), minimizer, list(zip(orders, lam)), x, iterations)


# ---------------------------------------------------------------------------
# feasibility

@dataclass(frozen=True)
class ConvexCombination:
    terms: tuple[tuple[tuple[str, ...], Fraction], ...]

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def to_list(self) -> list[dict]:
        return [{"order": list(o), "coefficient": format_number(c)} for o, c in self.terms]


@dataclass(frozen=True)
class Feasible:
    combination: ConvexCombination
    feasible = True

    def to_dict(self) -> dict:
        return {"feasible": True, "combination": self.combination.to_list()}


@dataclass(frozen=True)
class Infeasible:
    violating_set: frozenset
    gap: Fraction  # b(X) - o(X) > 0
    feasible = False

    def to_dict(self) -> dict:
        return {
            "feasible": False,
            "violating_set": sorted(self.violating_set),
            "gap": format_number(self.gap),
        }


def feasible(net: Network, horizon, b: Mapping | None = None, max_iterations: int = 10000):
    """Decide whether supplies ``b`` can be met within ``horizon``.

    Returns :class:`Feasible` with a convex combination of terminal orders
    whose lexicographically maximum flows average to ``b``, or
    :class:`Infeasible` with a subset ``X`` where ``b(X) > o(X)``.
    """
    b = supply_vector(net, b)
    horizon = Fraction(horizon)
    if all(v == 0 for v in b.values()):
        return Feasible(ConvexCombination(()))

    def g(X):
        return o_value(net, horizon, X) - sum((b[r] for r in X), ZERO)

    res = sfm_min_norm(g, list(net.terminals), max_iterations)
    if res.min_value < 0:
        return Infeasible(res.minimizer, -res.min_value)
    return Feasible(ConvexCombination(tuple(res.combination)))


# ---------------------------------------------------------------------------
# transshipment over time

class InfeasibleError(ValueError):
    def __init__(self, certificate: Infeasible):
        super().__init__(
            f"infeasible: b(X) exceeds o(X) by {certificate.gap} for X = {sorted(certificate.violating_set)}"
        )
        self.certificate = certificate


@dataclass
class TransshipmentResult:
    flow: FlowOverTime
    combination: ConvexCombination
    decomposition: ChainDecomposition


def transshipment(net: Network, horizon, b: Mapping | None = None) -> TransshipmentResult:
    """Feasible transshipment over time as a convex combination of
    lexicographically maximum flows over time."""
    horizon = Fraction(horizon)
    cert = feasible(net, horizon, b)
    if not cert.feasible:
        raise InfeasibleError(cert)
    gamma = ChainDecomposition((), standard=False)
    for order, coeff in cert.combination:
        gamma = gamma + lex_max(net, horizon, order).decomposition.scaled(coeff)
    flow = induce_infinite(gamma, net, horizon)
    report = verify(flow)
    if not report.ok:
        raise RuntimeError(f"combined flow is infeasible: {report.violations[0]}")
    return TransshipmentResult(flow, cert.combination, gamma)


class NoFiniteHorizonError(ValueError):
    pass


def _static_max_flow(net: Network, b: dict) -> Fraction:
    """Edmonds-Karp from supplies to demands with unbounded arc capacities.

    Given enough time every arc can carry any amount, so this decides whether
    some finite horizon suffices.
    """
    src, snk = object(), object()
    cap: dict = {}
    adj: dict = {}

    def add(u, v, c):
        cap[(u, v)] = cap.get((u, v), ZERO) + c
        cap.setdefault((v, u), ZERO)
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)

    for a in net.arcs:
        add(a.tail, a.head, INF)
    for r, val in b.items():
        if val > 0:
            add(src, r, val)
        elif val < 0:
            add(r, snk, -val)
    total = ZERO
    while True:
        parent = {src: None}
        queue = deque([src])
        while queue and snk not in parent:
            u = queue.popleft()
            for v in adj.get(u, ()):
                if v not in parent and cap[(u, v)] > 0:
                    parent[v] = u
                    queue.append(v)
        if snk not in parent:
            return total
        path = []
        v = snk
        while parent[v] is not None:
            path.append((parent[v], v))
            v = parent[v]
        amount = min(cap[e] for e in path)
        for u, v in path:
            cap[(u, v)] -= amount
            cap[(v, u)] += amount
        total += amount


def quickest_horizon(net: Network, b: Mapping | None = None, precision=Fraction(1, 64)) -> Fraction:
    """Smallest horizon for which ``b`` is feasible, up to ``precision``.

    The answer ``T`` is a multiple of ``precision``; ``T`` is feasible while
    ``T - precision`` is not.
    """
    b = supply_vector(net, b)
    precision = Fraction(precision)
    if precision <= 0:
        raise ValueError("precision must be positive")
    if all(v == 0 for v in b.values()):
        return ZERO
    need = sum((v for v in b.values() if v > 0), ZERO)
    if _static_max_flow(net, b) < need:
        raise NoFiniteHorizonError("supplies cannot reach the demands even without a deadline")
    hi = sum((a.transit for a in net.arcs), ZERO) + 1
    while not feasible(net, hi, b).feasible:
        hi *= 2
    # search the multiples of precision; n * precision is the answer
    lo_n, hi_n = 0, math.ceil(hi / precision)
    while hi_n - lo_n > 1:
        mid = (lo_n + hi_n) // 2
        if feasible(net, mid * precision, b).feasible:
            hi_n = mid
        else:
            lo_n = mid
    return hi_n * precision
