"""Command-line interface.

Every subcommand reads a network document and writes one JSON document to
stdout (or ``--output``).  Exit codes: 0 success, 1 verification found
violations, 2 bad input, 3 infeasible supplies, 4 iteration cap reached.
"""

from __future__ import annotations

import argparse
import json
import sys
from itertools import combinations

from .algorithms import earliest_arrival, lex_max, max_flow_over_time
from .flow_over_time import cut_capacity, schedule_from_dict, schedule_to_dict, verify
from .network import INF, NetworkError, format_number, load_network, parse_rational
from .oracle import oracle_o_value
from .static_flow import IterationLimitError
from .transshipment import (
    NoFiniteHorizonError,
    feasible,
    quickest_horizon,
    supply_vector,
    transshipment,
)

EXIT_OK, EXIT_VIOLATIONS, EXIT_INPUT, EXIT_INFEASIBLE, EXIT_LIMIT = 0, 1, 2, 3, 4


class InputError(Exception):
    pass


def _chain_doc(chain) -> dict:
    return {
        "value": format_number(chain.value),
        "nodes": list(chain.nodes),
        "startTime": format_number(chain.start_time),
    }


def _horizon(args, allow_inf=False):
    try:
        value = parse_rational(args.horizon, allow_inf=allow_inf)
    except NetworkError as exc:
        raise InputError(f"--horizon: {exc}") from None
    if value is not INF and value < 0:
        raise InputError("--horizon must be non-negative")
    return value


def _supplies(args, net):
    if args.supplies is None:
        if net.supplies is None:
            raise InputError("no supplies: give --supplies or a 'supplies' field in the network")
        return supply_vector(net, None)
    b = {}
    for item in args.supplies.split(","):
        if not item.strip():
            continue
        name, sep, value = item.partition("=")
        if not sep:
            raise InputError(f"--supplies entry {item!r} is not of the form node=value")
        b[name.strip()] = parse_rational(value)
    return supply_vector(net, b)


def _order(args, net):
    if not args.order:
        return list(net.terminals)
    return [r.strip() for r in args.order.split(",")]


def cmd_maxflow(args, net):
    T = _horizon(args)
    res = max_flow_over_time(net, T)
    print(f"maximum flow over time: {res.value}", file=sys.stderr)
    return EXIT_OK, {
        "value": format_number(res.value),
        "certificate": {
            "alpha": res.certificate.to_dict(),
            "capacity": format_number(cut_capacity(res.certificate, net, T)),
        },
        "schedule": schedule_to_dict(res.flow),
    }


def cmd_earliest(args, net):
    T = _horizon(args, allow_inf=True)
    res = earliest_arrival(net, T, max_iterations=args.max_iterations)
    return EXIT_OK, {
        "arrival_pattern": res.pattern.to_list(),
        "chains": [_chain_doc(c) for c in res.chains],
        "schedule": schedule_to_dict(res.flow),
    }


def cmd_lexmax(args, net):
    T = _horizon(args)
    res = lex_max(net, T, _order(args, net), max_iterations=args.max_iterations)
    return EXIT_OK, {
        "order": list(res.order),
        "nets": {r: format_number(v) for r, v in res.nets.items()},
        "prefix_values": [
            {"subset": [r for r in res.order if r in X], "o": format_number(v)}
            for X, v in res.prefix_values()
        ],
        "chains": [_chain_doc(c) for c in res.decomposition],
        "schedule": schedule_to_dict(res.flow),
    }


def cmd_feasible(args, net):
    cert = feasible(net, _horizon(args), _supplies(args, net))
    return (EXIT_OK if cert.feasible else EXIT_INFEASIBLE), cert.to_dict()


def cmd_transship(args, net):
    T = _horizon(args)
    b = _supplies(args, net)
    cert = feasible(net, T, b)
    if not cert.feasible:
        print("supplies are infeasible", file=sys.stderr)
        return EXIT_INFEASIBLE, cert.to_dict()
    res = transshipment(net, T, b)
    return EXIT_OK, {
        "combination": res.combination.to_list(),
        "schedule": schedule_to_dict(res.flow),
    }


def cmd_quickest(args, net):
    b = _supplies(args, net)
    try:
        precision = parse_rational(args.precision)
    except NetworkError as exc:
        raise InputError(f"--precision: {exc}") from None
    if precision <= 0:
        raise InputError("--precision must be positive")
    try:
        T = quickest_horizon(net, b, precision)
    except NoFiniteHorizonError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INFEASIBLE, {"feasible": False}
    res = transshipment(net, T, b)
    return EXIT_OK, {
        "horizon": format_number(T),
        "combination": res.combination.to_list(),
        "schedule": schedule_to_dict(res.flow),
    }


def cmd_verify(args, net):
    try:
        with open(args.schedule, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read schedule: {exc}") from None
    report = verify(schedule_from_dict(doc, net))
    for v in report.violations:
        print(f"{v.kind} violation at {v.where} on [{v.start}, {v.end}): {v.value}", file=sys.stderr)
    return (EXIT_OK if report.ok else EXIT_VIOLATIONS), report.to_dict()


def cmd_oracle(args, net):
    T = _horizon(args)
    table = []
    terms = list(net.terminals)
    for size in range(len(terms) + 1):
        for combo in combinations(terms, size):
            table.append({"subset": list(combo), "o": format_number(oracle_o_value(net, T, combo))})
    return EXIT_OK, {"horizon": format_number(T), "o_values": table}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tempoflow", description="Flows over time with exact rational arithmetic."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help, horizon=True):
        p = sub.add_parser(name, help=help)
        p.add_argument("network", help="network JSON file")
        if horizon:
            p.add_argument("--horizon", required=True, help="time horizon, e.g. 4 or 7/2")
        p.add_argument("--output", help="write the JSON result here instead of stdout")
        p.set_defaults(func=func)
        return p

    add("maxflow", cmd_maxflow, "maximum flow over time with a cut certificate")
    p = add("earliest", cmd_earliest, "earliest arrival flow ('inf' horizon allowed)")
    p.add_argument("--max-iterations", type=int, help="cap on canceled cycles")
    p = add("lexmax", cmd_lexmax, "lexicographically maximum flow over time")
    p.add_argument("--order", help="comma-separated terminals, highest priority first")
    p.add_argument("--max-iterations", type=int, help="cap on augmentations per step")
    for name, func, text in (
        ("feasible", cmd_feasible, "feasibility certificate for supplies"),
        ("transship", cmd_transship, "feasible transshipment over time"),
    ):
        p = add(name, func, text)
        p.add_argument("--supplies", help="comma-separated node=value pairs (default: from file)")
    p = add("quickest", cmd_quickest, "smallest feasible horizon, up to --precision", horizon=False)
    p.add_argument("--supplies", help="comma-separated node=value pairs (default: from file)")
    p.add_argument("--precision", default="1/64", help="bisection precision (default 1/64)")
    p = add("verify", cmd_verify, "check a schedule for feasibility", horizon=False)
    p.add_argument("schedule", help="schedule JSON file")
    add("oracle", cmd_oracle, "o-values of all terminal subsets via time expansion")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        net = load_network(args.network)
        status, doc = args.func(args, net)
    except (InputError, NetworkError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except IterationLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    text = json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
