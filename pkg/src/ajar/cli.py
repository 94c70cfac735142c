"""Command-line front end: plan, run, equiv, closure, selftest."""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from .dataio import (
    edge_sizes,
    load_domains_json,
    load_query_data,
    load_relation_csv,
    load_stats_json,
    write_relation_csv,
)
from .errors import AjarError, InternalError, QueryError
from .execution import ExecStats, aggro_ghd_join
from .oracle import RandomInstanceSpec, naive_eval
from .ordering import explain_equivalence
from .planner import plan as build_plan
from .planner import run as run_plan
from .planner import transitive_closure
from .queries import parse_agg_list, parse_query
from .relations import DomainRegistry
from .semirings import builtin_semirings, check_laws, get_semiring


def _read_query(path: str):
    return parse_query(Path(path).read_text())


def _query_semiring(query, override=None):
    return get_semiring(override or query.semiring_name or "int")


def cmd_plan(args) -> int:
    query = _read_query(args.query)
    stats = load_stats_json(args.stats) if args.stats else None
    sizes = edge_sizes(query, stats)
    mode = "data" if args.mode == "data" else "unit"
    if mode == "data" and sizes is None:
        raise QueryError("--mode data needs --stats")
    result = build_plan(query.hypergraph, query.ordering, sizes=sizes, mode=mode)
    payload = result.to_dict()
    text = json.dumps(payload, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(f"width: {payload['width']}")
    print(f"parts: {len(result.part_hypergraphs)}")
    if not args.out:
        print(text)
    return 0


def cmd_run(args) -> int:
    query = _read_query(args.query)
    semiring = _query_semiring(query)
    for attr, op in query.ordering.items:
        if not semiring.knows_op(op):
            raise QueryError(f"operator {op!r} unknown to semiring {semiring.name!r}")
    relations = load_query_data(query, args.data, semiring)
    domains = load_domains_json(args.domains, relations)
    stats = ExecStats() if args.explain else None
    query_plan = build_plan(query.hypergraph, query.ordering)
    result = run_plan(query_plan, relations, domains, semiring, stats)
    result = result.reorder(query.head_attrs)
    if args.out:
        write_relation_csv(result, semiring, args.out)
    else:
        print(",".join(list(result.schema) + ["__annotation"]))
        rows = [
            [str(v) for v in row] + [semiring.format_annotation(lam)]
            for row, lam in result.tuples.items()
        ]
        for row in sorted(rows):
            print(",".join(row))
    if args.explain:
        print(json.dumps({"plan": query_plan.to_dict(), "stats": stats.to_dict()}, indent=2))
    return 0


def cmd_equiv(args) -> int:
    query = _read_query(args.query)
    beta = parse_agg_list(args.ordering, query.ordering)
    violation = explain_equivalence(
        query.hypergraph,
        query.ordering,
        beta,
        products=query.ordering.has_products(),
    )
    if violation is None:
        print("equivalent: true")
    else:
        print("equivalent: false")
        print(f"violated: {violation}")
    return 0


def cmd_closure(args) -> int:
    semiring = get_semiring(args.semiring)
    rel = load_relation_csv(args.relation, semiring)
    closed = transitive_closure(rel, semiring)
    if args.out:
        write_relation_csv(closed, semiring, args.out)
    else:
        print(",".join(list(closed.schema) + ["__annotation"]))
        rows = [
            [str(v) for v in row] + [semiring.format_annotation(lam)]
            for row, lam in closed.tuples.items()
        ]
        for row in sorted(rows):
            print(",".join(row))
    return 0


def cmd_selftest(args) -> int:
    rng = random.Random(args.seed)
    failures = 0
    for spec in builtin_semirings():
        try:
            check_laws(spec, rng, triples=args.trials)
            print(f"laws[{spec.name}]: ok")
        except AssertionError as exc:
            failures += 1
            print(f"laws[{spec.name}]: FAIL {exc}")
    from .hypergraph import Hypergraph
    from .ordering import AggregationOrdering

    h = Hypergraph.build([("R", ("A", "B")), ("S", ("B", "C"))])
    alpha = AggregationOrdering.of(("B", "sum"), ("C", "sum"))
    for trial in range(args.trials // 100 + 5):
        inst = RandomInstanceSpec(semiring_name="int", seed=args.seed + trial).instance(h)
        domains = DomainRegistry.from_declarations({}, inst)
        semiring = get_semiring("int")
        query_plan = build_plan(h, alpha)
        got = run_plan(query_plan, inst, domains, semiring)
        want = naive_eval(h, alpha, inst, domains, semiring)
        if got != want:
            failures += 1
            print(f"oracle[{trial}]: FAIL")
            break
    else:
        print("oracle sweep: ok")
    if failures:
        raise InternalError(f"{failures} selftest failures")
    print("selftest: all ok")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="ajar", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="plan a query and report its width")
    p.add_argument("query")
    p.add_argument("--stats", default=None)
    p.add_argument("--mode", choices=("unit", "data"), default="unit")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("run", help="execute a query over CSV relations")
    p.add_argument("query")
    p.add_argument("--data", required=True)
    p.add_argument("--domains", default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--explain", action="store_true")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("equiv", help="test an alternative aggregation ordering")
    p.add_argument("query")
    p.add_argument("--ordering", required=True)
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("closure", help="transitive closure of a binary relation")
    p.add_argument("relation")
    p.add_argument("--semiring", default="minplus")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_closure)

    p = sub.add_parser("selftest", help="law suite and oracle sweep")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=1000)
    p.set_defaults(func=cmd_selftest)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InternalError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 2
    except AjarError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
