#!/usr/bin/env python3
# Product aggregation: aggregate with the semiring's own multiplication.
# Over ({0,1}, max, *) that is a universal quantifier, so quantified
# conjunctive queries become ordinary aggregate-join queries.

from ajar import (
    AnnotatedRelation,
    AggregationOrdering,
    DomainRegistry,
    Hypergraph,
    PRODUCT,
    get_semiring,
    plan,
    product_aggregate,
    run,
)
from ajar.oracle import naive_eval

sr = get_semiring("bool01")
H = Hypergraph.build([("R", ("A", "B")), ("S", ("B", "C"))])

# R(A,B) and S(B,C) hold assignments; "for all B" keeps an (A,C) pair only
# if it joins with every value in B's domain
R = AnnotatedRelation(("A", "B"), {(0, 0): 1, (0, 1): 1})
S = AnnotatedRelation(("B", "C"), {(0, 1): 1, (1, 1): 1})
domains = DomainRegistry.from_declarations({"B": [0, 1]}, {"R": R, "S": S})
alpha = AggregationOrdering.of(("B", PRODUCT))

print("forall_B (R |x| S):", naive_eval(H, alpha, {"R": R, "S": S}, domains, sr).tuples)

# idempotence lets the product slide below the join, one copy per relation:
lhs = product_aggregate(R, "B", domains, sr)
rhs = product_aggregate(S, "B", domains, sr)
print("pushed down:", lhs.tuples, rhs.tuples)

# the planner does that automatically (a trailing product pre-aggregates),
# and renames surviving product attributes into per-region copies
p = plan(H, alpha)
print("pre-pass steps:", p.prepass)
print("plan result:", run(p, {"R": R, "S": S}, domains, sr).tuples)

# a product below other aggregations keeps its copies inside the plan tree
alpha2 = AggregationOrdering.of(("B", PRODUCT), ("A", "max"), ("C", "max"))
p2 = plan(H, alpha2)
payload = p2.to_dict()
print("\nnon-trailing product plan:")
print("  partition:", payload.get("product_partition"))
print("  ordering:", payload["ordering"])
print("  result:", run(p2, {"R": R, "S": S}, domains, sr).tuples)
print("  naive: ", naive_eval(H, alpha2, {"R": R, "S": S}, domains, sr).tuples)
