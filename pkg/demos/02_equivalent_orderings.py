#!/usr/bin/env python3
# When do two aggregation orders give the same answer on every database?
# Only when operators match, or the query body keeps the attributes apart.

from ajar import (
    AggregationOrdering,
    Hypergraph,
    compute_prec,
    get_semiring,
    linear_extensions,
)
from ajar.ordering import explain_equivalence, test_equivalence
from ajar.oracle import completeness_counterexample, naive_eval

H = Hypergraph.build([("R", ("A", "B")), ("S", ("B", "C"))])

# sum_A and max_C commute here: removing nothing, A and C only meet via B,
# and once B is still pending they live in different components
alpha = AggregationOrdering.of(("A", "sum"), ("C", "max"))
beta = AggregationOrdering.of(("C", "max"), ("A", "sum"))
print("sum_A max_C == max_C sum_A ?", test_equivalence(H, alpha, beta))

# sum_A cannot slide past max_B: they share the edge R(A,B)
alpha = AggregationOrdering.of(("A", "sum"), ("B", "max"), ("C", "max"))
beta = AggregationOrdering.of(("B", "max"), ("A", "sum"), ("C", "max"))
print("swap A,B ?", test_equivalence(H, alpha, beta))
print("  reason:", explain_equivalence(H, alpha, beta))

# the rejection is semantic, not just syntactic: a two-tuple instance
# built along the blocking path makes the two orders disagree
sr = get_semiring("qplus")
instance, domains = completeness_counterexample(H, alpha, beta, sr)
print("  alpha on witness:", naive_eval(H, alpha, instance, domains, sr).tuples)
print("  beta  on witness:", naive_eval(H, beta, instance, domains, sr).tuples)

# the full equivalence class is the set of linear extensions of a
# precedence relation computed by a small fixed point
prec = compute_prec(H, alpha)
print("\nPREC pairs:", sorted(prec.prec))
print("equivalent orderings:")
for b in linear_extensions(prec, alpha):
    print("  ", " ".join(f"{op}[{a}]" for a, op in b.items))
