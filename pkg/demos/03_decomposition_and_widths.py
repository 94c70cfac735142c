#!/usr/bin/env python3
# Planning: split the query into characteristic hypergraphs, find an optimal
# unconstrained GHD for each, and stitch them back together. The stitched
# width equals the max over parts, exactly.

from ajar import (
    AggregationOrdering,
    Ghd,
    Hypergraph,
    characteristic_hypergraphs,
    optimal_ghd,
    plan,
    width,
)

H = Hypergraph.build([("R", ("A", "B")), ("S", ("B", "C"))])
alpha = AggregationOrdering.of(("B", "sum"), ("C", "sum"))  # output: A

parts = characteristic_hypergraphs(H, alpha)
print("characteristic hypergraphs:")
for part in parts:
    print("  ", sorted(part.vertices), [sorted(e.attrs) for e in part.edges])

p = plan(H, alpha)
print("\nstitched plan, width", p.width)
for node in p.to_dict()["nodes"]:
    print("  bag", node["bag"], "parent", node["parent"])

# contrast: folding the output attribute A into a single bag costs width 2
contrast = width(Ghd.single(("A", "B", "C")), H).width
print("single-bag contrast width:", contrast)

# widths are exact rationals: the triangle's one-bag cover is 3/2
tri = Hypergraph.build([("R", ("A", "B")), ("S", ("B", "C")), ("T", ("C", "A"))])
g = optimal_ghd(tri)
print("\ntriangle optimal bags:", [sorted(b) for b in g.chi.values()])
print("triangle width:", width(g, tri).width)

# a 6-cycle needs width 2; the planner finds the chain of 3-attribute bags
cyc = Hypergraph.build([(f"E{i}", (f"A{i}", f"A{i % 6 + 1}")) for i in range(1, 7)])
print("\n6-cycle plan width:", plan(cyc, AggregationOrdering.of()).width)

# star query: removing the center splits into n singleton parts, so the
# n+1 characteristic hypergraphs are all tiny
star = Hypergraph.build([(f"E{i}", ("A", f"B{i}")) for i in range(1, 5)])
star_alpha = AggregationOrdering.of(*[(f"B{i}", "sum") for i in range(1, 5)])
print("star parts:", len(characteristic_hypergraphs(star, star_alpha)))
