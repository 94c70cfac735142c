#!/usr/bin/env python3
# Annotated relations: every tuple carries a semiring value. Joining
# multiplies annotations, aggregating folds them with a named operator.

from ajar import AnnotatedRelation, aggregate, get_semiring, join, semijoin

sr = get_semiring("int")  # (Z, +, *)

R = AnnotatedRelation(("A", "B"), {(1, 3): 3, (1, 2): 1, (1, 1): 2})
S = AnnotatedRelation(("B", "C"), {(1, 1): 4, (3, 3): 6})

print("R:", R)
print("S:", S)

# natural join multiplies the matched annotations
RS = join([R, S], sr)
print("\nR |x| S:", RS)  # (1,3,3)->18 and (1,1,1)->8

# aggregating C away, then B, folds annotations with +
total = aggregate(aggregate(RS, "C", "sum", sr), "B", "sum", sr)
print("sum_B sum_C:", total)  # A=1 -> 26

# semijoin keeps the left tuples that have a join partner
print("\nR |> S:", semijoin(R, S))  # B=2 dangles and is dropped

# a zero annotation means the tuple is absent: canonical form drops it
T = AnnotatedRelation(("A",), {(1,): 0, (2,): 5}, zero=0)
print("\ncanonical form of {(1,)->0, (2,)->5}:", T)

# the same operators work over other semirings, e.g. min-plus weights
mp = get_semiring("minplus")
W = AnnotatedRelation(("A", "B"), {(1, 2): 4, (1, 3): 1})
print("\nmin-plus fold:", aggregate(W, "B", "min", mp))  # shortest option: 1
