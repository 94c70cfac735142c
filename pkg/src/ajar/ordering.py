"""Aggregation orderings, equivalence testing, and the precedence fixed point.

Two orderings are equivalent when they produce the same output on every
instance.  The recursive test splits on connected components after dropping
output attributes and otherwise checks whether the head of one ordering can
commute to the front of the other; the fixed-point computation turns the same
structure into an explicit strict partial order whose linear extensions are
exactly the equivalent orderings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

from .errors import ExtensionOverflow, InternalError, QueryError
from .hypergraph import Hypergraph, connected_components, path_exists
from .semirings import PRODUCT


@dataclass(frozen=True)
class AggregationOrdering:
    """Sequence of (attribute, operator-name) pairs, outermost first.

    Attributes not listed are output attributes.  The operator name is either
    an additive operator of the semiring in play or the product marker.
    """

    items: tuple[tuple[str, str], ...]

    @classmethod
    def of(cls, *items: tuple[str, str]) -> "AggregationOrdering":
        return cls(tuple(items))

    def __post_init__(self):
        attrs = [a for a, _ in self.items]
        if len(set(attrs)) != len(attrs):
            raise QueryError(f"attribute repeated in ordering {self.items}")

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __getitem__(self, i):
        return self.items[i]

    def attrs(self) -> frozenset[str]:
        return frozenset(a for a, _ in self.items)

    def attr_list(self) -> tuple[str, ...]:
        return tuple(a for a, _ in self.items)

    def operator(self, attr: str) -> str:
        for a, op in self.items:
            if a == attr:
                return op
        raise QueryError(f"attribute {attr!r} not in ordering")

    def operators(self) -> dict[str, str]:
        return dict(self.items)

    def product_attrs(self) -> frozenset[str]:
        return frozenset(a for a, op in self.items if op == PRODUCT)

    def has_products(self) -> bool:
        return any(op == PRODUCT for _, op in self.items)

    def restrict(self, attrs: Iterable[str]) -> "AggregationOrdering":
        """Subsequence over the given attributes, order and operators kept."""
        attrs = set(attrs)
        return AggregationOrdering(tuple(it for it in self.items if it[0] in attrs))

    def without(self, attrs: Iterable[str]) -> "AggregationOrdering":
        attrs = set(attrs)
        return AggregationOrdering(tuple(it for it in self.items if it[0] not in attrs))

    def position(self, attr: str) -> int:
        for i, (a, _) in enumerate(self.items):
            if a == attr:
                return i
        raise QueryError(f"attribute {attr!r} not in ordering")


def restrict_ordering(alpha: AggregationOrdering, attrs: Iterable[str]) -> AggregationOrdering:
    return alpha.restrict(attrs)


@dataclass(frozen=True)
class Violation:
    """First constraint that rejected an equivalence candidate."""

    earlier: str  # attribute that must stay earlier in the candidate
    later: str  # head attribute that tried to commute past it
    rule: str
    path: tuple[str, ...] = ()

    def __str__(self):
        return (
            f"{self.rule}: {self.earlier!r} cannot commute past {self.later!r}"
            + (f" (path {' - '.join(self.path)})" if self.path else "")
        )


def _precheck(
    alpha: AggregationOrdering, beta: AggregationOrdering, allow_products: bool
) -> Optional[Violation]:
    if alpha.attrs() != beta.attrs():
        return Violation("", "", "attribute-sets-differ")
    if alpha.operators() != beta.operators():
        return Violation("", "", "operators-differ")
    if not allow_products and alpha.has_products():
        return Violation("", "", "product-operator-present")
    return None


def _find_path(h: Hypergraph, a: str, b: str, allowed: set[str]) -> Optional[tuple[str, ...]]:
    """A concrete path from a to b within allowed, or None."""
    if a not in allowed or b not in allowed:
        return None
    adj: dict[str, set[str]] = {v: set() for v in allowed}
    for e in h.edges:
        surviving = e.attrs & allowed
        for v in surviving:
            adj[v] |= surviving - {v}
    prev: dict[str, str] = {}
    stack, seen = [a], {a}
    while stack:
        v = stack.pop()
        if v == b:
            path = [b]
            while path[-1] != a:
                path.append(prev[path[-1]])
            return tuple(reversed(path))
        for w in adj[v] - seen:
            seen.add(w)
            prev[w] = v
            stack.append(w)
    return None


def _test_recursive(
    h: Hypergraph,
    alpha: AggregationOrdering,
    beta: AggregationOrdering,
    products: bool,
) -> Optional[Violation]:
    if len(alpha) == 0:
        return None
    removed = set(h.vertices - alpha.attrs())
    prod_attrs = alpha.product_attrs() if products else frozenset()
    comps = connected_components(h, removed | prod_attrs)
    if len(comps) > 1:
        for comp in comps:
            scope = set(comp)
            if products:
                for e in h.edges:
                    if e.attrs & comp:
                        scope |= e.attrs & prod_attrs
            bad = _test_recursive(h, alpha.restrict(scope), beta.restrict(scope), products)
            if bad is not None:
                return bad
        return None
    head_attr, head_op = alpha[0]
    j = beta.position(head_attr)
    for i in range(j):
        b_i, op_i = beta[i]
        if op_i == head_op:
            continue
        # path allowed within beta's suffix starting at position i
        allowed = {a for a, _ in beta.items[i:]}
        if products:
            allowed = (allowed - prod_attrs) | {b_i, head_attr}
        path = _find_path(h, b_i, head_attr, allowed)
        if path is not None:
            return Violation(b_i, head_attr, "blocked-path", path)
    return _test_recursive(h, alpha.without([head_attr]), beta.without([head_attr]), products)


def explain_equivalence(
    h: Hypergraph,
    alpha: AggregationOrdering,
    beta: AggregationOrdering,
    products: bool = False,
) -> Optional[Violation]:
    """None if equivalent, else the first violated constraint."""
    bad = _precheck(alpha, beta, allow_products=products)
    if bad is not None:
        return bad
    return _test_recursive(h, alpha, beta, products)


def test_equivalence(
    h: Hypergraph, alpha: AggregationOrdering, beta: AggregationOrdering
) -> bool:
    """Sound and complete equivalence test for product-free orderings."""
    return explain_equivalence(h, alpha, beta, products=False) is None


def test_equivalence_product(
    h: Hypergraph, alpha: AggregationOrdering, beta: AggregationOrdering
) -> bool:
    """Equivalence test allowing product aggregations (idempotent ⊗)."""
    return explain_equivalence(h, alpha, beta, products=True) is None


@dataclass(frozen=True)
class PrecedenceRelation:
    """PREC pairs and DNC pairs over the aggregated attributes.

    Output attributes are carried separately: under the extended order every
    output attribute precedes every non-output attribute.
    """

    prec: frozenset[tuple[str, str]]
    dnc: frozenset[frozenset[str]]
    outputs: frozenset[str]
    aggregated: frozenset[str]

    def before(self, a: str, b: str) -> bool:
        """Extended order: outputs first, then PREC."""
        if a in self.outputs and b in self.aggregated:
            return True
        return (a, b) in self.prec

    def predecessors_in(self, attrs: Iterable[str]) -> dict[str, set[str]]:
        attrs = set(attrs)
        preds: dict[str, set[str]] = {a: set() for a in attrs}
        for x, y in self.prec:
            if x in attrs and y in attrs:
                preds[y].add(x)
        return preds


def compute_prec(h: Hypergraph, alpha: AggregationOrdering) -> PrecedenceRelation:
    """Least fixed point of the DNC/PREC rules for a product-free ordering."""
    if alpha.has_products():
        raise QueryError("precedence relation is defined for product-free orderings")
    outputs = sorted(h.vertices - alpha.attrs())
    # Extended ordering: outputs first with a null operator, then alpha.
    extended: list[tuple[str, Optional[str]]] = [(a, None) for a in outputs]
    extended += [(a, op) for a, op in alpha.items]
    pos = {a: i for i, (a, _) in enumerate(extended)}
    op_of = dict(extended)
    share_edge = {
        frozenset((x, y))
        for e in h.edges
        for x in e.attrs
        for y in e.attrs
        if x != y
    }

    dnc: set[frozenset[str]] = set()
    prec: set[tuple[str, str]] = set()

    def note(a: str, b: str) -> bool:
        pair = frozenset((a, b))
        if pair in dnc:
            return False
        dnc.add(pair)
        first, second = (a, b) if pos[a] < pos[b] else (b, a)
        prec.add((first, second))
        return True

    attrs = [a for a, _ in extended]
    for x in attrs:
        for y in attrs:
            if pos[x] >= pos[y] or op_of[x] == op_of[y]:
                continue
            if frozenset((x, y)) in share_edge or op_of[x] is None or op_of[y] is None:
                note(x, y)

    successors: dict[str, set[str]] = {a: set() for a in attrs}
    for x, y in prec:
        successors[x].add(y)

    bound = 2 * len(extended) ** 2 + 1
    rounds = 0
    changed = True
    while changed:
        rounds += 1
        if rounds > bound:
            raise InternalError("precedence fixed point exceeded its iteration bound")
        changed = False
        fresh: list[tuple[str, str]] = []
        for a in attrs:
            for b in attrs:
                if a == b or frozenset((a, b)) in dnc:
                    continue
                if op_of[a] != op_of[b]:
                    # extension: PREC(a, c) with b, c sharing an edge
                    if any(
                        frozenset((b, c)) in share_edge
                        for c in successors[a]
                        if c != b
                    ):
                        fresh.append((a, b))
                        continue
                    if any(
                        frozenset((a, c)) in share_edge
                        for c in successors[b]
                        if c != a
                    ):
                        fresh.append((a, b))
                        continue
                # transitivity through any c
                if any(b in successors[c] for c in successors[a]) or any(
                    a in successors[c] for c in successors[b]
                ):
                    fresh.append((a, b))
        for a, b in fresh:
            if note(a, b):
                first, second = (a, b) if pos[a] < pos[b] else (b, a)
                successors[first].add(second)
                changed = True

    agg = alpha.attrs()
    return PrecedenceRelation(
        prec=frozenset((x, y) for x, y in prec if x in agg and y in agg),
        dnc=frozenset(p for p in dnc if p <= agg),
        outputs=frozenset(outputs),
        aggregated=agg,
    )


def linear_extensions(
    prec: PrecedenceRelation,
    alpha: AggregationOrdering,
    cap: int = 10_000,
) -> Iterator[AggregationOrdering]:
    """All orderings over V(alpha) extending prec, lazily, operators copied.

    Raises ExtensionOverflow after yielding cap extensions if more remain.
    """
    items = list(alpha.items)
    preds = prec.predecessors_in(a for a, _ in items)
    yielded = 0

    def backtrack(chosen: list[tuple[str, str]], remaining: list[tuple[str, str]]):
        nonlocal yielded
        if not remaining:
            yielded += 1
            if yielded > cap:
                raise ExtensionOverflow(cap)
            yield AggregationOrdering(tuple(chosen))
            return
        placed = {a for a, _ in chosen}
        for idx, item in enumerate(remaining):
            if preds[item[0]] <= placed:
                chosen.append(item)
                yield from backtrack(chosen, remaining[:idx] + remaining[idx + 1 :])
                chosen.pop()

    return backtrack([], items)
