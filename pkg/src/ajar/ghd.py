"""Generalized hypertree decompositions: checks, widths, and the planner's
decomposition into unconstrained sub-problems.

The central construction: split the query into characteristic hypergraphs,
find an optimal unconstrained GHD for each, and stitch them back into a
decomposable GHD whose width is exactly the maximum over the parts.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Optional, Sequence

from .errors import InternalError, QueryError
from .hypergraph import Edge, Hypergraph, connected_components, path_exists
from .lp import fractional_cover_value
from .ordering import AggregationOrdering, PrecedenceRelation, compute_prec
from .semirings import PRODUCT, log_cost


@dataclass
class Ghd:
    """Rooted tree of bags; node ids are opaque ints."""

    root: int
    parent: dict[int, Optional[int]]
    chi: dict[int, frozenset[str]]

    @classmethod
    def single(cls, bag: Iterable[str]) -> "Ghd":
        return cls(root=0, parent={0: None}, chi={0: frozenset(bag)})

    @classmethod
    def chain(cls, bags: Sequence[Iterable[str]]) -> "Ghd":
        """Chain rooted at the first bag."""
        parent = {i: (i - 1 if i else None) for i in range(len(bags))}
        chi = {i: frozenset(b) for i, b in enumerate(bags)}
        return cls(root=0, parent=parent, chi=chi)

    def nodes(self) -> list[int]:
        return sorted(self.parent)

    def children_map(self) -> dict[int, list[int]]:
        kids: dict[int, list[int]] = {t: [] for t in self.parent}
        for t, p in self.parent.items():
            if p is not None:
                kids[p].append(t)
        for lst in kids.values():
            lst.sort()
        return kids

    def preorder(self) -> list[int]:
        kids = self.children_map()
        out, stack = [], [self.root]
        while stack:
            t = stack.pop()
            out.append(t)
            stack.extend(reversed(kids[t]))
        return out

    def depths(self) -> dict[int, int]:
        depth = {self.root: 0}
        for t in self.preorder()[1:]:
            depth[t] = depth[self.parent[t]] + 1
        return depth

    def is_strict_ancestor(self, a: int, b: int) -> bool:
        t = self.parent[b]
        while t is not None:
            if t == a:
                return True
            t = self.parent[t]
        return False

    def subtree(self, t: int) -> list[int]:
        kids = self.children_map()
        out, stack = [], [t]
        while stack:
            v = stack.pop()
            out.append(v)
            stack.extend(kids[v])
        return out

    def attr_universe(self) -> frozenset[str]:
        return frozenset().union(*self.chi.values()) if self.chi else frozenset()

    def reroot(self, new_root: int) -> "Ghd":
        chain = [new_root]
        while self.parent[chain[-1]] is not None:
            chain.append(self.parent[chain[-1]])
        parent = dict(self.parent)
        parent[new_root] = None
        for above, below in zip(chain[1:], chain):
            parent[above] = below
        return Ghd(root=new_root, parent=parent, chi=dict(self.chi))

    def relabel(self, counter: itertools.count) -> "Ghd":
        mapping = {t: next(counter) for t in self.preorder()}
        return Ghd(
            root=mapping[self.root],
            parent={mapping[t]: (None if p is None else mapping[p]) for t, p in self.parent.items()},
            chi={mapping[t]: bag for t, bag in self.chi.items()},
        )

    def canonical_code(self):
        """Rooted-tree canonical form over bag contents, for isomorphism tests."""
        kids = self.children_map()

        def code(t):
            return (tuple(sorted(self.chi[t])), tuple(sorted(code(c) for c in kids[t])))

        return code(self.root)


def is_ghd(h: Hypergraph, g: Ghd) -> bool:
    """Edge cover plus running intersection."""
    bags = list(g.chi.values())
    for e in h.edges:
        if not any(e.attrs <= bag for bag in bags):
            return False
    kids = g.children_map()
    for attr in g.attr_universe() | h.vertices:
        holders = {t for t, bag in g.chi.items() if attr in bag}
        if not holders:
            return False  # attribute never placed
        start = next(iter(holders))
        seen, stack = {start}, [start]
        while stack:
            t = stack.pop()
            for nxt in kids[t] + ([g.parent[t]] if g.parent[t] is not None else []):
                if nxt in holders and nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        if seen != holders:
            return False
    return True


def top_map(g: Ghd) -> dict[str, int]:
    """Highest node containing each attribute; unique under running intersection."""
    depth = g.depths()
    tops: dict[str, int] = {}
    for attr in g.attr_universe():
        holders = [t for t, bag in g.chi.items() if attr in bag]
        top = min(holders, key=lambda t: (depth[t], t))
        for t in holders:
            if depth[t] == depth[top] and t != top:
                raise InternalError(f"attribute {attr!r} has two topmost nodes")
        tops[attr] = top
    return tops


@dataclass(frozen=True)
class ProductPartition:
    """Per product attribute, a partition of the edges containing it."""

    blocks: dict[str, tuple[frozenset[str], ...]]  # attr -> blocks of edge names

    def validate(self, h: Hypergraph, alpha: AggregationOrdering) -> None:
        for attr, blocks in self.blocks.items():
            if alpha.operator(attr) != PRODUCT:
                raise QueryError(f"{attr!r} is not a product attribute")
            holders = {e.name for e in h.edges if attr in e.attrs}
            union: set[str] = set()
            for block in blocks:
                if not block:
                    raise QueryError(f"empty partition block for {attr!r}")
                if block & union:
                    raise QueryError(f"overlapping partition blocks for {attr!r}")
                union |= block
            if union != holders:
                raise QueryError(
                    f"partition for {attr!r} covers {sorted(union)}, "
                    f"expected {sorted(holders)}"
                )

    def copy_name(self, attr: str, block_index: int) -> str:
        return f"{attr}#{block_index + 1}"

    def copy_of(self, attr: str, edge_name: str) -> str:
        blocks = self.blocks.get(attr)
        if blocks is None:
            return attr
        for k, block in enumerate(blocks):
            if edge_name in block:
                return self.copy_name(attr, k)
        raise QueryError(f"edge {edge_name!r} not assigned a copy of {attr!r}")

    def copies(self, attr: str) -> tuple[str, ...]:
        blocks = self.blocks.get(attr)
        if blocks is None:
            return (attr,)
        return tuple(self.copy_name(attr, k) for k in range(len(blocks)))


def product_partition_hypergraph(
    h: Hypergraph, alpha: AggregationOrdering, partition: ProductPartition
) -> Hypergraph:
    """Split each product attribute into per-block copies and rewrite edges."""
    partition.validate(h, alpha)
    new_edges = []
    for e in h.edges:
        attrs = frozenset(partition.copy_of(a, e.name) for a in e.attrs)
        new_edges.append((e.name, attrs))
    return Hypergraph.build(new_edges)


@dataclass
class Aghd:
    """GHD over the product partition hypergraph, plus the renaming."""

    tree: Ghd  # bags over renamed attributes
    partition: ProductPartition
    hypergraph_p: Hypergraph
    original: dict[str, str]  # renamed attr -> original attr

    def copy_tops(self) -> dict[str, set[int]]:
        tops = top_map(self.tree)
        grouped: dict[str, set[int]] = {}
        for attr, node in tops.items():
            grouped.setdefault(self.original.get(attr, attr), set()).add(node)
        return grouped


def is_compatible(g: Ghd | Aghd, beta: AggregationOrdering) -> bool:
    """No attribute may sit above a non-output attribute that precedes it."""
    if isinstance(g, Aghd):
        tree = g.tree
        tops = {a: frozenset(nodes) for a, nodes in g.copy_tops().items()}
    else:
        tree = g
        tops = {a: frozenset((t,)) for a, t in top_map(g).items()}
    outputs = frozenset(tops) - beta.attrs()
    order = {a: i for i, (a, _) in enumerate(beta.items)}
    attrs = sorted(tops)
    for a in attrs:
        for b in attrs:
            if a == b:
                continue
            above = any(
                tree.is_strict_ancestor(ta, tb) for ta in tops[a] for tb in tops[b]
            )
            if not above:
                continue
            if a in outputs:
                continue
            if b in outputs or order[a] > order[b]:
                return False
    return True


def is_valid(h: Hypergraph, prec: PrecedenceRelation, g: Ghd) -> bool:
    """Compatible with at least one equivalent ordering (product-free)."""
    tops = top_map(g)
    attrs = sorted(tops)
    for a in attrs:
        for b in attrs:
            if a != b and g.is_strict_ancestor(tops[a], tops[b]) and prec.before(b, a):
                return False
    return True


@dataclass(frozen=True)
class WidthReport:
    mode: str  # "unit" or "data"
    per_bag: dict[int, Any]
    width: Any

    @classmethod
    def collect(cls, mode: str, per_bag: dict[int, Any]) -> "WidthReport":
        if per_bag:
            overall = max(per_bag.values())
        else:
            overall = Fraction(0) if mode == "unit" else 0.0
        return cls(mode=mode, per_bag=per_bag, width=overall)


def cost_edges_for(
    h: Hypergraph, sizes: Optional[dict[str, int]], mode: str
) -> list[tuple[frozenset[str], Any]]:
    if mode == "unit":
        return [(e.attrs, 1) for e in h.edges]
    if mode != "data":
        raise QueryError(f"unknown width mode {mode!r}")
    if sizes is None:
        raise QueryError("data-aware mode needs relation sizes")
    total = sum(sizes[e.name] for e in h.edges)
    return [(e.attrs, log_cost(sizes[e.name], total)) for e in h.edges]


def width(
    g: Ghd,
    h: Hypergraph,
    sizes: Optional[dict[str, int]] = None,
    mode: str = "unit",
    cost_edges: Optional[list[tuple[frozenset[str], Any]]] = None,
) -> WidthReport:
    """Per-bag fractional cover optimum; overall width is the max."""
    if cost_edges is None:
        cost_edges = cost_edges_for(h, sizes, mode)
    per_bag = {
        t: fractional_cover_value(bag, cost_edges, exact=(mode == "unit"))
        for t, bag in g.chi.items()
    }
    return WidthReport.collect(mode, per_bag)


# ---------------------------------------------------------------------------
# Characteristic hypergraphs and stitching
# ---------------------------------------------------------------------------


@dataclass
class Part:
    """One characteristic hypergraph with its hook to the parent part."""

    hypergraph: Hypergraph
    interface: frozenset[str]  # attrs shared with the parent part (empty at root)
    children: list["Part"] = field(default_factory=list)

    def flatten(self) -> list["Part"]:
        out = [self]
        for child in self.children:
            out.extend(child.flatten())
        return out


def _front_set(
    h: Hypergraph,
    alpha: AggregationOrdering,
    alpha_c: AggregationOrdering,
    component: frozenset[str],
    products: bool,
) -> frozenset[str]:
    """Attributes removable up front: the no-predecessor set, or for product
    orderings the single-product / commutable-to-front conditional."""
    if not products:
        prec = compute_prec(h, alpha)
        return frozenset(
            v
            for v in component
            if not any((w, v) in prec.prec for w in component)
        )
    items = alpha_c.items
    if not items:
        return frozenset()
    if items[0][1] == PRODUCT:
        return frozenset((items[0][0],))
    front = set()
    for j, (attr_j, op_j) in enumerate(items):
        ok = True
        for i in range(j):
            attr_i, op_i = items[i]
            if op_i == op_j:
                continue
            suffix = items[i:]
            prods = {a for a, op in suffix if op == PRODUCT}
            allowed = ({a for a, _ in suffix} - prods) | {attr_i, attr_j}
            if path_exists(h, attr_j, attr_i, allowed):
                ok = False
                break
        if ok:
            front.add(attr_j)
    return frozenset(front)


def characteristic_tree(
    h: Hypergraph,
    alpha: AggregationOrdering,
    products: bool = False,
    _names: Optional[itertools.count] = None,
) -> Part:
    """Recursive decomposition into unconstrained hypergraphs.

    The root part covers the output attributes; one child subtree per
    connected component of the query minus outputs (and minus product
    attributes in the product variant, components then absorbing adjacent
    product attributes).  Intersection edges are added so arbitrary GHDs of
    the parts can be stitched back together.
    """
    if _names is None:
        _names = itertools.count()
    outputs = h.vertices - alpha.attrs()
    prod_attrs = alpha.product_attrs() if products else frozenset()
    comps = connected_components(h, outputs | prod_attrs)

    children = []
    interface_edges: list[tuple[str, frozenset[str]]] = []
    seen_interfaces: set[frozenset[str]] = set()
    for comp in comps:
        e_c = [e for e in h.edges if e.attrs & comp]
        c_pp = frozenset().union(*(e.attrs for e in e_c))
        interface = outputs & c_pp
        c_plus = comp | (prod_attrs & c_pp)
        alpha_c = alpha.restrict(c_plus)
        front = _front_set(h, alpha, alpha_c, comp, products)
        sub_alpha = alpha_c.without(front)
        sub_edges = [(e.name, e.attrs) for e in e_c]
        if interface:
            sub_edges.append((f"__ix{next(_names)}", interface))
            if interface not in seen_interfaces:
                seen_interfaces.add(interface)
                interface_edges.append((f"__ix{next(_names)}", interface))
        sub_h = Hypergraph.build(sub_edges)
        child = characteristic_tree(sub_h, sub_alpha, products, _names)
        child.interface = interface
        children.append(child)

    h0_edges = [(e.name, e.attrs) for e in h.edges if e.attrs <= outputs]
    h0_edges.extend(interface_edges)
    h0 = Hypergraph(
        vertices=frozenset(outputs),
        edges=tuple(Edge(name, attrs) for name, attrs in h0_edges),
    )
    if h0.edges and frozenset().union(*(e.attrs for e in h0.edges)) != h0.vertices:
        raise InternalError("output attributes escaped the root characteristic part")
    return Part(hypergraph=h0, interface=frozenset(), children=children)


def characteristic_hypergraphs(
    h: Hypergraph, alpha: AggregationOrdering
) -> list[Hypergraph]:
    """Flat preorder listing of the characteristic hypergraphs."""
    tree = characteristic_tree(h, alpha, products=alpha.has_products())
    return [part.hypergraph for part in tree.flatten()]


def _covering_node(g: Ghd, attrs: frozenset[str]) -> int:
    for t in g.preorder():
        if attrs <= g.chi[t]:
            return t
    raise QueryError(f"no bag covers interface {sorted(attrs)}")


def stitch_tree(part: Part, ghds: Iterable[Ghd]) -> Ghd:
    """Attach part GHDs along interface edges; width is the max over parts."""
    ghd_iter = iter(ghds)

    counter = itertools.count()

    def build(part: Part) -> Ghd:
        g = next(ghd_iter).relabel(counter)
        parent = dict(g.parent)
        chi = dict(g.chi)
        for child in part.children:
            sub = build(child)
            if child.interface:
                sub = sub.reroot(_covering_node(sub, child.interface))
                hook = _covering_node(g, child.interface)
            else:
                hook = g.root
            parent.update(sub.parent)
            chi.update(sub.chi)
            parent[sub.root] = hook
        return Ghd(root=g.root, parent=parent, chi=chi)

    out = build(part)
    leftover = next(ghd_iter, None)
    if leftover is not None:
        raise QueryError("more part GHDs than characteristic hypergraphs")
    return out


def stitch(h: Hypergraph, alpha: AggregationOrdering, parts: Sequence[Ghd]) -> Ghd:
    """Stitch GHDs given in the order characteristic_hypergraphs returns."""
    tree = characteristic_tree(h, alpha, products=alpha.has_products())
    expected = len(tree.flatten())
    if len(parts) != expected:
        raise QueryError(f"expected {expected} part GHDs, got {len(parts)}")
    return stitch_tree(tree, parts)


def aghd_from_stitched(
    h: Hypergraph, alpha: AggregationOrdering, tree: Ghd
) -> Aghd:
    """Derive the product partition a stitched tree induces and rename bags.

    Each product attribute's occurrences fall into connected regions of the
    tree; each region becomes one renamed copy, and an edge is assigned to
    the region holding its covering bag.
    """
    prod_attrs = alpha.product_attrs()
    kids = tree.children_map()
    order = {t: i for i, t in enumerate(tree.preorder())}

    region_of: dict[str, dict[int, int]] = {}
    blocks: dict[str, tuple[frozenset[str], ...]] = {}
    for attr in sorted(prod_attrs):
        holders = {t for t, bag in tree.chi.items() if attr in bag}
        regions: list[set[int]] = []
        unseen = set(holders)
        while unseen:
            start = min(unseen, key=lambda t: order[t])
            stack, region = [start], set()
            while stack:
                t = stack.pop()
                if t in region:
                    continue
                region.add(t)
                neighbours = kids[t] + ([tree.parent[t]] if tree.parent[t] is not None else [])
                stack.extend(n for n in neighbours if n in holders and n not in region)
            unseen -= region
            regions.append(region)
        regions.sort(key=lambda r: min(order[t] for t in r))
        node_region = {t: k for k, region in enumerate(regions) for t in region}
        region_of[attr] = node_region
        assigned: list[set[str]] = [set() for _ in regions]
        for e in h.edges:
            if attr in e.attrs:
                cover = _covering_node(tree, e.attrs)
                assigned[node_region[cover]].add(e.name)
        if any(not block for block in assigned):
            raise InternalError(f"product attribute {attr!r} has an edgeless region")
        blocks[attr] = tuple(frozenset(block) for block in assigned)

    partition = ProductPartition(blocks=blocks)
    h_p = product_partition_hypergraph(h, alpha, partition)

    renamed_chi = {}
    for t, bag in tree.chi.items():
        renamed_chi[t] = frozenset(
            partition.copy_name(a, region_of[a][t]) if a in prod_attrs else a
            for a in bag
        )
    renamed = Ghd(root=tree.root, parent=dict(tree.parent), chi=renamed_chi)
    original = {
        partition.copy_name(a, k): a
        for a in blocks
        for k in range(len(blocks[a]))
    }
    return Aghd(tree=renamed, partition=partition, hypergraph_p=h_p, original=original)


# ---------------------------------------------------------------------------
# Optimal unconstrained GHDs via elimination orders
# ---------------------------------------------------------------------------

GHD_VERTEX_CAP = 12


def optimal_ghd(
    h: Hypergraph,
    sizes: Optional[dict[str, int]] = None,
    mode: str = "unit",
    cap: int = GHD_VERTEX_CAP,
    cost_edges: Optional[list[tuple[frozenset[str], Any]]] = None,
) -> Ghd:
    """Minimum-width GHD among those induced by vertex elimination orders.

    Dynamic program over eliminated-prefix sets; the bag produced when a
    vertex is eliminated depends only on the set eliminated before it, so
    this searches every elimination order.  Bag costs come from the
    fractional cover LP over cost_edges (defaults to h's own edges).
    """
    verts = sorted(h.vertices)
    n = len(verts)
    if n > cap:
        raise QueryError(f"hypergraph has {n} attributes, above the cap {cap}")
    if n == 0:
        return Ghd.single(())
    if cost_edges is None:
        cost_edges = cost_edges_for(h, sizes, mode)
    exact = mode == "unit"
    index = {v: i for i, v in enumerate(verts)}
    adj = [0] * n
    for e in h.edges:
        for a in e.attrs:
            for b in e.attrs:
                if a != b:
                    adj[index[a]] |= 1 << index[b]

    bag_cost_cache: dict[frozenset[str], Any] = {}

    def bag_cost(bag: frozenset[str]):
        if bag not in bag_cost_cache:
            bag_cost_cache[bag] = fractional_cover_value(bag, cost_edges, exact)
        return bag_cost_cache[bag]

    def bag_of(v: int, eliminated: int) -> frozenset[str]:
        # v plus every vertex reachable from it through eliminated vertices
        reached = 1 << v
        stack = [v]
        collected = 0
        while stack:
            u = stack.pop()
            for w in range(n):
                bit = 1 << w
                if adj[u] & bit and not reached & bit:
                    reached |= bit
                    if eliminated & bit:
                        stack.append(w)
                    else:
                        collected |= bit
        return frozenset(verts[w] for w in range(n) if collected & (1 << w)) | {verts[v]}

    zero = Fraction(0) if exact else 0.0
    best: dict[int, Any] = {0: zero}
    choice: dict[int, int] = {}
    masks_by_size: list[list[int]] = [[] for _ in range(n + 1)]
    for mask in range(1 << n):
        masks_by_size[bin(mask).count("1")].append(mask)
    for size in range(1, n + 1):
        for mask in masks_by_size[size]:
            best_cost, best_v = None, None
            for v in range(n):
                bit = 1 << v
                if not mask & bit:
                    continue
                rest = mask ^ bit
                cost = max(best[rest], bag_cost(bag_of(v, rest)))
                if best_cost is None or cost < best_cost or (
                    cost == best_cost and verts[v] < verts[best_v]
                ):
                    best_cost, best_v = cost, v
            best[mask] = best_cost
            choice[mask] = best_v

    order: list[int] = []
    mask = (1 << n) - 1
    while mask:
        v = choice[mask]
        mask ^= 1 << v
        order.append(v)
    order.reverse()  # elimination order, first eliminated first

    bags: list[frozenset[str]] = []
    eliminated = 0
    for v in order:
        bags.append(bag_of(v, eliminated))
        eliminated |= 1 << v
    position = {verts[v]: i for i, v in enumerate(order)}

    parent: dict[int, Optional[int]] = {}
    for i, v in enumerate(order):
        later = [position[a] for a in bags[i] if position[a] > i]
        parent[i] = min(later) if later else None
    root = len(order) - 1
    for i in range(len(order)):
        if parent[i] is None and i != root:
            parent[i] = root  # disconnected component roots hang off the last bag
    g = Ghd(root=root, parent=parent, chi={i: bags[i] for i in range(len(order))})
    return _merge_redundant(g)


def _merge_redundant(g: Ghd) -> Ghd:
    """Contract nodes whose bag is contained in a neighbour's bag."""
    parent = dict(g.parent)
    chi = dict(g.chi)
    root = g.root
    changed = True
    while changed:
        changed = False
        kids: dict[int, list[int]] = {t: [] for t in parent}
        for t, p in parent.items():
            if p is not None:
                kids[p].append(t)
        for t in sorted(parent):
            p = parent[t]
            if p is None:
                continue
            if chi[t] <= chi[p]:
                for c in kids[t]:
                    parent[c] = p
                del parent[t], chi[t]
                changed = True
                break
            if chi[p] < chi[t]:
                # pull the child's bag up instead of keeping both
                chi[p] = chi[t]
                for c in kids[t]:
                    parent[c] = p
                del parent[t], chi[t]
                changed = True
                break
    counter = itertools.count()
    return Ghd(root=root, parent=parent, chi=chi).relabel(counter)


# ---------------------------------------------------------------------------
# Width-preserving normalization of valid GHDs
# ---------------------------------------------------------------------------


def is_top_unique(g: Ghd) -> bool:
    inverse: dict[int, int] = {t: 0 for t in g.parent}
    for _, t in top_map(g).items():
        inverse[t] += 1
    for t, count in inverse.items():
        if count != 1 and not (t == g.root and not g.chi[t]):
            return False
    return True


def is_subtree_connected(h: Hypergraph, g: Ghd) -> bool:
    tops = top_map(g)
    for t in g.parent:
        region = set(g.subtree(t))
        attrs = {a for a, node in tops.items() if node in region}
        if attrs and len(connected_components_within(h, attrs)) > 1:
            return False
    return True


def connected_components_within(h: Hypergraph, attrs: set[str]) -> list[frozenset[str]]:
    return connected_components(h, h.vertices - attrs)


def normalize_decomposable(
    h: Hypergraph,
    alpha: AggregationOrdering,
    prec: PrecedenceRelation,
    g: Ghd,
) -> Ghd:
    """Transform a valid GHD into a decomposable one, every new bag a subset
    of an old bag (so any node-monotone width is preserved)."""
    if not is_valid(h, prec, g):
        raise QueryError("normalize_decomposable requires a valid GHD")
    parent = dict(g.parent)
    chi = dict(g.chi)
    root = g.root
    fresh = itertools.count(max(parent) + 1)
    outputs = sorted(h.vertices - alpha.attrs())
    rank = {a: i for i, a in enumerate(outputs)}
    rank.update({a: len(outputs) + i for i, (a, _) in enumerate(alpha.items)})

    def kids_of() -> dict[int, list[int]]:
        kids: dict[int, list[int]] = {t: [] for t in parent}
        for t, p in parent.items():
            if p is not None:
                kids[p].append(t)
        return kids

    def current() -> Ghd:
        return Ghd(root=root, parent=parent, chi=chi)

    # Phase 1: make every node the top of exactly one attribute.
    while True:
        tops = top_map(current())
        inverse: dict[int, list[str]] = {t: [] for t in parent}
        for a, t in tops.items():
            inverse[t].append(a)
        kids = kids_of()
        target = None
        for t in sorted(parent):
            count = len(inverse[t])
            if count == 0 and not (t == root and len(kids[t]) != 1):
                target = ("drop", t)
                break
            if count > 1:
                target = ("split", t)
                break
        if target is None:
            break
        kind, t = target
        if kind == "drop":
            if t == root:
                (only_child,) = kids[t]
                parent[only_child] = None
                root = only_child
                del parent[t], chi[t]
            else:
                if not chi[t] <= chi[parent[t]]:
                    raise InternalError("topless bag not contained in its parent")
                for c in kids[t]:
                    parent[c] = parent[t]
                del parent[t], chi[t]
        else:
            first = min(inverse[t], key=lambda a: rank[a])
            shared = chi[t] & chi[parent[t]] if parent[t] is not None else frozenset()
            node = next(fresh)
            chi[node] = frozenset((first,)) | shared
            parent[node] = parent[t]
            parent[t] = node
            if root == t:
                root = node

    # Phase 2: make the attributes topped in every subtree connected in h.
    changed = True
    while changed:
        changed = False
        snapshot = current()
        tops = top_map(snapshot)
        inverse: dict[int, list[str]] = {t: [] for t in parent}
        for a, t in tops.items():
            inverse[t].append(a)
        kids = kids_of()
        for t in snapshot.preorder():
            if not inverse[t]:
                continue
            (top_attr,) = inverse[t]
            for c in list(kids[t]):
                region = snapshot.subtree(c)
                region_attrs = {a for a, node in tops.items() if node in set(region)}
                touches = any(
                    top_attr in e.attrs and e.attrs & region_attrs for e in h.edges
                )
                if touches or not region_attrs:
                    continue
                if parent[t] is None:
                    raise InternalError(
                        "root subtree disconnected: hypergraph is not connected"
                    )
                for node in region:
                    chi[node] = chi[node] - {top_attr}
                parent[c] = parent[t]
                changed = True
                break
            if changed:
                break

    counter = itertools.count()
    return current().relabel(counter)
