"""Query-body hypergraphs and the connectivity utilities planning relies on."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import QueryError


@dataclass(frozen=True)
class Edge:
    """A hyperedge tagged with the relation (atom) it stands for."""

    name: str
    attrs: frozenset[str]

    def __repr__(self):
        return f"{self.name}({','.join(sorted(self.attrs))})"


@dataclass(frozen=True)
class Hypergraph:
    vertices: frozenset[str]
    edges: tuple[Edge, ...]

    @classmethod
    def build(cls, edges: Iterable[tuple[str, Iterable[str]]]) -> "Hypergraph":
        tagged = []
        seen_names = set()
        for name, attrs in edges:
            attrs = frozenset(attrs)
            if not attrs:
                raise QueryError(f"edge {name!r} has no attributes")
            if name in seen_names:
                raise QueryError(f"duplicate edge name {name!r}")
            seen_names.add(name)
            tagged.append(Edge(name, attrs))
        vertices = frozenset().union(*(e.attrs for e in tagged)) if tagged else frozenset()
        return cls(vertices=vertices, edges=tuple(tagged))

    def edge(self, name: str) -> Edge:
        for e in self.edges:
            if e.name == name:
                return e
        raise QueryError(f"no edge named {name!r}")

    def edge_map(self) -> dict[str, frozenset[str]]:
        return {e.name: e.attrs for e in self.edges}

    def adjacency(self) -> dict[str, set[str]]:
        adj: dict[str, set[str]] = {v: set() for v in self.vertices}
        for e in self.edges:
            for a in e.attrs:
                adj[a] |= e.attrs - {a}
        return adj


def connected_components(h: Hypergraph, removed: Iterable[str]) -> list[frozenset[str]]:
    """Components of the vertices surviving removal, edges restricted likewise.

    Returned in deterministic order: sorted by smallest member.
    """
    removed = set(removed)
    if not removed <= h.vertices:
        raise QueryError(f"removed attributes {removed - h.vertices} not in hypergraph")
    alive = h.vertices - removed
    adj: dict[str, set[str]] = {v: set() for v in alive}
    for e in h.edges:
        surviving = e.attrs & alive
        for a in surviving:
            adj[a] |= surviving - {a}
    components = []
    unseen = set(alive)
    while unseen:
        start = next(iter(unseen))
        stack, comp = [start], set()
        while stack:
            v = stack.pop()
            if v in comp:
                continue
            comp.add(v)
            stack.extend(adj[v] - comp)
        unseen -= comp
        components.append(frozenset(comp))
    components.sort(key=lambda c: min(c))
    return components


def path_exists(h: Hypergraph, a: str, b: str, allowed: Iterable[str]) -> bool:
    """True iff a and b connect through attributes in allowed only."""
    allowed = set(allowed)
    if a not in allowed or b not in allowed or not allowed <= h.vertices:
        raise QueryError("path endpoints must lie in allowed ⊆ vertices")
    if a == b:
        return True
    adj: dict[str, set[str]] = {v: set() for v in allowed}
    for e in h.edges:
        surviving = e.attrs & allowed
        for v in surviving:
            adj[v] |= surviving - {v}
    stack, seen = [a], {a}
    while stack:
        v = stack.pop()
        if v == b:
            return True
        for w in adj[v] - seen:
            seen.add(w)
            stack.append(w)
    return False


def edges_touching(h: Hypergraph, attrs: Iterable[str]) -> tuple[Edge, ...]:
    """Exactly the edges intersecting the given attribute set."""
    attrs = set(attrs)
    return tuple(e for e in h.edges if e.attrs & attrs)
