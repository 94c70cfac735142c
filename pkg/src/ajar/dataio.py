"""CSV relation files, domain declarations, statistics, and plan export."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Mapping, Optional

from .errors import QueryError
from .queries import ParsedQuery
from .relations import AnnotatedRelation, DomainRegistry
from .semirings import SemiringSpec

ANNOTATION_COLUMN = "__annotation"


def parse_value(text: str):
    """Attribute values: integers where possible, strings otherwise."""
    text = text.strip()
    try:
        return int(text)
    except ValueError:
        return text


def format_value(value) -> str:
    return str(value)


def load_relation_csv(
    path: str | Path,
    semiring: SemiringSpec,
    schema: Optional[tuple[str, ...]] = None,
) -> AnnotatedRelation:
    """Header row: attribute names then __annotation.

    When a schema is given (per-atom renaming), columns map positionally
    unless the header already names exactly the same attributes.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise QueryError(f"{path}: empty relation file") from None
        header = [col.strip() for col in header]
        if not header or header[-1] != ANNOTATION_COLUMN:
            raise QueryError(f"{path}: last column must be {ANNOTATION_COLUMN}")
        file_attrs = tuple(header[:-1])
        if schema is None:
            schema = file_attrs
        elif len(schema) != len(file_attrs):
            raise QueryError(
                f"{path}: {len(file_attrs)} columns, atom wants {len(schema)}"
            )
        elif set(schema) == set(file_attrs):
            order = [file_attrs.index(a) for a in schema]
            rows = {}
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) != len(header):
                    raise QueryError(f"{path}:{lineno}: wrong column count")
                key = tuple(parse_value(row[i]) for i in order)
                rows[key] = semiring.parse_annotation(row[-1])
            return AnnotatedRelation(schema, rows, zero=semiring.zero)
        rows = {}
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise QueryError(f"{path}:{lineno}: wrong column count")
            key = tuple(parse_value(cell) for cell in row[:-1])
            rows[key] = semiring.parse_annotation(row[-1])
        return AnnotatedRelation(schema, rows, zero=semiring.zero)


def write_relation_csv(
    rel: AnnotatedRelation, semiring: SemiringSpec, path: str | Path
) -> None:
    """Rows sorted lexicographically for diffability."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(rel.schema) + [ANNOTATION_COLUMN])
        body = [
            [format_value(v) for v in row] + [semiring.format_annotation(lam)]
            for row, lam in rel.tuples.items()
        ]
        body.sort()
        writer.writerows(body)


def load_query_data(
    query: ParsedQuery, data_dir: str | Path, semiring: SemiringSpec
) -> dict[str, AnnotatedRelation]:
    """One <RelationName>.csv per body atom; repeated atoms share one file."""
    data_dir = Path(data_dir)
    out = {}
    for atom in query.atoms:
        path = data_dir / f"{atom.relation}.csv"
        if not path.exists():
            raise QueryError(f"missing relation file {path}")
        out[atom.edge_name] = load_relation_csv(path, semiring, schema=atom.attrs)
    return out


def load_domains_json(
    path: Optional[str | Path],
    relations: Mapping[str, AnnotatedRelation],
) -> DomainRegistry:
    """Map attribute -> explicit value list or "active"; default active."""
    declarations = {}
    if path is not None:
        with Path(path).open() as fh:
            raw = json.load(fh)
        if not isinstance(raw, dict):
            raise QueryError("domains file must be a JSON object")
        for attr, decl in raw.items():
            if decl == "active":
                declarations[attr] = "active"
            elif isinstance(decl, list):
                declarations[attr] = [parse_value(str(v)) for v in decl]
            else:
                raise QueryError(f"domain for {attr!r} must be a list or \"active\"")
    return DomainRegistry.from_declarations(declarations, relations)


def load_stats_json(path: str | Path) -> dict[str, int]:
    """Map relation name -> cardinality."""
    with Path(path).open() as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise QueryError("stats file must be a JSON object")
    sizes = {}
    for name, value in raw.items():
        if not isinstance(value, int) or value <= 0:
            raise QueryError(f"size for {name!r} must be a positive integer")
        sizes[name] = value
    return sizes


def edge_sizes(
    query: ParsedQuery, stats: Optional[dict[str, int]]
) -> Optional[dict[str, int]]:
    """Translate per-relation stats to per-edge sizes (repeated atoms share)."""
    if stats is None:
        return None
    sizes = {}
    for atom in query.atoms:
        if atom.relation not in stats:
            raise QueryError(f"no size for relation {atom.relation!r}")
        sizes[atom.edge_name] = stats[atom.relation]
    return sizes
