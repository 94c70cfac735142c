"""Exception types shared across the engine."""

from __future__ import annotations


class AjarError(Exception):
    """Base class for all engine errors."""


class QueryError(AjarError):
    """Malformed query, data, or configuration supplied by the caller."""


class ParseError(QueryError):
    """Query text rejected; carries line/column of the offending token."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class InternalError(AjarError):
    """An engine invariant failed; indicates a bug, not bad input."""


class ExtensionOverflow(AjarError):
    """Linear-extension enumeration exceeded its cap."""

    def __init__(self, cap: int):
        super().__init__(f"more than {cap} linear extensions")
        self.cap = cap
