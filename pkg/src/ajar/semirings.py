"""Commutative semirings used to annotate relations.

A semiring spec bundles one multiplication with a family of named additive
operators that all share the same zero and one.  Annotation values are kept
exact (ints, Fractions, or an explicit infinity sentinel), never floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Mapping

from .errors import QueryError

# Distinguished operator name for aggregation by the semiring multiplication.
PRODUCT = "prod"


class _Infinity:
    """Sentinel for the min-plus zero; compares greater than every int."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "inf"

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True


INF = _Infinity()


@dataclass(frozen=True)
class SemiringSpec:
    """A domain of annotation values with one ⊗ and several named ⊕ operators."""

    name: str
    domain: str  # nonneg-real | integer | extended-integer-with-infinity | boolean-01
    additive_ops: Mapping[str, Callable[[Any, Any], Any]]
    multiply: Callable[[Any, Any], Any]
    zero: Any
    one: Any
    multiply_idempotent: bool = False

    def additive(self, op_name: str) -> Callable[[Any, Any], Any]:
        try:
            return self.additive_ops[op_name]
        except KeyError:
            raise QueryError(
                f"semiring {self.name!r} has no additive operator {op_name!r}"
            ) from None

    def knows_op(self, op_name: str) -> bool:
        return op_name == PRODUCT or op_name in self.additive_ops

    def parse_annotation(self, text: str) -> Any:
        text = text.strip()
        if self.domain == "extended-integer-with-infinity":
            return INF if text == "inf" else int(text)
        if self.domain == "integer":
            return int(text)
        if self.domain == "boolean-01":
            value = int(text)
            if value not in (0, 1):
                raise QueryError(f"annotation {text!r} outside boolean-01 domain")
            return value
        if self.domain == "nonneg-real":
            value = Fraction(text)
            if value < 0:
                raise QueryError(f"annotation {text!r} outside nonneg-real domain")
            return value
        return int(text)

    def format_annotation(self, value: Any) -> str:
        return "inf" if value is INF else str(value)


def _minplus_add(a, b):
    return INF if a is INF or b is INF else a + b


def _minplus_min(a, b):
    if a is INF:
        return b
    if b is INF:
        return a
    return min(a, b)


_REGISTRY: dict[str, SemiringSpec] = {}


def register_semiring(spec: SemiringSpec) -> SemiringSpec:
    if spec.name in _REGISTRY:
        raise QueryError(f"semiring {spec.name!r} already registered")
    _REGISTRY[spec.name] = spec
    return spec


def get_semiring(name: str) -> SemiringSpec:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise QueryError(f"unknown semiring {name!r}") from None


def builtin_semirings() -> tuple[SemiringSpec, ...]:
    return tuple(_REGISTRY[n] for n in ("int", "qplus", "minplus", "bool01"))


register_semiring(
    SemiringSpec(
        name="int",
        domain="integer",
        additive_ops={"sum": lambda a, b: a + b},
        multiply=lambda a, b: a * b,
        zero=0,
        one=1,
    )
)

register_semiring(
    SemiringSpec(
        name="qplus",
        domain="nonneg-real",
        additive_ops={"sum": lambda a, b: a + b, "max": max},
        multiply=lambda a, b: a * b,
        zero=Fraction(0),
        one=Fraction(1),
    )
)

register_semiring(
    SemiringSpec(
        name="minplus",
        domain="extended-integer-with-infinity",
        additive_ops={"min": _minplus_min},
        multiply=_minplus_add,
        zero=INF,
        one=0,
    )
)

register_semiring(
    SemiringSpec(
        name="bool01",
        domain="boolean-01",
        additive_ops={"max": max},
        multiply=lambda a, b: a * b,
        zero=0,
        one=1,
        multiply_idempotent=True,
    )
)


def sample_values(spec: SemiringSpec, rng, count: int) -> list:
    """Draw annotation values for law checking, zero and one included."""
    if spec.domain == "integer":
        pool = [rng.randint(-6, 6) for _ in range(count)]
    elif spec.domain == "nonneg-real":
        pool = [Fraction(rng.randint(0, 24), rng.randint(1, 6)) for _ in range(count)]
    elif spec.domain == "extended-integer-with-infinity":
        pool = [INF if rng.random() < 0.15 else rng.randint(0, 9) for _ in range(count)]
    elif spec.domain == "boolean-01":
        pool = [rng.randint(0, 1) for _ in range(count)]
    else:
        pool = [rng.randint(0, 9) for _ in range(count)]
    pool[:2] = [spec.zero, spec.one]
    return pool


def check_laws(spec: SemiringSpec, rng, triples: int = 1000) -> None:
    """Sampled identity/annihilation/associativity/commutativity/distributivity.

    Raises AssertionError on the first violated law.
    """
    values = sample_values(spec, rng, max(3 * triples, 16))
    mul = spec.multiply
    for k in range(triples):
        a, b, c = values[3 * k], values[3 * k + 1], values[3 * k + 2]
        assert mul(spec.zero, a) == spec.zero, f"{spec.name}: 0 ⊗ a != 0"
        assert mul(spec.one, a) == a, f"{spec.name}: 1 ⊗ a != a"
        assert mul(a, b) == mul(b, a), f"{spec.name}: ⊗ not commutative"
        assert mul(mul(a, b), c) == mul(a, mul(b, c)), f"{spec.name}: ⊗ not associative"
        if spec.multiply_idempotent:
            assert mul(a, a) == a, f"{spec.name}: ⊗ not idempotent"
        for op_name, add in spec.additive_ops.items():
            assert add(spec.zero, a) == a, f"{spec.name}/{op_name}: 0 ⊕ a != a"
            assert add(a, b) == add(b, a), f"{spec.name}/{op_name}: ⊕ not commutative"
            assert add(add(a, b), c) == add(a, add(b, c)), (
                f"{spec.name}/{op_name}: ⊕ not associative"
            )
            assert mul(a, add(b, c)) == add(mul(a, b), mul(a, c)), (
                f"{spec.name}/{op_name}: ⊗ does not distribute over ⊕"
            )


def log_cost(size: int, total_input: int) -> float:
    """log_IN(size) used by data-aware width mode."""
    if size <= 1:
        return 0.0
    base = max(total_input, 2)
    return math.log(size) / math.log(base)
