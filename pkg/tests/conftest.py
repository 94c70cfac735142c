import pytest

from ajar import (
    AggregationOrdering,
    AnnotatedRelation,
    Hypergraph,
    get_semiring,
)


@pytest.fixture
def int_sr():
    return get_semiring("int")


@pytest.fixture
def chain_h():
    """R(A,B) joined with S(B,C)."""
    return Hypergraph.build([("R", ("A", "B")), ("S", ("B", "C"))])


@pytest.fixture
def fig1(int_sr):
    """The worked two-relation instance over (Z, +, *)."""
    r = AnnotatedRelation(("A", "B"), {(1, 3): 3, (1, 2): 1, (1, 1): 2})
    s = AnnotatedRelation(("B", "C"), {(1, 1): 4, (3, 3): 6})
    return {"R": r, "S": s}


@pytest.fixture
def fig2():
    """The operator-illustration instance over (R+, +, *)."""
    r = AnnotatedRelation(("A", "B"), {(1, 1): 1, (2, 1): 2})
    s = AnnotatedRelation(("B", "C"), {(1, 1): 3, (1, 2): 4})
    return {"R": r, "S": s}


def ordering(*items):
    return AggregationOrdering(tuple(items))
