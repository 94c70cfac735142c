import random

import pytest

from ajar import INF, QueryError, builtin_semirings, check_laws, get_semiring
from ajar.semirings import SemiringSpec, register_semiring


@pytest.mark.parametrize("name", ["int", "qplus", "minplus", "bool01"])
def test_laws_sampled(name):
    check_laws(get_semiring(name), random.Random(0), triples=300)


def test_bool01_multiply_idempotent_flag():
    sr = get_semiring("bool01")
    assert sr.multiply_idempotent
    for a in (0, 1):
        assert sr.multiply(a, a) == a


def test_int_not_idempotent():
    assert not get_semiring("int").multiply_idempotent


def test_minplus_zero_is_sentinel_infinity():
    sr = get_semiring("minplus")
    assert sr.zero is INF
    assert sr.one == 0
    assert sr.multiply(INF, 3) is INF
    assert sr.additive("min")(INF, 7) == 7
    assert INF > 10**12 and not INF < 5


def test_annotation_parsing():
    mp = get_semiring("minplus")
    assert mp.parse_annotation("inf") is INF
    assert mp.parse_annotation("4") == 4
    assert mp.format_annotation(INF) == "inf"
    with pytest.raises(QueryError):
        get_semiring("bool01").parse_annotation("2")
    with pytest.raises(QueryError):
        get_semiring("qplus").parse_annotation("-1/2")


def test_unknown_semiring_and_operator():
    with pytest.raises(QueryError):
        get_semiring("nosuch")
    with pytest.raises(QueryError):
        get_semiring("int").additive("max")


def test_registry_rejects_duplicates():
    with pytest.raises(QueryError):
        register_semiring(get_semiring("int"))


def test_builtins_listed():
    names = [s.name for s in builtin_semirings()]
    assert names == ["int", "qplus", "minplus", "bool01"]


def test_law_checker_catches_bad_semiring():
    broken = SemiringSpec(
        name="broken-test-only",
        domain="integer",
        additive_ops={"sum": lambda a, b: a - b},  # not commutative
        multiply=lambda a, b: a * b,
        zero=0,
        one=1,
    )
    with pytest.raises(AssertionError):
        check_laws(broken, random.Random(1), triples=50)
