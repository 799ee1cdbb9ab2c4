import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from d8tetra.index_ring import (
    F2_RING, Z4_RING, CohRingElement, DegreeOutOfRange, GradedIdeal, RingMismatch, Verdict, contains,
    ideal_contains_ideal, mod2_reduce_element, mod2_reduce_ideal, no_map_verdict, parse_element, parse_ideal,
)


def test_parse_and_print():
    assert str(parse_element("2U^2")) == "2U^2"
    assert str(parse_element("U^3 + 2U")) == "2U + U^3"
    assert str(parse_element("eu^2")) == "e*u^2"
    assert parse_element("5U").coefficient(2) == 1
    assert parse_element("e*e").is_zero
    with pytest.raises(RingMismatch):
        parse_element("U + u")


def test_odd_degrees_vanish_integrally():
    x = CohRingElement.make(Z4_RING, {1: 3, 2: 2})
    assert x.degrees() == [2]


def test_f2_multiplication_has_e_squared_zero():
    e = parse_element("e")
    u = parse_element("u")
    assert (e * e).is_zero
    assert str(e * u * u) == "e*u^2"


def test_ideal_tables():
    idx = parse_ideal("<2U^2>")
    assert idx.table[2] == 4 and idx.table[4] == 2 and idx.table[6] == 2
    assert idx.subgroup(4) == [0, 2]
    assert str(parse_ideal("<U^3>")) == "<U^3>"
    assert str(parse_ideal("<eu^2, u^3>")) == "<e*u^2, u^3>"


def test_contains():
    assert not contains(parse_ideal("<U^3>"), "2U^2")
    assert contains(parse_ideal("<U^2>"), "2U^2")
    assert contains(parse_ideal("<U^2>"), "U^5")
    with pytest.raises(DegreeOutOfRange):
        contains(parse_ideal("<U^2>", degree_bound=4), "U^3")
    with pytest.raises(RingMismatch):
        contains(parse_ideal("<U^2>"), parse_element("u"))


def test_ideal_inclusion_and_verdicts():
    assert ideal_contains_ideal(parse_ideal("<U^2>"), parse_ideal("<2U^2>"))
    assert not ideal_contains_ideal(parse_ideal("<U^3>"), parse_ideal("<2U^2>"))
    assert no_map_verdict(parse_ideal("<U^3>"), parse_ideal("<2U^2>")) is Verdict.NO_EQUIVARIANT_MAP
    assert no_map_verdict(parse_ideal("<U^2>"), parse_ideal("<2U^2>")) is Verdict.INCONCLUSIVE


def test_mod2_reduction():
    assert mod2_reduce_element(parse_element("2U^2")).is_zero
    assert str(mod2_reduce_element(parse_element("U^3"))) == "u^3"
    assert mod2_reduce_ideal(parse_ideal("<2U^2>")).is_zero()
    assert mod2_reduce_ideal(parse_ideal("<U^3>")) == parse_ideal("<u^3>")
    with pytest.raises(RingMismatch):
        mod2_reduce_ideal(parse_ideal("<u>"))


def test_from_table_rejects_non_ideal():
    with pytest.raises(ValueError):
        GradedIdeal.from_table(Z4_RING, {0: 0, 2: 1, 4: 4}, 4)
    i = GradedIdeal.from_table(F2_RING, {0: 2, 1: 2, 2: 2, 3: 2, 4: 1}, 4)
    assert str(i) == "<u^2>"


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(1, 4), st.integers(1, 3)), min_size=1, max_size=3))
def test_generated_ideal_is_closed_under_multiplication_by_u(gens):
    elems = [CohRingElement.mono(Z4_RING, 2 * k, c) for k, c in gens]
    ideal = GradedIdeal(Z4_RING, elems, 12)
    u = CohRingElement.mono(Z4_RING, 2)
    for g in elems:
        x = g
        while max(x.degrees(), default=0) <= 10 and not x.is_zero:
            assert ideal.contains(x)
            x = x * u
    assert ideal == GradedIdeal(Z4_RING, ideal.minimal_generators(), 12)
