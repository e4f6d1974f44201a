from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from gapcert.errors import GroupMismatch, InvalidGroup, NoNormalForm, UnknownSymbol
from gapcert.group import (GroupDescriptor, GroupRingElement, ball, cyclic, free_abelian,
                           free_group, load_group, normalize, parse_element, symmetric3)


def el(g, text):
    return parse_element(g, text)


def test_normalize_examples(z2, f2, c4):
    assert normalize("s t s^-1", z2) == z2.normalize("t")
    assert normalize("s s^-1 t", f2) == f2.normalize("t")
    assert normalize("s^3 s^2", c4) == c4.normalize("s")


def test_normalize_idempotent_through_words(f2, z2, s3):
    for g in (f2, z2, s3):
        for key in ball(g, 3):
            assert g.normalize(g.word(key)) == key


def test_unknown_symbol(z2):
    with pytest.raises(UnknownSymbol):
        z2.normalize("s q")


def test_free_with_relators_has_no_normal_form():
    g = GroupDescriptor(("a", "b"), ("a b a^-1 b^-1",), "free")
    with pytest.raises(NoNormalForm):
        g.normalize("a b")


def test_invalid_tables():
    with pytest.raises(InvalidGroup):
        GroupDescriptor(("s",), (), "table", ((0, 1), (0, 1)))
    with pytest.raises(InvalidGroup):
        GroupDescriptor(("s", "s"), (), "abelian")
    # Latin square without associativity (a loop of order 5)
    loop = ((0, 1, 2, 3, 4), (1, 0, 3, 4, 2), (2, 4, 0, 1, 3), (3, 2, 4, 0, 1), (4, 3, 1, 2, 0))
    with pytest.raises(InvalidGroup):
        GroupDescriptor(("s",), (), "table", loop)


def test_relators_hold_in_table_groups(c4, s3):
    for g in (c4, s3):
        for r in g.relators:
            assert g.normalize(r) == g.identity


def test_products():
    z = free_abelian(1)
    assert el(z, "1 - s") * el(z, "1 + s") == el(z, "1 - s^2")
    assert el(z, "1 - s^-1") * el(z, "1 - s") == el(z, "2 - s - s^-1")
    a = el(z, "3 s - 1/2 s^-2")
    assert GroupRingElement.one(z) * a == a


def test_star_and_augmentation(z1):
    assert el(z1, "2 - 3 s").star() == el(z1, "2 - 3 s^-1")
    assert el(z1, "2 - s - s^-1").augmentation() == 0
    assert el(z1, "1 - 2 s").norms() == (3, 5)


def test_group_mismatch(z1, z2):
    with pytest.raises(GroupMismatch):
        el(z1, "s") * el(z2, "s")


def test_ball_sizes(z2, f2, c4, s3):
    assert [len(ball(z2, r)) for r in range(4)] == [1, 5, 13, 25]
    assert [len(ball(f2, r)) for r in range(3)] == [1, 5, 17]
    assert len(ball(c4, 5)) == 4
    assert s3.order == 6 and s3.diameter == 3
    assert ball(z2, 1)[:3] == [z2.identity, z2.normalize("s"), z2.normalize("s^-1")]


def test_string_and_json_roundtrip(z2, s3, tmp_path):
    a = el(z2, "2 - 1/3 s t^-1 + 5 t^2")
    assert el(z2, str(a)) == a
    assert GroupRingElement.from_json(z2, a.to_json()) == a
    path = tmp_path / "s3.json"
    import json
    path.write_text(json.dumps(s3.to_json()))
    assert load_group(path) == s3


def test_float_coefficients_become_rationals(z1):
    a = GroupRingElement(z1, {z1.identity: 0.25})
    assert a[z1.identity] == Fraction(1, 4)


GROUPS = [free_abelian(2), free_group(2), cyclic(5), symmetric3()]


@st.composite
def elements(draw, g):
    keys = ball(g, 2)
    coeffs = draw(st.dictionaries(st.sampled_from(keys), st.integers(-4, 4), max_size=5))
    return GroupRingElement(g, coeffs)


@st.composite
def triples(draw):
    g = draw(st.sampled_from(GROUPS))
    return draw(elements(g)), draw(elements(g)), draw(elements(g))


@settings(max_examples=60, deadline=None)
@given(triples())
def test_ring_axioms(t):
    a, b, c = t
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert (a * b).star() == b.star() * a.star()
    assert (a * b).augmentation() == a.augmentation() * b.augmentation()
    assert a.star().star() == a
