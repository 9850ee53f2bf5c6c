import pytest
from hypothesis import given, strategies as st

from oracles import brute_fundamental_unit, reduced_definite_forms_naive
from qdrin.errors import BoundExceeded, InvalidPair, SearchExhausted
from qdrin.quadorders import (
    QuadOrder,
    class_group,
    class_number_formula,
    compose,
    form_class_number,
    fundamental_unit,
    match_conductor,
    principal_form,
    reduce_definite,
    reduced_definite_forms,
)

SQUAREFREE_NEG = [-1, -2, -3, -5, -6, -7, -11, -14, -15, -21, -23, -26, -47, -71, -89]
SQUAREFREE_POS = [2, 3, 5, 6, 7, 10, 13, 15, 21, 29, 34, 79, 82, 94]


def test_class_group_examples():
    cg = class_group(QuadOrder(-23))
    assert cg.h == 3 and cg.invariant_factors == [3]
    assert class_group(QuadOrder(-1)).h == 1
    assert class_group(QuadOrder(5)).h == 1
    assert class_group(QuadOrder(-21)).invariant_factors == [2, 2]


def test_elementary_two_group():
    cg = class_group(QuadOrder(-21))
    assert cg.order_ref.discriminant == -84
    for a, b, c in cg.forms:
        assert b == 0 or a == b or a == c


@pytest.mark.parametrize("D", [-3, -4, -7, -8, -15, -20, -23, -47, -84, -99, -140, -231, -420, -1155, -3299])
def test_definite_forms_against_naive(D):
    assert sorted(reduced_definite_forms(D)) == sorted(reduced_definite_forms_naive(D))


def test_formula_examples():
    o = QuadOrder(-1, 2)
    assert o.discriminant == -16
    assert class_number_formula(o) == form_class_number(-16) == len(reduced_definite_forms_naive(-16)) == 1
    o = QuadOrder(5, 2)
    assert o.discriminant == 20
    assert class_number_formula(o) == form_class_number(20) == 1


@pytest.mark.parametrize("d", SQUAREFREE_NEG + SQUAREFREE_POS)
@pytest.mark.parametrize("f", [1, 2, 3, 5, 6])
def test_formula_agrees_with_forms(d, f):
    o = QuadOrder(d, f)
    assert class_number_formula(o) == form_class_number(o.discriminant)


@pytest.mark.parametrize("d", SQUAREFREE_POS)
def test_fundamental_unit_against_pell_search(d):
    u = fundamental_unit(d)
    assert (u.x, u.y, u.norm) == brute_fundamental_unit(d)


@pytest.mark.parametrize("d", SQUAREFREE_POS)
def test_narrow_doubles_iff_unit_norm_positive(d):
    wide = class_group(QuadOrder(d)).h
    narrow = class_group(QuadOrder(d), narrow=True).h
    assert narrow == (2 * wide if fundamental_unit(d).norm == 1 else wide)
    assert class_number_formula(QuadOrder(d), narrow=True) == narrow


@given(st.sampled_from(SQUAREFREE_NEG + SQUAREFREE_POS), st.integers(1, 6), st.integers(1, 5))
def test_class_number_divides_under_nesting(d, f, g):
    assert class_group(QuadOrder(d, f * g)).h % class_group(QuadOrder(d, f)).h == 0


@given(st.sampled_from([-23, -47, -71, -84, -140, -231, -420, -3299]), st.data())
def test_inverse_composes_to_principal(D, data):
    forms = reduced_definite_forms(D)
    a, b, c = data.draw(st.sampled_from(forms))
    assert reduce_definite(compose((a, b, c), (a, -b, c))) == principal_form(D)


def test_match_conductor():
    fp, inv, _ = match_conductor(-3, 1)
    assert fp == 1 and inv == []
    with pytest.raises(InvalidPair):
        match_conductor(-1, 1)
    with pytest.raises(SearchExhausted):
        match_conductor(-23, 1, bound=200)


def test_bounds():
    with pytest.raises(BoundExceeded):
        class_group(QuadOrder(-23, 100), bound=1000)
    with pytest.raises(ValueError):
        QuadOrder(4)
