import random
from fractions import Fraction

import mpmath
import pytest
import sympy
from hypothesis import given, strategies as st

from qdrin.algebraic import (
    AlgebraicReal,
    NumberField,
    adjoin,
    field_of,
    hnf,
    integer_left_kernel,
    lll,
    select_root,
)


def test_sqrt_and_arithmetic():
    s2 = AlgebraicReal.sqrt(2)
    s3 = AlgebraicReal.sqrt(3)
    assert s2.poly == (-2, 0, 1)
    assert (s2 * s2) == 2
    t = s2 + s3
    assert t.poly == (1, 0, -10, 0, 1)
    with mpmath.workprec(120):
        assert abs(t.approx(100) - (mpmath.sqrt(2) + mpmath.sqrt(3))) < mpmath.mpf(2) ** -90
    assert (s2 - s2) == 0
    assert (s2 / s2) == 1
    assert s2.nth_root(2).poly == (-2, 0, 0, 0, 1)
    assert s2.floor() == 1 and (-s2).floor() == -2


def test_comparisons():
    a = AlgebraicReal.sqrt(2)
    b = AlgebraicReal.rational(Fraction(141421, 100000))
    assert b < a < AlgebraicReal.rational(Fraction(3, 2))
    assert a != AlgebraicReal.sqrt(3)
    assert a.sign() == 1 and (-a).sign() == -1


def test_interval_must_isolate():
    with pytest.raises(ValueError):
        AlgebraicReal((-2, 0, 1), -2, 2)  # contains both roots
    with pytest.raises(ValueError):
        AlgebraicReal((4, 0, -1), 0, 3)  # x^2 - 4 is reducible


def test_select_root_picks_the_right_one():
    r = select_root([(-2, 0, 1)], lambda bits: -mpmath.sqrt(2))
    assert r < 0 and r.poly == (-2, 0, 1)


def test_json_round_trip():
    a = AlgebraicReal.sqrt(5) - 2
    assert AlgebraicReal.from_json(a.to_json()) == a
    assert AlgebraicReal.from_json({"min_poly": [-5, 0, 1], "interval": [2, 3]}) == AlgebraicReal.sqrt(5)


@given(st.integers(-30, 30), st.integers(-30, 30).filter(bool), st.integers(2, 30))
def test_field_arithmetic_matches_numerics(a, b, d):
    x = AlgebraicReal.rational(a) + AlgebraicReal.rational(b) * AlgebraicReal.sqrt(d)
    with mpmath.workprec(140):
        ref = a + b * mpmath.sqrt(d)
        assert abs(x.approx(100) - ref) < mpmath.mpf(2) ** -90


def test_number_field_contains_and_adjoin():
    s2, s3 = AlgebraicReal.sqrt(2), AlgebraicReal.sqrt(3)
    K = NumberField(s2)
    assert K.contains(s2 * 3 + 1) == (1, 3)
    assert K.contains(s3) is None
    F, th, b = adjoin(K, s3)
    assert F.degree == 4
    assert F.element(th).to_real() == s2 and F.element(b).to_real() == s3
    K2, coords = field_of([AlgebraicReal.sqrt(8), s2 + 1])
    assert K2.degree == 2
    assert K2.element(coords[0]).to_real() == AlgebraicReal.sqrt(8)


def test_minimal_polynomial_of_elements():
    K = NumberField(AlgebraicReal.rational(2).nth_root(4))
    x = K.gen() ** 2
    assert x.to_real() == AlgebraicReal.sqrt(2)
    ref = sympy.minimal_polynomial(sympy.root(2, 4) ** 2 + 1, sympy.Symbol("x"))
    assert (x + 1).to_real().poly == tuple(int(c) for c in reversed(sympy.Poly(ref).all_coeffs()))


def test_lll_reduces():
    B = [[1, 0, 0, 12345], [0, 1, 0, 23456], [0, 0, 1, 34567]]
    R = lll(B)
    gram = lambda X: (sympy.Matrix(X) * sympy.Matrix(X).T).det()
    assert gram(R) == gram(B)  # same lattice volume
    assert max(abs(x) for x in R[0]) < 200


def test_hnf_and_kernel():
    rng = random.Random(2)
    for _ in range(20):
        M = [[rng.randint(-5, 5) for _ in range(3)] for _ in range(4)]
        K = integer_left_kernel(M)
        for row in K:
            assert all(sum(row[i] * M[i][j] for i in range(4)) == 0 for j in range(3))
        H, U, rank = hnf(M)
        assert rank == sympy.Matrix(M).rank()
        prod = [[sum(U[i][k] * M[k][j] for k in range(4)) for j in range(3)] for i in range(4)]
        assert prod == H
