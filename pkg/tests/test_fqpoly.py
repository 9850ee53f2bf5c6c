import itertools
import random

import pytest
from hypothesis import given, strategies as st

from qdrin.errors import DivisionByZero, DivisionByZeroPoly, FieldMismatch, NonPrime
from qdrin.fqpoly import (
    APoly,
    FieldElement,
    FieldSpec,
    embedding,
    frobenius,
    make_extension,
    make_field,
    parse_apoly,
    prime_field,
)

FIELDS = [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1), (5, 2), (7, 1)]


def smallest_irreducible_quadratic(p):
    """Brute force: first monic x^2 + b x + c (ordered by c + b p) without a root mod p."""
    for code in range(p * p):
        c, b = code % p, code // p
        if all((x * x + b * x + c) % p for x in range(p)):
            return [c, b, 1]


def test_make_field_moduli():
    assert make_field(2, 1).modulus == (0, 1)
    assert list(make_field(2, 2).modulus) == [1, 1, 1]
    assert list(make_field(3, 2).modulus) == smallest_irreducible_quadratic(3) == [1, 0, 1]
    assert list(make_field(5, 2).modulus) == smallest_irreducible_quadratic(5)


def test_nonprime_rejected():
    with pytest.raises(NonPrime):
        make_field(6, 1)
    with pytest.raises(NonPrime):
        FieldSpec(4, 1, [0, 1])


def test_reducible_modulus_rejected():
    with pytest.raises(ValueError):
        FieldSpec(2, 2, [1, 0, 1])  # x^2 + 1 = (x + 1)^2


def test_f4_generator_square():
    F4 = make_field(2, 2)
    g = F4.gen
    assert frobenius(g, 1) == g * g == g + 1
    assert frobenius(F4.zero, 3) == F4.zero


def test_fermat_in_prime_field():
    F = prime_field(7)
    for x in F.elements():
        assert frobenius(x, 1) == x


@pytest.mark.parametrize("p,n", FIELDS)
def test_field_axioms(p, n):
    F = make_field(p, n)
    rng = random.Random(p * 100 + n)
    for _ in range(1000):
        a, b, c = (F.random_element(rng) for _ in range(3))
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a + b == b + a and a * b == b * a
        assert a - a == F.zero
        if a:
            assert a * a.inverse() == F.one


@pytest.mark.parametrize("p,n", FIELDS)
def test_frobenius_is_automorphism_of_order_n(p, n):
    F = make_field(p, n)
    rng = random.Random(n)
    for _ in range(200):
        a, b = F.random_element(rng), F.random_element(rng)
        assert frobenius(a + b) == frobenius(a) + frobenius(b)
        assert frobenius(a * b) == frobenius(a) * frobenius(b)
        assert frobenius(a, n) == a


@pytest.mark.parametrize("p,n,m", [(2, 1, 3), (2, 2, 2), (3, 1, 4), (3, 2, 2), (2, 2, 3)])
def test_extension_frobenius(p, n, m):
    base = make_field(p, n)
    L = make_extension(base, m)
    assert L.order == base.q ** m
    rng = random.Random(m)
    xs = [L.random_element(rng) for _ in range(100)]
    for x in xs:
        assert L.frob_q(x, m) == x  # x^(q^m) = x
        assert L.frob_q(x) == x ** base.q
    fixed = [x for x in L.elements() if L.frob_q(x) == x] if L.order <= 256 else None
    if fixed is not None:
        assert len(fixed) == base.q  # Frobenius fixes exactly the base


def test_embedding_is_homomorphism():
    base = make_field(2, 1)
    L2, L4 = make_extension(base, 2), make_extension(base, 4)
    e = embedding(L2, L4)
    for x, y in itertools.product(L2.elements(), repeat=2):
        assert e(x + y) == e(x) + e(y)
        assert e(x * y) == e(x) * e(y)
    assert e(L2.one) == L4.one


def test_mixed_fields_rejected():
    F4, F9 = make_field(2, 2), make_field(3, 2)
    with pytest.raises(FieldMismatch):
        F4.gen + F9.gen


def test_zero_inverse():
    with pytest.raises(DivisionByZero):
        make_field(3, 2).zero.inverse()


def test_apoly_examples():
    F2 = prime_field(2)
    T = APoly.x(F2)
    assert (T + 1) * (T + 1) == T * T + 1
    assert (T * T + 1).gcd(T + 1) == T + 1
    F3 = prime_field(3)
    T3 = APoly.x(F3)
    q, r = divmod(T3 ** 3, T3 ** 2 + 1)
    assert q == T3 and r == APoly(F3, [0, 2])
    assert APoly(F3).degree == -1


def test_apoly_division_by_zero():
    F3 = prime_field(3)
    with pytest.raises(DivisionByZeroPoly):
        divmod(APoly.x(F3), APoly(F3))


def test_parse_formats():
    F4 = make_field(2, 2)
    assert F4.parse("g+1") == F4.gen + 1
    a = parse_apoly("T^2+g*T+1", F4)
    assert a.degree == 2 and a[1] == F4.gen
    with pytest.raises(ValueError):
        prime_field(3).parse("g")  # prime fields have no generator symbol
    assert F4.from_json(F4.to_json()) == F4


@given(st.lists(st.integers(0, 8), max_size=7), st.lists(st.integers(0, 8), min_size=1, max_size=5))
def test_divmod_round_trip(a, b):
    F = make_field(3, 2)
    A = APoly(F, [FieldElement(F, x) for x in a])
    B = APoly(F, [FieldElement(F, x) for x in b])
    if B.degree < 0:
        return
    q, r = divmod(A, B)
    assert q * B + r == A
    assert r.degree < B.degree
