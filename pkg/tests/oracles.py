"""Independent brute-force oracles used by the test-suite.

None of these call the routine they check; they are deliberately naive.
"""

import itertools
import math
from fractions import Fraction

from qdrin.fqpoly import APoly, embedding
from qdrin.skew import SkewPoly


def naive_eval(u: SkewPoly, x):
    emb = embedding(u.field, x.field) if u.field != x.field else (lambda c: c)
    acc = x.field.zero
    for i, c in enumerate(u.coeffs):
        acc = acc + emb(c) * x ** (u.twist ** i)
    return acc


def naive_rho(D, a: APoly) -> SkewPoly:
    """rho_a as sum a_k rho_T^k with repeated multiplication (no Horner)."""
    L = D.L
    acc = SkewPoly(L)
    power = SkewPoly(L, [L.one])
    for c in a.coeffs:
        acc = acc + power * L.embed_base(c)
        power = power * D.rho_T
    return acc


def brute_torsion(D, a: APoly, K) -> set:
    """All roots of rho_a in the field K, by enumeration."""
    u = naive_rho(D, a)
    return {x.value for x in K.elements() if not naive_eval(u, x)}


def additive_polynomial(u: SkewPoly) -> APoly:
    """sum c_i x^(q^i) as an ordinary polynomial over L."""
    L = u.field
    deg = u.twist ** u.degree
    coeffs = [L.zero] * (deg + 1)
    for i, c in enumerate(u.coeffs):
        coeffs[u.twist ** i] = c
    return APoly(L, coeffs, "x")


def splitting_degree(D, a: APoly) -> int:
    """[L(Lambda[a]) : L] from the distinct-degree factorisation of rho_a(x)/x."""
    P = additive_polynomial(naive_rho(D, a))
    x = APoly.x(D.L, "x")
    R = P // x
    Q = D.L.order
    degrees = []
    h = x % R if R.degree > 0 else x
    d = 0
    while R.degree > 0:
        d += 1
        h = h.powmod(Q, R)
        g = (h - x).gcd(R)
        if g.degree > 0:
            degrees.append(d)
            R = R // g
            h = h % R if R.degree > 0 else h
    return math.lcm(1, *degrees)


def brute_isogenies(D, E, max_deg: int) -> list:
    """Every nonzero u of tau-degree <= max_deg with u rho_T = rho~_T u."""
    L = D.L
    out = []
    elems = list(L.elements())
    for d in range(max_deg + 1):
        for cs in itertools.product(elems, repeat=d + 1):
            if not cs[-1]:
                continue
            u = SkewPoly(L, list(cs))
            if u * D.rho_T == E.rho_T * u:
                out.append(u)
    return out


# ---------------------------------------------------------------------------
# quadratic fields


def multiplier_ring_bruteforce(d: int, f: int, box: int = 12) -> list:
    """Multipliers x = (u + v sqrt d)/N of M = Z + (sqrt d / f) Z, as (a, b) with x = a + b sqrt d.

    Searches numerators |u|, |v| <= box*f and denominators N <= 2f.
    """
    def in_M(a, b):
        return a.denominator == 1 and (b * f).denominator == 1

    found = set()
    for N in range(1, 2 * f + 1):
        for u in range(-box * f, box * f + 1):
            for v in range(-box * f, box * f + 1):
                a, b = Fraction(u, N), Fraction(v, N)
                # x * 1 and x * sqrt(d)/f
                if in_M(a, b) and in_M(b * d / f, a / f):
                    found.add((a, b))
    return sorted(found)


def brute_fundamental_unit(d: int):
    """Smallest (x, y), y >= 1, with x^2 - D_K y^2 = +-4, giving eps = (x + y sqrt D_K)/2."""
    DK = d if d % 4 == 1 else 4 * d
    y = 1
    while True:
        for sign in (-4, 4):
            t = DK * y * y + sign
            if t > 0:
                x = math.isqrt(t)
                if x * x == t:
                    return x, y, sign // 4
        y += 1


def reduced_definite_forms_naive(D: int) -> list:
    """Primitive reduced forms (a, b, c), b^2 - 4ac = D < 0, |b| <= a <= c, b >= 0 if |b| = a or a = c."""
    out = []
    a = 1
    while 3 * a * a <= -D:
        for b in range(-a + 1, a + 1):
            if (b * b - D) % (4 * a):
                continue
            c = (b * b - D) // (4 * a)
            if c < a or (a == c and b < 0):
                continue
            if math.gcd(math.gcd(a, b), c) == 1:
                out.append((a, b, c))
        a += 1
    return out
