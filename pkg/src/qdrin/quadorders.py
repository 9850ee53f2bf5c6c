"""Orders Z + f*O_K in quadratic fields, their class groups and units.

Classes are counted with binary quadratic forms ax^2 + bxy + cy^2 of
discriminant D = f^2 * D_K.  For D < 0 a class is a reduced positive
definite form; for D > 0 it is a cycle of reduced indefinite forms under the
reduction operator, and wide classes identify a cycle with its negation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from sympy import factorint

from .errors import BoundExceeded, InvalidPair, SearchExhausted

DEFAULT_BOUND = 10 ** 8
DEFAULT_CONDUCTOR_BOUND = 10 ** 4

Form = tuple[int, int, int]


def is_squarefree(n: int) -> bool:
    return n != 0 and all(e == 1 for e in factorint(abs(n)).values())


def fundamental_discriminant(d: int) -> int:
    return d if d % 4 == 1 else 4 * d


def kronecker(D: int, p: int) -> int:
    """Kronecker symbol (D/p) for a prime p."""
    if D % p == 0:
        return 0
    if p == 2:
        return 1 if D % 8 in (1, 7) else -1
    return 1 if pow(D % p, (p - 1) // 2, p) == 1 else -1


@dataclass(frozen=True)
class QuadOrder:
    """The order of conductor ``f`` in Q(sqrt(d))."""

    d: int
    f: int = 1

    def __post_init__(self):
        if self.d in (0, 1) or not is_squarefree(self.d):
            raise ValueError(f"d = {self.d} must be a squarefree integer other than 0, 1")
        if self.f < 1:
            raise ValueError("conductor must be >= 1")

    @property
    def fundamental_discriminant(self) -> int:
        return fundamental_discriminant(self.d)

    @property
    def discriminant(self) -> int:
        return self.f ** 2 * self.fundamental_discriminant

    def to_json(self) -> dict:
        return {"d": self.d, "f": self.f, "discriminant": self.discriminant}


# ---------------------------------------------------------------------------
# Forms


def principal_form(D: int) -> Form:
    if D % 4 == 0:
        return (1, 0, -D // 4)
    return (1, 1, (1 - D) // 4)


def reduced_definite_forms(D: int) -> list[Form]:
    """Reduced primitive positive definite forms of discriminant D < 0."""
    out = []
    amax = math.isqrt(-D // 3)
    for a in range(1, amax + 1):
        for b in range(-a + 1, a + 1):
            if (b - D) % 2:
                continue
            num = b * b - D
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a or (c == a and b < 0):
                continue
            if math.gcd(math.gcd(a, b), c) == 1:
                out.append((a, b, c))
    return out


def reduce_definite(f: Form) -> Form:
    a, b, c = f
    while True:
        if a > c or (a == c and b < 0):
            a, b, c = c, -b, a
            continue
        if b > a or b <= -a:
            k = (a - b) // (2 * a)
            b2 = b + 2 * k * a
            c = (b2 * b2 - (b * b - 4 * a * c)) // (4 * a)
            b = b2
            continue
        return (a, b, c)


def is_reduced_indefinite(f: Form, D: int) -> bool:
    a, b, c = f
    s = math.isqrt(D)
    # 0 < b < sqrt(D) and sqrt(D) - b < 2|a| < sqrt(D) + b, with sqrt(D) irrational
    return 0 < b <= s and (2 * abs(a) + b) > s and abs(2 * abs(a) - b) <= s


def reduced_indefinite_forms(D: int) -> list[Form]:
    """Reduced primitive indefinite forms of non-square discriminant D > 0."""
    out = []
    s = math.isqrt(D)
    for b in range(1, s + 1):
        if (D - b) % 2:
            continue
        N = (D - b * b) // 4
        if N <= 0:
            continue
        for A in _divisors(N):
            C = N // A
            if A - b < C < A + b and math.gcd(math.gcd(A, b), C) == 1:
                out.append((A, b, -C))
                out.append((-A, b, C))
    return out


def _divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factorint(n).items():
        divs = [d * p ** k for d in divs for k in range(e + 1)]
    return divs


def rho(f: Form, D: int) -> Form:
    """One step of the indefinite reduction operator."""
    a, b, c = f
    s = math.isqrt(D)
    ac = abs(c)
    if ac > s:
        # reduce b' = -b into (-|c|, |c|]
        r = (-b) % (2 * ac)
        if r > ac:
            r -= 2 * ac
    else:
        r = s - ((s + b) % (2 * ac))
    return (c, r, (r * r - D) // (4 * c))


def reduce_indefinite(f: Form, D: int) -> Form:
    while not is_reduced_indefinite(f, D):
        f = rho(f, D)
    return f


def compose(f1: Form, f2: Form) -> Form:
    """Dirichlet composition of primitive forms of equal discriminant (unreduced)."""
    a1, b1, c1 = f1
    a2, b2, c2 = f2
    D = b1 * b1 - 4 * a1 * c1
    e = (b1 + b2) // 2
    g1, u1, v1 = _xgcd(a1, a2)
    g, s, w = _xgcd(g1, e)
    u, v = s * u1, s * v1
    a3 = a1 * a2 // (g * g)
    b3 = (u * a1 * b2 + v * a2 * b1 + w * (b1 * b2 + D) // 2) // g
    b3 %= 2 * abs(a3)
    c3 = (b3 * b3 - D) // (4 * a3)
    return (a3, b3, c3)


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


class _ClassSet:
    """Canonical labels for the classes of one discriminant."""

    def __init__(self, D: int, narrow: bool = False):
        self.D = D
        self.narrow = narrow
        if D < 0:
            self.forms = reduced_definite_forms(D)
            self.label = {f: f for f in self.forms}
        else:
            forms = reduced_indefinite_forms(D)
            cycle_of = {}
            cycles = []
            for f in forms:
                if f in cycle_of:
                    continue
                cyc = [f]
                g = rho(f, D)
                while g != f:
                    cyc.append(g)
                    g = rho(g, D)
                rep = min(cyc)
                for g in cyc:
                    cycle_of[g] = rep
                cycles.append(rep)
            self.cycles = cycles
            if narrow:
                self.label = cycle_of
            else:
                self.label = {
                    g: min(r, cycle_of[(-r[0], r[1], -r[2])]) for g, r in cycle_of.items()}
            self.forms = sorted(set(self.label.values()))

    def canon(self, f: Form) -> Form:
        if self.D < 0:
            return reduce_definite(f)
        return self.label[reduce_indefinite(f, self.D)]

    def identity(self) -> Form:
        return self.canon(principal_form(self.D))

    def mul(self, x: Form, y: Form) -> Form:
        return self.canon(compose(x, y))

    def power(self, x: Form, k: int) -> Form:
        result, base = self.identity(), x
        while k:
            if k & 1:
                result = self.mul(result, base)
            k >>= 1
            if k:
                base = self.mul(base, base)
        return result


def abelian_invariants(elements, power, identity, h: int) -> list[int]:
    """Invariant factors d_1 | d_2 | ... of a finite abelian group of order h."""
    by_prime = []
    for p, e in factorint(h).items():
        counts = [1]
        j = 0
        while counts[-1] < p ** e:
            j += 1
            counts.append(sum(1 for x in elements if power(x, p ** j) == identity))
        # number of cyclic factors of exponent >= j
        ge = [round(math.log(counts[j] // counts[j - 1], p)) for j in range(1, len(counts))]
        exps = []
        for j in range(len(ge)):
            nxt = ge[j + 1] if j + 1 < len(ge) else 0
            exps.extend([j + 1] * (ge[j] - nxt))
        by_prime.append((p, sorted(exps, reverse=True)))
    width = max((len(x) for _, x in by_prime), default=0)
    factors = []
    for i in range(width):
        d = 1
        for p, exps in by_prime:
            if i < len(exps):
                d *= p ** exps[i]
        factors.append(d)
    return sorted(factors)


@dataclass
class ClassGroup:
    order_ref: QuadOrder
    invariant_factors: list[int]
    h: int
    forms: list[Form] = field(repr=False)
    narrow: bool = False

    def to_json(self) -> dict:
        return {
            "order": self.order_ref.to_json(),
            "h": self.h,
            "invariant_factors": self.invariant_factors,
            "narrow": self.narrow,
            "reduced_forms": [list(f) for f in self.forms],
        }


def _check_bound(D: int, bound: int):
    if abs(D) > bound:
        raise BoundExceeded(f"|D| = {abs(D)} exceeds the configured bound {bound}")


def form_class_number(D: int, narrow: bool = False) -> int:
    return len(_class_set(D, narrow).forms)


@lru_cache(maxsize=4096)
def _class_set(D: int, narrow: bool) -> _ClassSet:
    return _ClassSet(D, narrow)


def class_group(o: QuadOrder, narrow: bool = False, bound: int = DEFAULT_BOUND) -> ClassGroup:
    D = o.discriminant
    _check_bound(D, bound)
    cs = _class_set(D, narrow and D > 0)
    h = len(cs.forms)
    inv = abelian_invariants(cs.forms, cs.power, cs.identity(), h)
    return ClassGroup(o, inv, h, list(cs.forms), narrow and D > 0)


# ---------------------------------------------------------------------------
# Units and the conductor formula


@dataclass(frozen=True)
class FundUnit:
    """eps = (x + y*sqrt(D_K))/2 > 1 with x^2 - D_K*y^2 = 4*norm."""

    d: int
    x: int
    y: int
    norm: int

    @property
    def D_K(self) -> int:
        return fundamental_discriminant(self.d)

    def value(self, prec: int = 53):
        import mpmath
        with mpmath.workprec(prec):
            return (self.x + self.y * mpmath.sqrt(self.D_K)) / 2

    def to_json(self) -> dict:
        return {"d": self.d, "D_K": self.D_K, "x": self.x, "y": self.y, "norm": self.norm,
                "epsilon": f"({self.x} + {self.y}*sqrt({self.D_K}))/2"}


@lru_cache(maxsize=None)
def fundamental_unit(d: int) -> FundUnit:
    """Smallest unit > 1 of the maximal order of Q(sqrt(d)), by continued fractions."""
    if d <= 1 or not is_squarefree(d):
        raise ValueError(f"d = {d} must be a squarefree integer > 1")
    # expand (P + sqrt(d)) / Q
    if d % 4 == 1:
        P, Q = 1, 2
    else:
        P, Q = 0, 1
    s = math.isqrt(d)
    p0, p1 = 1, 0
    q0, q1 = 0, 1
    DK = fundamental_discriminant(d)
    while True:
        a = (P + s) // Q
        p0, p1 = a * p0 + p1, p0
        q0, q1 = a * q0 + q1, q0
        if d % 4 == 1:
            x, y = 2 * p0 - q0, q0
        else:
            x, y = 2 * p0, q0
        n = x * x - DK * y * y
        if n in (4, -4) and x > 0:
            return FundUnit(d, x, y, n // 4)
        P = a * Q - P
        Q = (d - P * P) // Q


def unit_index(d: int, f: int) -> int:
    """[O_K^x : O_f^x] for the order of conductor f in Q(sqrt(d))."""
    if f == 1:
        return 1
    if d < 0:
        return {-1: 2, -3: 3}.get(d, 1)
    u = fundamental_unit(d)
    DK = u.D_K
    n = (DK * DK - DK) // 4  # omega^2 = DK*omega - n
    a0, b0 = ((u.x - u.y * DK) // 2) % f, u.y % f
    a, b, k = a0, b0, 1
    while b % f:
        a, b = (a * a0 - n * b * b0) % f, (a * b0 + a0 * b + DK * b * b0) % f
        k += 1
    return k


def class_number_formula(o: QuadOrder, narrow: bool = False) -> int:
    """h(O_f) from h(O_K) via the conductor formula."""
    DK = o.fundamental_discriminant
    hK = form_class_number(DK)
    f = o.f
    num = hK * f
    den = 1
    for p in factorint(f):
        num *= p - kronecker(DK, p)
        den *= p
    idx = unit_index(o.d, f)
    h = num // (den * idx)
    assert h * den * idx == num
    if narrow and o.d > 0:
        norm = fundamental_unit(o.d).norm ** idx
        if norm == 1:
            h *= 2
    return h


def match_conductor(d_neg: int, f: int, bound: int = DEFAULT_CONDUCTOR_BOUND,
                    narrow: bool = False) -> tuple[int, list[int], int]:
    """Least f' with Cl(Z + f' O_K) isomorphic to Cl(Z + f O_k), K = Q(sqrt(-d_neg)).

    Returns (f', invariant factors, number of conductors tried).
    """
    if d_neg >= 0:
        raise ValueError("d_neg must be negative")
    if d_neg == -1:
        raise InvalidPair("d = -1 maps to Q(sqrt(1)), which is not a quadratic field")
    target = class_group(QuadOrder(d_neg, f)).invariant_factors
    h_target = math.prod(target)
    d_pos = -d_neg
    for fp in range(1, bound + 1):
        o = QuadOrder(d_pos, fp)
        if class_number_formula(o, narrow) != h_target:
            continue
        if class_group(o, narrow).invariant_factors == target:
            return fp, target, fp
    raise SearchExhausted(bound)


# ---------------------------------------------------------------------------
# Batch sweep over all discriminants up to a bound


def _definite_counts(N: int) -> np.ndarray:
    """counts[n] = number of reduced primitive forms of discriminant -n, n <= N."""
    counts = np.zeros(N + 1, dtype=np.int64)
    amax = math.isqrt(N // 3)
    for a in range(1, amax + 1):
        for b in range(-a + 1, a + 1):
            cmin = a if b >= 0 else a + 1
            cmax = (N + b * b) // (4 * a)
            if cmax < cmin:
                continue
            c = np.arange(cmin, cmax + 1, dtype=np.int64)
            c = c[np.gcd(math.gcd(a, b), c) == 1]
            np.add.at(counts, 4 * a * c - b * b, 1)
    return counts


def _indefinite_counts(N: int, narrow: bool = False) -> np.ndarray:
    """counts[D] = number of (wide or narrow) classes of discriminant D, 0 < D <= N."""
    As, Bs, Cs = [], [], []
    for b in range(1, math.isqrt(N) + 1):
        room = N - b * b
        if room < 4:
            break
        for A in range(1, room // 4 + 1):
            lo = max(1, A - b + 1)
            hi = min(A + b - 1, room // (4 * A))
            if hi < lo:
                if A > b and (A - b + 1) * 4 * A > room:
                    break
                continue
            C = np.arange(lo, hi + 1, dtype=np.int64)
            C = C[np.gcd(math.gcd(A, b), C) == 1]
            As.append(np.full(C.size, A, dtype=np.int64))
            Bs.append(np.full(C.size, b, dtype=np.int64))
            Cs.append(C)
    A = np.concatenate(As)
    b = np.concatenate(Bs)
    C = np.concatenate(Cs)
    D = b * b + 4 * A * C
    r = np.sqrt(D.astype(np.float64)).astype(np.int64)
    r -= (r * r > D)
    r += ((r + 1) * (r + 1) <= D)
    keep = r * r != D
    A, b, C, D, r = A[keep], b[keep], C[keep], D[keep], r[keep]
    # both signs: (A, b, -C) and (-A, b, C)
    a = np.concatenate([A, -A])
    c = np.concatenate([-C, C])
    b = np.concatenate([b, b])
    D = np.concatenate([D, D])
    s = np.concatenate([r, r])

    def key(D, a, b):
        return (D * 1024 + (a + 512)) * 512 + b

    keys = key(D, a, b)
    order = np.argsort(keys, kind="stable")
    skeys = keys[order]
    ac = np.abs(c)
    b2 = s - np.mod(s + b, 2 * ac)
    img = key(D, c, b2)
    pos = np.searchsorted(skeys, img)
    assert np.all(skeys[pos] == img), "reduction operator left the reduced set"
    nxt = order[pos]
    n = keys.size
    label = np.arange(n)
    hop = nxt.copy()
    while True:
        new = np.minimum(label, label[hop])
        if np.array_equal(new, label) and np.array_equal(label, label[nxt]):
            break
        label = new
        hop = hop[hop]
    heads = label == np.arange(n)
    if narrow:
        return np.bincount(D[heads], minlength=N + 1)
    neg = order[np.searchsorted(skeys, key(D, -a, b))]
    self_neg = heads & (label[neg] == np.arange(n))
    pair = heads & ~self_neg
    twice = 2 * np.bincount(D[self_neg], minlength=N + 1) + np.bincount(D[pair], minlength=N + 1)
    assert np.all(twice % 2 == 0)
    return twice // 2


def squarefree_part(n: int) -> tuple[int, int]:
    """(core, f) with n = core * f^2 and core squarefree, keeping the sign."""
    core, f = (1 if n > 0 else -1), 1
    for p, e in factorint(abs(n)).items():
        f *= p ** (e // 2)
        if e % 2:
            core *= p
    return core, f


def order_of_discriminant(D: int) -> QuadOrder:
    core, g = squarefree_part(D)
    DK = fundamental_discriminant(core)
    f = math.isqrt(D // DK)
    if f * f * DK != D:
        raise ValueError(f"{D} is not a quadratic discriminant")
    return QuadOrder(core, f)


def discriminants(N: int, sign: int) -> list[int]:
    out = []
    for n in range(2, N + 1):
        D = sign * n
        if D % 4 in (0, 1) and not (D > 0 and math.isqrt(D) ** 2 == D):
            out.append(D)
    return out


def class_number_sweep(N: int) -> dict:
    """Form-count and formula class numbers for every discriminant 0 < |D| <= N.

    Returns {D: (form_count, formula)}.
    """
    neg = _definite_counts(N)
    pos = _indefinite_counts(N)
    out = {}
    for sign, counts in ((-1, neg), (1, pos)):
        for D in discriminants(N, sign):
            o = order_of_discriminant(D)
            DK = o.fundamental_discriminant
            hK = int(counts[abs(DK)])
            out[D] = (int(counts[abs(D)]), _formula_from(o, hK))
    return out


def _formula_from(o: QuadOrder, hK: int) -> int:
    f = o.f
    num, den = hK * f, 1
    for p in factorint(f):
        num *= p - kronecker(o.fundamental_discriminant, p)
        den *= p
    idx = unit_index(o.d, f)
    h, rem = divmod(num, den * idx)
    return h if rem == 0 else -1
