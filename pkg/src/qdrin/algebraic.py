"""Exact real algebraic numbers, real number fields and integer lattices.

An :class:`AlgebraicReal` is an irreducible primitive integer polynomial
together with a rational interval holding exactly one of its real roots.
Arithmetic builds the defining polynomial of the result with resultants and
picks the right factor by counting roots around a high-precision
approximant.  A :class:`NumberField` is Q(theta) for one such root, with
elements stored as rational coordinates in the power basis.
"""

from __future__ import annotations

import math
import numbers
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import mpmath
import sympy
from sympy import Poly, Rational, Symbol

from .errors import DegreeCapExceeded, ValidationError

X = Symbol("x")
Y = Symbol("y")
DEGREE_CAP = 64


# ---------------------------------------------------------------------------
# integer polynomials (ascending coefficient tuples)


def _to_sympy(p: Sequence[int], var=X) -> Poly:
    return Poly(list(reversed(p)), var, domain="ZZ")


def _from_sympy(P: Poly) -> tuple[int, ...]:
    return tuple(int(c) for c in reversed(P.all_coeffs()))


def primitive_part(p: Sequence) -> tuple[int, ...]:
    """Integer multiple of ``p`` with content 1 and positive leading coefficient."""
    fr = [Fraction(c) for c in p]
    while fr and fr[-1] == 0:
        fr.pop()
    if not fr:
        raise ValueError("zero polynomial")
    den = math.lcm(*(c.denominator for c in fr))
    ints = [int(c * den) for c in fr]
    g = math.gcd(*ints)
    if ints[-1] < 0:
        g = -g
    return tuple(c // g for c in ints)


def poly_eval(p: Sequence, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def irreducible_factors(p: Sequence[int]) -> list[tuple[int, ...]]:
    _, facs = _to_sympy(p).factor_list()
    return [primitive_part(_from_sympy(f)) for f, _ in facs if f.degree() > 0]


def is_irreducible(p: Sequence[int]) -> bool:
    return _to_sympy(p).is_irreducible


def format_poly(p: Sequence[int], var: str = "x") -> str:
    terms = []
    for i in range(len(p) - 1, -1, -1):
        c = p[i]
        if not c:
            continue
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        if mono and abs(c) == 1:
            s = mono
        elif mono:
            s = f"{abs(c)}*{mono}"
        else:
            s = str(abs(c))
        terms.append(("-" if c < 0 else "+", s))
    if not terms:
        return "0"
    out = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sign, s in terms[1:]:
        out += f" {sign} {s}"
    return out


def _frac(v: mpmath.mpf) -> Fraction:
    sign, man, exp, _ = mpmath.mpf(v)._mpf_
    x = Fraction(int(man)) * (Fraction(2) ** int(exp))
    return -x if sign else x


def _count_roots(p: Sequence[int], lo: Fraction, hi: Fraction) -> int:
    return _sympy_cached(tuple(p)).count_roots(
        Rational(lo.numerator, lo.denominator), Rational(hi.numerator, hi.denominator))


@lru_cache(maxsize=4096)
def _sympy_cached(p: tuple[int, ...]) -> Poly:
    return _to_sympy(p)


# ---------------------------------------------------------------------------
# AlgebraicReal


class AlgebraicReal:
    """A real root of an irreducible integer polynomial, isolated by [lo, hi]."""

    __slots__ = ("poly", "lo", "hi", "_approx")

    def __init__(self, poly: Sequence[int], lo, hi, check: bool = True):
        poly = primitive_part(poly)
        lo, hi = Fraction(lo), Fraction(hi)
        if len(poly) - 1 > DEGREE_CAP:
            raise DegreeCapExceeded(f"degree {len(poly) - 1} exceeds cap {DEGREE_CAP}")
        if len(poly) == 2:
            r = Fraction(-poly[0], poly[1])
            if check and not lo <= r <= hi:
                raise ValueError("interval does not contain the rational root")
            lo = hi = r
        elif check:
            if not is_irreducible(poly):
                raise ValueError(f"{format_poly(poly)} is not irreducible")
            if lo > hi or _count_roots(poly, lo, hi) != 1:
                raise ValueError("interval does not isolate exactly one root")
        self.poly = poly
        self.lo = lo
        self.hi = hi
        self._approx = None

    # constructors

    @classmethod
    def rational(cls, r) -> "AlgebraicReal":
        r = Fraction(r)
        return cls((-r.numerator, r.denominator), r, r, check=False)

    @classmethod
    def sqrt(cls, n) -> "AlgebraicReal":
        n = Fraction(n)
        if n < 0:
            raise ValueError("square root of a negative number is not real")
        return cls.rational(n).nth_root(2)

    @classmethod
    def coerce(cls, x) -> "AlgebraicReal":
        if isinstance(x, AlgebraicReal):
            return x
        if isinstance(x, (numbers.Rational, Fraction)):
            return cls.rational(Fraction(int(x.numerator), int(x.denominator)))
        if isinstance(x, str):
            return cls.from_json(x)
        raise TypeError(f"cannot convert {x!r} to an algebraic real")

    @classmethod
    def from_sympy(cls, expr) -> "AlgebraicReal":
        expr = sympy.sympify(expr)
        if expr.is_Rational:
            return cls.rational(Fraction(int(expr.p), int(expr.q)))
        mp = sympy.minimal_polynomial(expr, X, polys=True)
        p = primitive_part(_from_sympy(mp))
        return select_root([p], lambda bits: mpmath.mpf(sympy.N(expr, int(bits * 0.302) + 10)))

    @classmethod
    def from_json(cls, obj) -> "AlgebraicReal":
        """An object with min_poly and interval, a rational, or a real sympy expression string."""
        if isinstance(obj, int):
            return cls.rational(obj)
        if isinstance(obj, str):
            try:
                return cls.rational(Fraction(obj))
            except ValueError:
                pass
            try:
                expr = sympy.sympify(obj, rational=True)
            except (sympy.SympifyError, TypeError) as exc:
                raise ValidationError(f"cannot read {obj!r}: {exc}") from None
            if not expr.is_real:
                raise ValidationError(f"{obj!r} is not a real number")
            try:
                return cls.from_sympy(expr)
            except (ValueError, TypeError, NotImplementedError) as exc:
                raise ValidationError(f"{obj!r} is not algebraic: {exc}") from None
        try:
            lo, hi = (Fraction(v) for v in obj["interval"])
            return cls([int(c) for c in obj["min_poly"]], lo, hi)
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"bad algebraic number: {exc}") from None

    def to_json(self) -> dict:
        return {"min_poly": list(self.poly), "interval": [str(self.lo), str(self.hi)],
                "approx": mpmath.nstr(self.approx(64), 15)}

    # basic properties

    @property
    def degree(self) -> int:
        return len(self.poly) - 1

    def is_rational(self) -> bool:
        return self.degree == 1

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("not a rational number")
        return self.lo

    def is_algebraic_integer(self) -> bool:
        return self.poly[-1] == 1

    def __repr__(self):
        if self.is_rational():
            return f"AlgebraicReal({self.lo})"
        return f"AlgebraicReal({format_poly(self.poly)}, [{self.lo}, {self.hi}])"

    def __str__(self):
        if self.is_rational():
            return str(self.lo)
        return f"root of {format_poly(self.poly)} near {mpmath.nstr(self.approx(64), 15)}"

    # refinement and numerics

    def refine(self):
        """Halve the isolating interval."""
        if self.is_rational():
            return
        mid = (self.lo + self.hi) / 2
        if _sign(poly_eval(self.poly, mid)) == _sign(poly_eval(self.poly, self.lo)):
            self.lo = mid
        else:
            self.hi = mid

    def refine_to(self, width: Fraction):
        while self.hi - self.lo > width:
            self.refine()

    def _newton(self, bits: int):
        """Shrink the interval below 2^-bits by Newton steps plus a sign check."""
        self.refine_to(Fraction(1, 2 ** 24))
        with mpmath.workprec(bits + 32):
            f = lambda t: mpmath.polyval(list(reversed(self.poly)), t)
            x = mpmath.mpf(self.lo.numerator) / self.lo.denominator
            x = mpmath.findroot(f, (x + mpmath.mpf(self.hi.numerator) / self.hi.denominator) / 2)
            c = _frac(x)
        eps = Fraction(1, 2 ** (bits + 4))
        lo, hi = c - eps, c + eps
        if self.lo <= lo and hi <= self.hi and \
                _sign(poly_eval(self.poly, lo)) != _sign(poly_eval(self.poly, hi)):
            self.lo, self.hi = lo, hi
        else:
            self.refine_to(Fraction(1, 2 ** (bits + 4)))

    def approx(self, bits: int = 53) -> mpmath.mpf:
        """Approximation with absolute error below 2^-bits."""
        if self.is_rational():
            with mpmath.workprec(bits + 16):
                return mpmath.mpf(self.lo.numerator) / self.lo.denominator
        if self._approx is None or self._approx[0] < bits:
            if self.hi - self.lo > Fraction(1, 2 ** (bits + 2)):
                self._newton(bits)
            with mpmath.workprec(bits + 16):
                mid = (self.lo + self.hi) / 2
                self._approx = (bits, mpmath.mpf(mid.numerator) / mid.denominator)
        return self._approx[1]

    def __float__(self):
        return float(self.approx(60))

    def sign(self) -> int:
        if self.is_rational():
            return _sign(self.lo)
        while self.lo < 0 < self.hi:
            self.refine()
        return 1 if self.lo >= 0 else -1

    def floor(self) -> int:
        if self.is_rational():
            return int(math.floor(self.lo))
        while math.floor(self.lo) != math.floor(self.hi):
            self.refine()
        return int(math.floor(self.lo))

    # comparison

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.lo == other
        if not isinstance(other, AlgebraicReal):
            return NotImplemented
        if self.poly != other.poly:
            return False
        if self.is_rational():
            return self.lo == other.lo
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        return lo <= hi and _count_roots(self.poly, lo, hi) == 1

    def __hash__(self):
        return hash(self.poly)

    def _cmp(self, other) -> int:
        other = AlgebraicReal.coerce(other)
        if self == other:
            return 0
        while True:
            if self.hi < other.lo:
                return -1
            if other.hi < self.lo:
                return 1
            self.refine()
            other.refine()

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    # arithmetic

    def __neg__(self):
        p = tuple(c if i % 2 == 0 else -c for i, c in enumerate(self.poly))
        return AlgebraicReal(p, -self.hi, -self.lo, check=False)

    def __add__(self, other):
        return _binary(self, other, "+")

    def __radd__(self, other):
        return _binary(AlgebraicReal.coerce(other), self, "+")

    def __sub__(self, other):
        return _binary(self, other, "-")

    def __rsub__(self, other):
        return _binary(AlgebraicReal.coerce(other), self, "-")

    def __mul__(self, other):
        return _binary(self, other, "*")

    def __rmul__(self, other):
        return _binary(AlgebraicReal.coerce(other), self, "*")

    def __truediv__(self, other):
        return _binary(self, other, "/")

    def __rtruediv__(self, other):
        return _binary(AlgebraicReal.coerce(other), self, "/")

    def inverse(self) -> "AlgebraicReal":
        if self.is_rational():
            if self.lo == 0:
                raise ZeroDivisionError("inverse of zero")
            return AlgebraicReal.rational(1 / self.lo)
        self.sign()
        return AlgebraicReal(tuple(reversed(self.poly)), 1 / self.hi, 1 / self.lo, check=False)

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = AlgebraicReal.rational(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def nth_root(self, m: int) -> "AlgebraicReal":
        """The real m-th root (positive for positive input)."""
        if m == 1:
            return self
        s = self.sign()
        if s < 0 and m % 2 == 0:
            raise ValueError("even root of a negative number")
        if s == 0:
            return self
        p = [0] * (m * self.degree + 1)
        for i, c in enumerate(self.poly):
            p[i * m] = c

        def approx(bits):
            with mpmath.workprec(bits + 16):
                v = self.approx(bits + 8)
                r = mpmath.root(abs(v), m)
                return r if s > 0 else -r

        return select_root(irreducible_factors(p), approx)


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def select_root(factors: Iterable[Sequence[int]], approx, bits: int = 64) -> AlgebraicReal:
    """The unique root among ``factors`` near ``approx(bits)``, as an AlgebraicReal.

    The approximant is widened to an interval and roots are counted exactly;
    precision doubles until exactly one root remains.
    """
    factors = [primitive_part(f) for f in factors]
    while bits <= 1 << 15:
        with mpmath.workprec(bits + 16):
            c = _frac(approx(bits))
        eps = Fraction(1, 2 ** (bits - 8))
        lo, hi = c - eps, c + eps
        hits = []
        for f in factors:
            if len(f) == 2:
                r = Fraction(-f[0], f[1])
                if lo <= r <= hi:
                    hits.append((f, 1))
                continue
            n = _count_roots(f, lo, hi)
            if n:
                hits.append((f, n))
        if len(hits) == 1 and hits[0][1] == 1:
            return AlgebraicReal(hits[0][0], lo, hi, check=False)
        bits *= 2
    raise ArithmeticError("root selection did not converge")


def _bivariate(a: AlgebraicReal, b: AlgebraicReal, op: str):
    fa = sum(c * Y ** i for i, c in enumerate(a.poly))
    k = b.degree
    if op == "+":
        fb = sum(c * (X - Y) ** i for i, c in enumerate(b.poly))
    elif op == "-":
        fb = sum(c * (Y - X) ** i for i, c in enumerate(b.poly))
    elif op == "*":
        fb = sum(c * X ** i * Y ** (k - i) for i, c in enumerate(b.poly))
    else:
        fb = sum(c * Y ** i * X ** (k - i) for i, c in enumerate(b.poly))
    res = sympy.resultant(sympy.expand(fa), sympy.expand(fb), Y)
    return Poly(res, X, domain="ZZ")


def _binary(a: AlgebraicReal, b, op: str) -> AlgebraicReal:
    b = AlgebraicReal.coerce(b)
    if op == "/" and b.sign() == 0:
        raise ZeroDivisionError("division by zero")
    if a.is_rational() and b.is_rational():
        x, y = a.lo, b.lo
        return AlgebraicReal.rational({"+": x + y, "-": x - y, "*": x * y, "/": x / y if y else 0}[op])
    if b.is_rational() and op in "+-*/" and (op != "/" or b.lo != 0):
        return _affine(a, b.lo, op)
    if a.is_rational() and op in "+*":
        return _affine(b, a.lo, op)
    if a.degree * b.degree > DEGREE_CAP:
        raise DegreeCapExceeded(f"result degree {a.degree * b.degree} exceeds cap {DEGREE_CAP}")
    R = _bivariate(a, b, op)
    facs = [primitive_part(_from_sympy(f)) for f, _ in R.factor_list()[1] if f.degree() > 0]

    def approx(bits):
        with mpmath.workprec(bits + 32):
            x, y = a.approx(bits + 16), b.approx(bits + 16)
            return {"+": x + y, "-": x - y, "*": x * y, "/": x / y if y else 0}[op]

    return select_root(facs, approx)


def _affine(a: AlgebraicReal, r: Fraction, op: str) -> AlgebraicReal:
    """a + r, a - r, a * r, a / r for rational r, by substitution."""
    if op in "*/" and r == 0:
        return AlgebraicReal.rational(0)
    if op == "/":
        op, r = "*", 1 / r
    if op == "-":
        op, r = "+", -r
    if op == "+":
        # p(x - r) by Horner in Q[x]
        acc = [Fraction(0)]
        for c in reversed(a.poly):
            nxt = [Fraction(0)] * (len(acc) + 1)
            for i, v in enumerate(acc):
                nxt[i + 1] += v
                nxt[i] -= r * v
            nxt[0] += c
            acc = nxt
        p = primitive_part(acc)
        lo, hi = a.lo + r, a.hi + r
    else:
        # p(x / r) * r^n
        p = primitive_part([Fraction(c) / r ** i for i, c in enumerate(a.poly)])
        lo, hi = sorted((a.lo * r, a.hi * r))
    return AlgebraicReal(p, lo, hi, check=False)


# ---------------------------------------------------------------------------
# lattice reduction and Hermite normal form


def lll(basis: Sequence[Sequence[int]], delta: Fraction = Fraction(99, 100)) -> list[list[int]]:
    """LLL-reduce linearly independent integer row vectors (exact integral variant)."""
    b = [list(v) for v in basis]
    n = len(b)
    if n <= 1:
        return b
    num, den = delta.numerator, delta.denominator

    def dot(u, v):
        return sum(x * y for x, y in zip(u, v))

    d = [0] * (n + 1)
    lam = [[0] * n for _ in range(n)]
    d[0] = 1
    d[1] = dot(b[0], b[0])
    if d[1] == 0:
        raise ValueError("dependent vectors")
    k, kmax = 1, 0

    def red(k, l):
        if 2 * abs(lam[k][l]) > d[l + 1]:
            q = (2 * lam[k][l] + d[l + 1]) // (2 * d[l + 1])
            b[k] = [x - q * y for x, y in zip(b[k], b[l])]
            lam[k][l] -= q * d[l + 1]
            for i in range(l):
                lam[k][i] -= q * lam[l][i]

    def swap(k):
        b[k], b[k - 1] = b[k - 1], b[k]
        for j in range(k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        l = lam[k][k - 1]
        B = (d[k - 1] * d[k + 1] + l * l) // d[k]
        for i in range(k + 1, kmax + 1):
            t = lam[i][k]
            lam[i][k] = (d[k + 1] * lam[i][k - 1] - l * t) // d[k]
            lam[i][k - 1] = (B * t + l * lam[i][k]) // d[k + 1]
        d[k] = B

    while k < n:
        if k > kmax:
            kmax = k
            for j in range(k + 1):
                u = dot(b[k], b[j])
                for i in range(j):
                    u = (d[i + 1] * u - lam[k][i] * lam[j][i]) // d[i]
                if j < k:
                    lam[k][j] = u
                else:
                    d[k + 1] = u
                    if u == 0:
                        raise ValueError("dependent vectors")
        red(k, k - 1)
        if den * d[k + 1] * d[k - 1] < num * d[k] * d[k] - den * lam[k][k - 1] ** 2:
            swap(k)
            k = max(1, k - 1)
            continue
        for l in range(k - 2, -1, -1):
            red(k, l)
        k += 1
    return b


def _xgcd(a: int, b: int):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def hnf(M: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[list[int]], int]:
    """Row Hermite normal form: (H, U, rank) with U*M = H, U unimodular.

    The first ``rank`` rows of H are nonzero, with positive pivots and
    entries above each pivot reduced into [0, pivot).
    """
    A = [list(r) for r in M]
    m = len(A)
    n = len(A[0]) if m else 0
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    r = 0
    for c in range(n):
        if r == m:
            break
        for i in range(r + 1, m):
            if A[i][c]:
                a, b = A[r][c], A[i][c]
                g, x, y = _xgcd(a, b)
                p, q = a // g, b // g
                for R in (A, U):
                    rr, ri = R[r], R[i]
                    R[r] = [x * u + y * v for u, v in zip(rr, ri)]
                    R[i] = [-q * u + p * v for u, v in zip(rr, ri)]
        if A[r][c] == 0:
            continue
        if A[r][c] < 0:
            A[r] = [-v for v in A[r]]
            U[r] = [-v for v in U[r]]
        piv = A[r][c]
        for i in range(r):
            qt = A[i][c] // piv
            if qt:
                A[i] = [u - qt * v for u, v in zip(A[i], A[r])]
                U[i] = [u - qt * v for u, v in zip(U[i], U[r])]
        r += 1
    return A, U, r


def integer_left_kernel(M: Sequence[Sequence[int]]) -> list[list[int]]:
    """Z-basis of {a in Z^m : a*M = 0}."""
    H, U, r = hnf(M)
    return [U[i] for i in range(r, len(M))]


def lattice_basis(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """HNF basis of the Z-span of ``rows``."""
    if not rows:
        return []
    H, _, r = hnf(rows)
    return H[:r]


# ---------------------------------------------------------------------------
# rational linear algebra


def q_solve_left(rows: Sequence[Sequence[Fraction]], v: Sequence[Fraction]):
    """Coefficients c with sum c_i rows[i] = v, or None."""
    m = len(rows)
    n = len(v)
    # columns of the system are rows[i]; solve A c = v with A[j][i] = rows[i][j]
    A = [[Fraction(rows[i][j]) for i in range(m)] + [Fraction(v[j])] for j in range(n)]
    piv_cols = []
    r = 0
    for c in range(m):
        p = next((i for i in range(r, n) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(n):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        piv_cols.append(c)
        r += 1
    if any(A[i][m] != 0 for i in range(r, n)):
        return None
    c = [Fraction(0)] * m
    for i, pc in enumerate(piv_cols):
        c[pc] = A[i][m]
    return c


def q_rank(rows: Sequence[Sequence[Fraction]]) -> int:
    A = [[Fraction(x) for x in r] for r in rows]
    if not A:
        return 0
    n = len(A[0])
    r = 0
    for c in range(n):
        p = next((i for i in range(r, len(A)) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        for i in range(r + 1, len(A)):
            if A[i][c] != 0:
                f = A[i][c] / A[r][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        r += 1
    return r


# ---------------------------------------------------------------------------
# real number fields


class NumberField:
    """Q(theta) for a real algebraic theta; elements are power-basis coordinates."""

    def __init__(self, theta: AlgebraicReal):
        self.theta = theta
        self.poly = theta.poly
        self.degree = theta.degree
        lead = Fraction(self.poly[-1])
        self._monic = [Fraction(c) / lead for c in self.poly]
        self._powers = None

    def __eq__(self, other):
        return isinstance(other, NumberField) and self.theta == other.theta

    def __hash__(self):
        return hash(self.poly)

    def __repr__(self):
        return f"NumberField({format_poly(self.poly)})"

    @classmethod
    def rationals(cls) -> "NumberField":
        return cls(AlgebraicReal.rational(0))

    def to_json(self) -> dict:
        return {"defining_poly": list(self.poly), "interval": [str(self.theta.lo), str(self.theta.hi)]}

    def element(self, coords) -> "NFElement":
        return NFElement(self, coords)

    def zero(self) -> "NFElement":
        return NFElement(self, [0] * self.degree)

    def one(self) -> "NFElement":
        return self.scalar(1)

    def scalar(self, r) -> "NFElement":
        return NFElement(self, [Fraction(r)] + [0] * (self.degree - 1))

    def gen(self) -> "NFElement":
        if self.degree == 1:
            return self.scalar(self.theta.lo)
        return NFElement(self, [0, 1] + [0] * (self.degree - 2))

    def _reduce(self, coeffs: list[Fraction]) -> tuple[Fraction, ...]:
        n = self.degree
        c = list(coeffs)
        if n == 1:
            # theta rational: evaluate
            return (poly_eval(c, self.theta.lo),)
        for top in range(len(c) - 1, n - 1, -1):
            t = c[top]
            if t:
                for j in range(n):
                    c[top - n + j] -= t * self._monic[j]
            c[top] = 0
        c = c[:n] + [Fraction(0)] * (n - len(c))
        return tuple(c)

    def mul(self, x, y) -> tuple[Fraction, ...]:
        out = [Fraction(0)] * (len(x) + len(y) - 1)
        for i, a in enumerate(x):
            if a:
                for j, b in enumerate(y):
                    if b:
                        out[i + j] += a * b
        return self._reduce(out)

    def mult_matrix(self, x) -> list[list[Fraction]]:
        """Rows are the coordinates of x*theta^i."""
        rows = []
        cur = tuple(x)
        g = (0, 1) if self.degree > 1 else (self.theta.lo,)
        for _ in range(self.degree):
            rows.append(list(cur))
            cur = self.mul(cur, g) if self.degree > 1 else cur
        return rows

    def approx(self, x, bits: int = 53):
        with mpmath.workprec(bits + 32 + 4 * self.degree):
            t = self.theta.approx(bits + 32 + 8 * self.degree)
            acc = mpmath.mpf(0)
            for c in reversed(x):
                acc = acc * t + mpmath.mpf(c.numerator) / c.denominator
            return acc

    def minpoly(self, x) -> tuple[int, ...]:
        M = sympy.Matrix([[Rational(v.numerator, v.denominator) for v in row]
                          for row in self.mult_matrix(x)])
        cp = M.charpoly(X)
        facs = Poly(cp.as_expr(), X).factor_list()[1]
        return primitive_part([Fraction(int(c.p), int(c.q))
                               for c in reversed(Poly(facs[0][0], X).all_coeffs())])

    def to_real(self, x) -> AlgebraicReal:
        x = tuple(Fraction(c) for c in x)
        if all(c == 0 for c in x[1:]):
            return AlgebraicReal.rational(x[0])
        p = self.minpoly(x)
        return select_root([p], lambda bits: self.approx(x, bits))

    def contains(self, beta: AlgebraicReal, max_bits: int = 1024):
        """Coordinates of beta in the power basis, or None if beta is not in the field."""
        if beta.is_rational():
            return tuple(self.scalar(beta.lo).coords)
        if self.degree % beta.degree:
            return None
        n = self.degree
        bits = 128
        while bits <= max_bits:
            rel = _integer_relation(
                [beta.approx(bits + 32)] + [self.approx(self.gen_power(i), bits + 32) for i in range(n)],
                bits)
            if rel is not None and rel[0] != 0:
                coords = tuple(Fraction(-c, rel[0]) for c in rel[1:])
                if self._is_root(coords, beta):
                    return coords
            bits *= 2
        return None

    def gen_power(self, i: int) -> tuple:
        v = [Fraction(0)] * self.degree
        if self.degree == 1:
            v[0] = self.theta.lo ** i
        else:
            v[i] = Fraction(1)
        return tuple(v)

    def _is_root(self, coords, beta: AlgebraicReal) -> bool:
        acc = tuple([Fraction(0)] * self.degree)
        for c in reversed(beta.poly):
            acc = self.mul(acc, coords)
            acc = (acc[0] + c,) + acc[1:]
        if any(acc):
            return False
        return self.to_real(coords) == beta


class NFElement:
    """Element of a :class:`NumberField`."""

    __slots__ = ("field", "coords")

    def __init__(self, field: NumberField, coords):
        self.field = field
        c = [Fraction(v) for v in coords]
        if len(c) < field.degree:
            c += [Fraction(0)] * (field.degree - len(c))
        self.coords = tuple(c) if len(c) == field.degree else field._reduce(c)

    def _lift(self, other):
        if isinstance(other, NFElement):
            if other.field != self.field:
                raise ValueError("elements of different number fields")
            return other
        return self.field.scalar(other)

    def __add__(self, other):
        o = self._lift(other)
        return NFElement(self.field, [a + b for a, b in zip(self.coords, o.coords)])

    __radd__ = __add__

    def __neg__(self):
        return NFElement(self.field, [-a for a in self.coords])

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        return NFElement(self.field, self.field.mul(self.coords, o.coords))

    __rmul__ = __mul__

    def inverse(self) -> "NFElement":
        if not self:
            raise ZeroDivisionError("inverse of zero")
        M = self.field.mult_matrix(self.coords)
        # row i of M is x*theta^i; solve c*M = 1
        c = q_solve_left(M, self.field.one().coords)
        return NFElement(self.field, c)

    def __truediv__(self, other):
        return self * self._lift(other).inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = self.field.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __bool__(self):
        return any(self.coords)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.field.scalar(other)
        if not isinstance(other, NFElement):
            return NotImplemented
        return self.field == other.field and self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def is_rational(self) -> bool:
        return not any(self.coords[1:])

    def to_real(self) -> AlgebraicReal:
        return self.field.to_real(self.coords)

    def approx(self, bits: int = 53):
        return self.field.approx(self.coords, bits)

    def __repr__(self):
        terms = [f"{c}*t^{i}" if i else str(c) for i, c in enumerate(self.coords) if c]
        return "NFElement(" + (" + ".join(terms) or "0") + ")"

    def to_json(self) -> list[str]:
        return [str(c) for c in self.coords]


def _integer_relation(values, bits: int):
    """Small integer vector c with sum c_i values_i ~ 0, via LLL, or None."""
    n = len(values)
    scale = mpmath.mpf(2) ** bits
    with mpmath.workprec(bits + 64):
        col = [int(mpmath.nint(v * scale)) for v in values]
    basis = [[int(i == j) for j in range(n)] + [col[i]] for i in range(n)]
    try:
        red = lll(basis)
    except ValueError:
        return None
    best = red[0]
    if best[-1] != 0 and abs(best[-1]) > 2 ** (bits // 2):
        return None
    return best[:n]


def adjoin(K: NumberField, beta: AlgebraicReal, schedule: Sequence[int] = (1, -1, 2, -2, 3, -3, 5, -5)):
    """Primitive element for K(beta).

    Returns (field, theta_coords, beta_coords): the new field and the
    coordinates of K's generator and of beta in it.  Tries K itself, then
    Q(beta), then Q(theta + c*beta) for c in ``schedule``.
    """
    theta = K.theta
    inside = K.contains(beta)
    if inside is not None:
        return K, K.gen_power(1), inside
    Kb = NumberField(beta)
    th = Kb.contains(theta)
    if th is not None:
        return Kb, th, Kb.gen_power(1)
    for c in schedule:
        gamma = theta + beta * c
        if gamma.degree > DEGREE_CAP:
            raise DegreeCapExceeded(f"primitive element degree {gamma.degree} exceeds cap")
        F = NumberField(gamma)
        th = F.contains(theta)
        if th is not None:
            g = F.gen_power(1)
            b = tuple((gi - ti) / c for gi, ti in zip(g, th))
            return F, th, b
    raise ArithmeticError("no primitive element found in the seeded schedule")


def field_of(values: Sequence[AlgebraicReal]):
    """Smallest presentation Q(gamma) containing every value, with their coordinates."""
    K = NumberField.rationals()
    coords: list[tuple] = []
    for v in values:
        if v.is_rational():
            coords.append(None)
            continue
        if K.degree == 1:
            K = NumberField(v)
            coords = [None if c is None else c for c in coords]
            coords.append(K.gen_power(1))
            continue
        F, th, b = adjoin(K, v)
        if F is not K:
            coords = [None if c is None else _transport(K, F, th, c) for c in coords]
            K = F
        coords.append(b)
    out = []
    for v, c in zip(values, coords):
        out.append(tuple(K.scalar(v.lo).coords) if c is None else c)
    return K, out


def _transport(K: NumberField, F: NumberField, theta_in_F, coords):
    """Re-express an element of K in F, given K's generator in F."""
    acc = [Fraction(0)] * F.degree
    power = F.one().coords
    for c in coords:
        if c:
            acc = [a + c * p for a, p in zip(acc, power)]
        power = F.mul(power, theta_in_F)
    return tuple(acc)
