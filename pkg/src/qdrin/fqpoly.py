"""Finite fields F_q (q = p^n), single-step extensions of F_q, and F_q[T].

Elements of ``F_q`` are stored as integer codes ``sum(c_i * p**i)`` over the
power basis of the generator ``g``; elements of an extension of degree ``m``
over ``F_q`` are tuples of ``m`` such codes over the power basis of ``z``.
Both kinds of field hand out :class:`FieldElement` wrappers which overload
the arithmetic operators.
"""

from __future__ import annotations

import ast
import functools
import itertools
import random
from typing import Iterable, Iterator, Sequence

from sympy import isprime

from .errors import DivisionByZero, DivisionByZeroPoly, FieldMismatch, NonPrime

# Prime-power fields up to this size get full addition/multiplication tables.
TABLE_LIMIT = 256


class FieldElement:
    """An element of a :class:`FieldSpec` or :class:`ExtField`."""

    __slots__ = ("field", "value")

    def __init__(self, field, value):
        self.field = field
        self.value = value

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldMismatch(f"{self.field!r} vs {other.field!r}")
            return other.value
        if isinstance(other, int):
            return self.field._from_int(other)
        return NotImplemented

    def __add__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return v
        return FieldElement(self.field, self.field._add(self.value, v))

    __radd__ = __add__

    def __sub__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return v
        return FieldElement(self.field, self.field._sub(self.value, v))

    def __rsub__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return v
        return FieldElement(self.field, self.field._sub(v, self.value))

    def __neg__(self):
        return FieldElement(self.field, self.field._neg(self.value))

    def __mul__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return v
        return FieldElement(self.field, self.field._mul(self.value, v))

    __rmul__ = __mul__

    def inverse(self):
        if self.value == self.field._zero:
            raise DivisionByZero("inverse of zero field element")
        return FieldElement(self.field, self.field._inv(self.value))

    def __truediv__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return v
        if v == self.field._zero:
            raise DivisionByZero("division by zero field element")
        return FieldElement(self.field, self.field._mul(self.value, self.field._inv(v)))

    def __rtruediv__(self, other):
        return FieldElement(self.field, self.field._coerce_value(other)) / self

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return FieldElement(self.field, self.field._pow(self.value, e))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.value == other.value
        if isinstance(other, int):
            return self.value == self.field._from_int(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.field.key, self.value))

    def __bool__(self):
        return self.value != self.field._zero

    def is_zero(self) -> bool:
        return self.value == self.field._zero

    def __str__(self):
        return self.field.format_value(self.value)

    def __repr__(self):
        return f"{self.field.name}({self})"


class _Field:
    """Shared behaviour of finite fields; subclasses supply the raw ops."""

    key: tuple
    name: str
    p: int
    order: int

    def __eq__(self, other):
        return isinstance(other, _Field) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return self.name

    def _sub(self, a, b):
        return self._add(a, self._neg(b))

    def _pow(self, a, e: int):
        result = self._one
        while e:
            if e & 1:
                result = self._mul(result, a)
            e >>= 1
            if e:
                a = self._mul(a, a)
        return result

    def _from_int(self, k: int):
        k %= self.p
        return self._scale_one(k)

    def _coerce_value(self, x):
        if isinstance(x, FieldElement):
            if x.field != self:
                raise FieldMismatch(f"{self!r} vs {x.field!r}")
            return x.value
        if isinstance(x, int):
            return self._from_int(x)
        if isinstance(x, str):
            return self.parse(x).value
        raise TypeError(f"cannot coerce {x!r} into {self!r}")

    def __call__(self, x) -> FieldElement:
        return FieldElement(self, self._coerce_value(x))

    @property
    def zero(self) -> FieldElement:
        return FieldElement(self, self._zero)

    @property
    def one(self) -> FieldElement:
        return FieldElement(self, self._one)

    def elements(self) -> Iterator[FieldElement]:
        for v in self._all_values():
            yield FieldElement(self, v)

    def random_element(self, rng: random.Random, nonzero: bool = False) -> FieldElement:
        while True:
            x = FieldElement(self, self._random_value(rng))
            if not nonzero or x:
                return x

    def parse(self, text: str) -> FieldElement:
        return parse_expression(text, self._symbols(), self.one)


class FieldSpec(_Field):
    """The field F_q = F_p[g]/(modulus), q = p**n.

    ``modulus`` is the ascending coefficient list of a monic irreducible
    polynomial of degree ``n`` over F_p.
    """

    symbol = "g"

    def __init__(self, p: int, n: int, modulus: Sequence[int], check: bool = True):
        if not isprime(p):
            raise NonPrime(f"{p} is not prime")
        if n < 1:
            raise ValueError("field degree must be positive")
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != n + 1 or modulus[-1] != 1:
            raise ValueError(f"modulus must be monic of degree {n}")
        self.p = p
        self.n = n
        self.modulus = modulus
        self.q = p ** n
        self.order = self.q
        self.key = ("F", p, modulus)
        self.name = f"GF({p}^{n})" if n > 1 else f"GF({p})"
        self._zero = 0
        self._one = 1
        self._tables = None
        if check and n > 1 and not is_irreducible(APoly(prime_field(p), modulus)):
            raise ValueError(f"modulus {modulus} is reducible over GF({p})")

    # -- raw value arithmetic ------------------------------------------------
    def digits(self, code: int) -> list[int]:
        out = []
        for _ in range(self.n):
            code, d = divmod(code, self.p)
            out.append(d)
        return out

    def code(self, digits: Iterable[int]) -> int:
        c = 0
        for d in reversed(list(digits)):
            c = c * self.p + d % self.p
        return c

    def _add_direct(self, a, b):
        if self.p == 2:
            return a ^ b
        p = self.p
        out, scale = 0, 1
        while a or b:
            a, da = divmod(a, p)
            b, db = divmod(b, p)
            out += ((da + db) % p) * scale
            scale *= p
        return out

    def _neg_direct(self, a):
        if self.p == 2:
            return a
        return self.code(-d for d in self.digits(a))

    def _mul_direct(self, a, b):
        p, n = self.p, self.n
        if n == 1:
            return a * b % p
        da, db = self.digits(a), self.digits(b)
        prod = [0] * (2 * n - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] += x * y
        mod = self.modulus
        for k in range(2 * n - 2, n - 1, -1):
            c = prod[k] % p
            if c:
                for j in range(n):
                    prod[k - n + j] -= c * mod[j]
        return self.code(prod[:n])

    def _build_tables(self):
        q = self.q
        add = [[self._add_direct(a, b) for b in range(q)] for a in range(q)]
        mul = [[self._mul_direct(a, b) for b in range(q)] for a in range(q)]
        neg = [self._neg_direct(a) for a in range(q)]
        inv = [0] * q
        for a in range(1, q):
            row = mul[a]
            inv[a] = row.index(1)
        self._tables = (add, mul, neg, inv)
        return self._tables

    @property
    def tables(self):
        """``(add, mul, neg, inv)`` lookup tables, or None for large fields."""
        if self._tables is None and self.q <= TABLE_LIMIT:
            self._build_tables()
        return self._tables

    def _add(self, a, b):
        t = self.tables
        return t[0][a][b] if t else self._add_direct(a, b)

    def _neg(self, a):
        t = self.tables
        return t[2][a] if t else self._neg_direct(a)

    def _mul(self, a, b):
        t = self.tables
        return t[1][a][b] if t else self._mul_direct(a, b)

    def _inv(self, a):
        if a == 0:
            raise DivisionByZero("inverse of zero")
        t = self.tables
        return t[3][a] if t else self._pow(a, self.q - 2)

    def _scale_one(self, k):
        return k % self.p

    def _all_values(self):
        return range(self.q)

    def _random_value(self, rng):
        return rng.randrange(self.q)

    @property
    def gen(self) -> FieldElement:
        """The class of ``g`` (equals 0 when n = 1 and the modulus is x)."""
        if self.n == 1:
            return FieldElement(self, (-self.modulus[0]) % self.p)
        return FieldElement(self, self.p)

    def _symbols(self):
        # a prime field has no generator symbol
        return {self.symbol: self.gen} if self.n > 1 else {}

    def format_value(self, code: int) -> str:
        if self.n == 1:
            return str(code)
        return _format_terms(
            [(d, str(d)) for d in self.digits(code)], self.symbol, sep="+", simple=True)

    def to_json(self) -> dict:
        return {"p": self.p, "n": self.n, "modulus": list(self.modulus)}

    @classmethod
    def from_json(cls, obj: dict) -> "FieldSpec":
        if "modulus" in obj:
            return cls(int(obj["p"]), int(obj["n"]), obj["modulus"])
        return make_field(int(obj["p"]), int(obj["n"]))


class ExtField(_Field):
    """F_q[z]/(modulus): a degree-``m`` extension of ``base`` = F_q.

    ``modulus`` is given as base codes, ascending, monic, length m+1.
    """

    symbol = "z"

    def __init__(self, base: FieldSpec, m: int, modulus: Sequence[int], check: bool = True):
        if m < 1:
            raise ValueError("extension degree must be positive")
        modulus = tuple(int(c) for c in modulus)
        if len(modulus) != m + 1 or modulus[-1] != 1:
            raise ValueError(f"modulus must be monic of degree {m}")
        self.base = base
        self.m = m
        self.modulus = modulus
        self.p = base.p
        self.q = base.q
        self.order = base.q ** m
        self.key = ("E", base.key, modulus)
        self.name = f"GF({base.q}^{m})"
        self._zero = (0,) * m
        self._one = (1,) + (0,) * (m - 1)
        if check and m > 1 and not is_irreducible(self.modulus_poly()):
            raise ValueError(f"modulus {modulus} is reducible over {base!r}")
        self._tail = tuple(base._neg(c) for c in modulus[:m])
        self._frob_rows = None

    def modulus_poly(self, symbol: str = "z") -> "APoly":
        b = self.base
        return APoly(b, [FieldElement(b, c) for c in self.modulus], symbol)

    # -- raw value arithmetic ------------------------------------------------
    def _add(self, a, b):
        t = self.base.tables
        if t:
            add = t[0]
            return tuple(add[x][y] for x, y in zip(a, b))
        f = self.base._add
        return tuple(f(x, y) for x, y in zip(a, b))

    def _neg(self, a):
        f = self.base._neg
        return tuple(f(x) for x in a)

    def _mul(self, a, b):
        m = self.m
        t = self.base.tables
        if t:
            add, mul = t[0], t[1]
            prod = [0] * (2 * m - 1)
            for i, x in enumerate(a):
                if x:
                    row = mul[x]
                    for j, y in enumerate(b):
                        if y:
                            k = i + j
                            prod[k] = add[prod[k]][row[y]]
            tail = self._tail
            for k in range(2 * m - 2, m - 1, -1):
                c = prod[k]
                if c:
                    row = mul[c]
                    off = k - m
                    for j in range(m):
                        tj = tail[j]
                        if tj:
                            prod[off + j] = add[prod[off + j]][row[tj]]
            return tuple(prod[:m])
        badd, bmul = self.base._add, self.base._mul
        prod = [0] * (2 * m - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] = badd(prod[i + j], bmul(x, y))
        for k in range(2 * m - 2, m - 1, -1):
            c = prod[k]
            if c:
                for j in range(m):
                    prod[k - m + j] = badd(prod[k - m + j], bmul(c, self._tail[j]))
        return tuple(prod[:m])

    def _inv(self, a):
        if a == self._zero:
            raise DivisionByZero("inverse of zero")
        return self._pow(a, self.order - 2)

    def _scale_one(self, k):
        return (k % self.p,) + (0,) * (self.m - 1)

    def _scale(self, c: int, v):
        """Multiply the raw value ``v`` by the base code ``c``."""
        bmul = self.base._mul
        return tuple(bmul(c, x) for x in v)

    def _all_values(self):
        # first coordinate varies fastest
        for combo in itertools.product(range(self.base.q), repeat=self.m):
            yield combo[::-1]

    def _random_value(self, rng):
        return tuple(rng.randrange(self.base.q) for _ in range(self.m))

    @property
    def gen(self) -> FieldElement:
        if self.m == 1:
            return FieldElement(self, (self.base._neg(self.modulus[0]),))
        return FieldElement(self, (0, 1) + (0,) * (self.m - 2))

    def embed_base(self, c) -> FieldElement:
        """Image of an element of F_q (element or code) in this field."""
        if isinstance(c, FieldElement):
            if c.field != self.base:
                raise FieldMismatch(f"{c.field!r} is not the base of {self!r}")
            c = c.value
        return FieldElement(self, (c,) + (0,) * (self.m - 1))

    def _symbols(self):
        names = {self.symbol: self.gen}
        # g names the base generator; over a prime base it aliases z
        names[FieldSpec.symbol] = self.embed_base(self.base.gen) if self.base.n > 1 else self.gen
        return names

    # -- vector space structure over F_q -------------------------------------
    def to_vector(self, x: FieldElement) -> tuple:
        return x.value

    def from_vector(self, v: Sequence[int]) -> FieldElement:
        return FieldElement(self, tuple(v))

    def _frob_table(self):
        if self._frob_rows is None:
            zq = self._pow(self.gen.value, self.q)
            rows = [self._one]
            for _ in range(1, self.m):
                rows.append(self._mul(rows[-1], zq))
            self._frob_rows = rows
        return self._frob_rows

    def _frobq(self, v):
        """Raw q-power Frobenius; F_q-linear, so applied as a matrix."""
        rows = self._frob_table()
        t = self.base.tables
        m = self.m
        if t:
            add, mul = t[0], t[1]
            out = [0] * m
            for c, row in zip(v, rows):
                if c:
                    mc = mul[c]
                    for j in range(m):
                        if row[j]:
                            out[j] = add[out[j]][mc[row[j]]]
            return tuple(out)
        out = self._zero
        for c, row in zip(v, rows):
            if c:
                out = self._add(out, self._scale(c, row))
        return out

    def frob_q(self, x: FieldElement, k: int = 1) -> FieldElement:
        """x ** (q ** k) where q = |base|."""
        v = x.value
        for _ in range(k % self.m):
            v = self._frobq(v)
        return FieldElement(self, v)

    def format_value(self, v) -> str:
        b = self.base
        terms = []
        for c in v:
            s = b.format_value(c)
            simple = b.n == 1 or _is_single_term(b, c)
            terms.append((c, s if simple else f"({s})"))
        return _format_terms(terms, self.symbol, sep=" + ", simple=True)

    def to_json(self) -> dict:
        return {"base": self.base.to_json(), "m": self.m, "modulus": list(self.modulus)}


def _is_single_term(b: FieldSpec, code: int) -> bool:
    return sum(1 for d in b.digits(code) if d) <= 1


def _format_terms(terms, symbol, sep, simple):
    """Format ascending (coefficient, text) pairs as a descending sum."""
    parts = []
    for k in range(len(terms) - 1, -1, -1):
        c, s = terms[k]
        if not c:
            continue
        if k == 0:
            parts.append(s)
            continue
        mono = symbol if k == 1 else f"{symbol}^{k}"
        parts.append(mono if s == "1" else f"{s}*{mono}")
    return sep.join(parts) if parts else "0"


# ---------------------------------------------------------------------------
# Field construction


@functools.lru_cache(maxsize=None)
def prime_field(p: int) -> FieldSpec:
    return FieldSpec(p, 1, (0, 1), check=False)


@functools.lru_cache(maxsize=None)
def make_field(p: int, n: int) -> FieldSpec:
    """F_{p^n} with the smallest monic irreducible modulus.

    Candidates ``x^n + c_{n-1}x^{n-1} + ... + c_0`` are ordered by the integer
    ``sum(c_i p^i)``, i.e. lexicographically on ``(c_{n-1}, ..., c_0)``.
    """
    if not isprime(p):
        raise NonPrime(f"{p} is not prime")
    if n == 1:
        return prime_field(p)
    Fp = prime_field(p)
    for code in range(p ** n):
        coeffs = Fp_digits(code, p, n) + [1]
        if is_irreducible(APoly(Fp, coeffs)):
            return FieldSpec(p, n, coeffs, check=False)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


def Fp_digits(code: int, p: int, n: int) -> list[int]:
    out = []
    for _ in range(n):
        code, d = divmod(code, p)
        out.append(d)
    return out


@functools.lru_cache(maxsize=None)
def make_extension(base: FieldSpec, m: int) -> ExtField:
    """Degree-m extension of ``base`` with the smallest monic irreducible modulus."""
    if m == 1:
        return ExtField(base, 1, (0, 1), check=False)
    q = base.q
    for code in range(q ** m):
        coeffs = Fp_digits(code, q, m) + [1]
        poly = APoly(base, [FieldElement(base, c) for c in coeffs])
        if is_irreducible(poly):
            return ExtField(base, m, coeffs, check=False)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


def frobenius(x: FieldElement, power: int = 1) -> FieldElement:
    """x ** (p ** power) for an element of any constructed field."""
    F = x.field
    if isinstance(F, ExtField):
        n = F.base.n
        total = n * F.m
        power %= total
        if power % n == 0:
            return F.frob_q(x, power // n)
        return x ** (F.p ** power)
    power %= F.n
    return x ** (F.p ** power)


class Embedding:
    """Field homomorphism ``source -> target`` between extensions of one F_q."""

    def __init__(self, source: ExtField, target: ExtField, image: FieldElement):
        self.source = source
        self.target = target
        self.image = image
        powers = [target._one]
        for _ in range(1, source.m):
            powers.append(target._mul(powers[-1], image.value))
        self._powers = powers

    def raw(self, v):
        T = self.target
        out = T._zero
        for c, pw in zip(v, self._powers):
            if c:
                out = T._add(out, T._scale(c, pw))
        return out

    def __call__(self, x: FieldElement) -> FieldElement:
        if x.field != self.source:
            raise FieldMismatch(f"{x.field!r} is not {self.source!r}")
        return FieldElement(self.target, self.raw(x.value))


@functools.lru_cache(maxsize=None)
def embedding(source: ExtField, target: ExtField) -> Embedding:
    """The canonical embedding: z maps to the smallest root of the modulus."""
    if source.base != target.base:
        raise FieldMismatch("extensions of different base fields")
    if target.m % source.m:
        raise FieldMismatch(f"{source!r} does not embed in {target!r}")
    if source == target:
        return Embedding(source, target, target.gen)
    f = source.modulus_poly().map_coeffs(target, target.embed_base)
    rts = roots(f)
    if not rts:  # pragma: no cover - impossible for a genuine subfield
        raise FieldMismatch("modulus has no root in target")
    image = min(rts, key=lambda r: r.value)
    return Embedding(source, target, image)


# ---------------------------------------------------------------------------
# Univariate polynomials over a finite field


class APoly:
    """Dense univariate polynomial over a finite field, ascending coefficients.

    Used for A = F_q[T] and for auxiliary polynomials over extension fields.
    The zero polynomial has degree -1.
    """

    __slots__ = ("field", "coeffs", "symbol")

    def __init__(self, field, coeffs: Iterable = (), symbol: str = "T"):
        self.field = field
        cs = [c if isinstance(c, FieldElement) else field(c) for c in coeffs]
        for c in cs:
            if c.field != field:
                raise FieldMismatch(f"coefficient in {c.field!r}, expected {field!r}")
        while cs and not cs[-1]:
            cs.pop()
        self.coeffs = tuple(cs)
        self.symbol = symbol

    @classmethod
    def x(cls, field, symbol: str = "T") -> "APoly":
        return cls(field, [field.zero, field.one], symbol)

    @classmethod
    def constant(cls, c: FieldElement, symbol: str = "T") -> "APoly":
        return cls(c.field, [c], symbol)

    def _new(self, coeffs):
        return APoly(self.field, coeffs, self.symbol)

    def _check(self, other):
        if isinstance(other, (int, FieldElement)):
            return self._new([self.field(other)])
        if not isinstance(other, APoly):
            return NotImplemented
        if other.field != self.field:
            raise FieldMismatch(f"{self.field!r} vs {other.field!r}")
        return other

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    @property
    def leading(self) -> FieldElement:
        return self.coeffs[-1] if self.coeffs else self.field.zero

    def __getitem__(self, i: int) -> FieldElement:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else self.field.zero

    def __eq__(self, other):
        o = self._check(other) if isinstance(other, (APoly, int, FieldElement)) else NotImplemented
        if o is NotImplemented:
            return o
        return self.coeffs == o.coeffs

    def __hash__(self):
        return hash((self.field.key, tuple(c.value for c in self.coeffs)))

    def __add__(self, other):
        o = self._check(other)
        if o is NotImplemented:
            return o
        n = max(len(self.coeffs), len(o.coeffs))
        return self._new([self[i] + o[i] for i in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return self._new([-c for c in self.coeffs])

    def __sub__(self, other):
        o = self._check(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._check(other)
        if o is NotImplemented:
            return o
        if not self.coeffs or not o.coeffs:
            return self._new([])
        F = self.field
        a = [c.value for c in self.coeffs]
        b = [c.value for c in o.coeffs]
        out = [F._zero] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x != F._zero:
                for j, y in enumerate(b):
                    out[i + j] = F._add(out[i + j], F._mul(x, y))
        return self._new([FieldElement(F, v) for v in out])

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "APoly":
        result, base = self._new([self.field.one]), self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __divmod__(self, other):
        o = self._check(other)
        if o is NotImplemented:
            return o
        if not o.coeffs:
            raise DivisionByZeroPoly("polynomial division by zero")
        F = self.field
        r = [c.value for c in self.coeffs]
        d = o.degree
        b = [c.value for c in o.coeffs]
        inv_lead = F._inv(b[-1])
        qd = len(r) - d - 1
        if qd < 0:
            return self._new([]), self
        q = [F._zero] * (qd + 1)
        for k in range(len(r) - 1, d - 1, -1):
            c = r[k]
            if c == F._zero:
                continue
            t = F._mul(c, inv_lead)
            q[k - d] = t
            for j in range(d + 1):
                r[k - d + j] = F._sub(r[k - d + j], F._mul(t, b[j]))
        return (self._new([FieldElement(F, v) for v in q]),
                self._new([FieldElement(F, v) for v in r[:d]]))

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def monic(self) -> "APoly":
        if not self.coeffs:
            return self
        inv = self.leading.inverse()
        return self._new([c * inv for c in self.coeffs])

    def gcd(self, other: "APoly") -> "APoly":
        a, b = self, self._check(other)
        while b:
            a, b = b, a % b
        return a.monic()

    def xgcd(self, other: "APoly"):
        """Return (g, s, t) with s*self + t*other = g monic."""
        r0, r1 = self, self._check(other)
        s0, s1 = self._new([self.field.one]), self._new([])
        t0, t1 = self._new([]), self._new([self.field.one])
        while r1:
            qt, r = divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, s0 - qt * s1
            t0, t1 = t1, t0 - qt * t1
        if not r0:
            return r0, s0, t0
        inv = r0.leading.inverse()
        return r0 * inv, s0 * inv, t0 * inv

    def powmod(self, e: int, mod: "APoly") -> "APoly":
        result = self._new([self.field.one]) % mod
        base = self % mod
        while e:
            if e & 1:
                result = (result * base) % mod
            e >>= 1
            if e:
                base = (base * base) % mod
        return result

    def derivative(self) -> "APoly":
        return self._new([c * i for i, c in enumerate(self.coeffs)][1:])

    def evaluate(self, x: FieldElement) -> FieldElement:
        """Evaluate at ``x``; coefficients are embedded if x lies in an extension."""
        if x.field == self.field:
            coeffs = self.coeffs
        elif isinstance(x.field, ExtField) and x.field.base == self.field:
            coeffs = [x.field.embed_base(c) for c in self.coeffs]
        else:
            raise FieldMismatch(f"cannot evaluate over {self.field!r} at {x.field!r}")
        acc = x.field.zero
        for c in reversed(coeffs):
            acc = acc * x + c
        return acc

    __call__ = evaluate

    def map_coeffs(self, field, fn) -> "APoly":
        return APoly(field, [fn(c) for c in self.coeffs], self.symbol)

    def compose(self, other: "APoly") -> "APoly":
        acc = self._new([])
        for c in reversed(self.coeffs):
            acc = acc * other + c
        return acc

    def __str__(self):
        F = self.field
        terms = []
        for c in self.coeffs:
            s = str(c)
            simple = isinstance(F, FieldSpec) and (F.n == 1 or _is_single_term(F, c.value))
            terms.append((bool(c), s if simple or c.is_zero() else f"({s})"))
        return _format_terms(terms, self.symbol, sep="+", simple=True)

    def __repr__(self):
        return f"APoly({self})"

    def to_json(self) -> list:
        return [str(c) for c in self.coeffs]

    def code(self) -> int:
        """Integer encoding sum(code(c_i) * q**i) (base fields only)."""
        q = self.field.order
        out = 0
        for c in reversed(self.coeffs):
            out = out * q + c.value
        return out


def parse_apoly(text: str, field: FieldSpec, symbol: str = "T") -> APoly:
    names = {symbol: APoly.x(field, symbol)}
    if getattr(field, "n", 1) > 1:
        names[FieldSpec.symbol] = APoly.constant(field.gen, symbol)
    return parse_expression(text, names, APoly.constant(field.one, symbol))


def is_irreducible(f: APoly) -> bool:
    """Ben-Or test: gcd(x^(Q^i) - x, f) = 1 for 1 <= i <= deg f / 2."""
    d = f.degree
    if d < 1:
        return False
    if d == 1:
        return True
    f = f.monic()
    Q = f.field.order
    x = APoly.x(f.field, f.symbol)
    h = x
    for _ in range(d // 2):
        h = h.powmod(Q, f)
        if (h - x).gcd(f).degree > 0:
            return False
    return True


def roots(f: APoly, rng: random.Random | None = None) -> list[FieldElement]:
    """Distinct roots of ``f`` in its coefficient field (Cantor-Zassenhaus)."""
    if f.degree < 1:
        return []
    F = f.field
    Q = F.order
    rng = rng or random.Random(0)
    x = APoly.x(F, f.symbol)
    g = (x.powmod(Q, f) - x).gcd(f)
    out: list[FieldElement] = []
    _split_linear(g, rng, out)
    return sorted(out, key=lambda r: r.value)


def _split_linear(g: APoly, rng, out):
    d = g.degree
    if d < 1:
        return
    if d == 1:
        gm = g.monic()
        out.append(-gm[0])
        return
    F = g.field
    Q = F.order
    x = APoly.x(F, g.symbol)
    while True:
        delta = F.random_element(rng)
        if F.p == 2:
            k = Q.bit_length() - 1
            t = (x * delta) % g
            acc = t
            for _ in range(k - 1):
                t = (t * t) % g
                acc = acc + t
            h = acc.gcd(g)
        else:
            h = ((x + delta).powmod((Q - 1) // 2, g) - 1).gcd(g)
        if 0 < h.degree < d:
            _split_linear(h, rng, out)
            _split_linear(g // h, rng, out)
            return


# ---------------------------------------------------------------------------
# Expression parsing (shared by all text formats)


def parse_expression(text: str, names: dict, one):
    """Evaluate an arithmetic expression over a ring.

    ``names`` maps symbols to ring values; integers become ``k * one``.
    Supports ``+ - * / ^ **`` and parentheses.
    """
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse {text!r}: {exc}") from None

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return one * node.value if node.value else one * 0
        if isinstance(node, ast.Name):
            if node.id not in names:
                raise ValueError(f"unknown symbol {node.id!r} in {text!r}")
            return names[node.id]
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                e = node.right
                if not (isinstance(e, ast.Constant) and isinstance(e.value, int)):
                    raise ValueError(f"exponent must be an integer literal in {text!r}")
                return ev(node.left) ** e.value
            a, b = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            if isinstance(node.op, ast.Mult):
                return a * b
            if isinstance(node.op, ast.Div):
                return a / b
        raise ValueError(f"unsupported syntax in {text!r}")

    return ev(tree)
