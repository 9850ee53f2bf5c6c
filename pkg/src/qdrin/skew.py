"""The twisted polynomial ring L<tau> with tau*c = c^q*tau.

A skew polynomial ``sum c_i tau^i`` doubles as the q-linearized polynomial
``x -> sum c_i x^(q^i)``; multiplication in the ring is composition of these
additive maps.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .errors import DivisionByZero, FieldMismatch
from .fqpoly import ExtField, FieldElement, embedding, parse_expression


def _default_twist(field) -> int:
    return field.q if isinstance(field, ExtField) else field.p


class _Twister:
    """Raw-value access to c -> c^(twist^i) on a fixed field."""

    def __init__(self, field, twist: int):
        self.field = field
        self.twist = twist
        self.fast = isinstance(field, ExtField) and twist == field.q
        if not self.fast:
            if field.order % twist or not _is_power(twist, field.p):
                raise ValueError(f"twist {twist} is not a power of the characteristic")

    def once(self, v):
        if self.fast:
            return self.field._frobq(v)
        return self.field._pow(v, self.twist)

    def power(self, v, i: int):
        for _ in range(i):
            v = self.once(v)
        return v


def _is_power(t: int, p: int) -> bool:
    while t > 1 and t % p == 0:
        t //= p
    return t == 1


class SkewPoly:
    """Element ``c_0 + c_1 tau + ... + c_d tau^d`` of L<tau>."""

    __slots__ = ("field", "coeffs", "twist", "_tw")

    def __init__(self, field, coeffs: Iterable = (), twist: int | None = None):
        self.field = field
        self.twist = _default_twist(field) if twist is None else twist
        cs = [c if isinstance(c, FieldElement) else field(c) for c in coeffs]
        for c in cs:
            if c.field != field:
                raise FieldMismatch(f"coefficient in {c.field!r}, expected {field!r}")
        while cs and not cs[-1]:
            cs.pop()
        self.coeffs = tuple(cs)
        self._tw = None

    @property
    def twister(self) -> _Twister:
        if self._tw is None:
            self._tw = _Twister(self.field, self.twist)
        return self._tw

    @classmethod
    def tau(cls, field, twist: int | None = None) -> "SkewPoly":
        return cls(field, [field.zero, field.one], twist)

    @classmethod
    def constant(cls, c, field=None, twist: int | None = None) -> "SkewPoly":
        if not isinstance(c, FieldElement):
            c = field(c)
        return cls(c.field, [c], twist)

    def _new(self, coeffs) -> "SkewPoly":
        out = SkewPoly(self.field, coeffs, self.twist)
        out._tw = self._tw
        return out

    def _check(self, other):
        if isinstance(other, (int, FieldElement)):
            return self._new([self.field(other)])
        if not isinstance(other, SkewPoly):
            return NotImplemented
        if other.field != self.field or other.twist != self.twist:
            raise FieldMismatch("skew polynomials over different rings")
        return other

    @property
    def degree(self) -> int:
        """tau-degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def leading(self) -> FieldElement:
        return self.coeffs[-1] if self.coeffs else self.field.zero

    @property
    def valuation(self) -> int:
        """Lowest index with a nonzero coefficient (-1 for zero)."""
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        return -1

    def __getitem__(self, i: int) -> FieldElement:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else self.field.zero

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, (SkewPoly, int, FieldElement)):
            return NotImplemented
        o = self._check(other)
        return self.coeffs == o.coeffs

    def __hash__(self):
        return hash((self.field.key, self.twist, tuple(c.value for c in self.coeffs)))

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
        return skew_mul(self, o)

    def __rmul__(self, other):
        o = self._check(other)
        if o is NotImplemented:
            return o
        return skew_mul(o, self)

    def __pow__(self, e: int) -> "SkewPoly":
        result, base = self._new([self.field.one]), self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __call__(self, x: FieldElement) -> FieldElement:
        return skew_eval(self, x)

    def shift(self, k: int) -> "SkewPoly":
        """self * tau^k."""
        return self._new([self.field.zero] * k + list(self.coeffs))

    def __str__(self):
        return self.field_format()

    def field_format(self) -> str:
        parts = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if not c:
                continue
            s = str(c)
            if k == 0:
                parts.append(s)
                continue
            mono = "t" if k == 1 else f"t^{k}"
            if s == "1":
                parts.append(mono)
            else:
                single = all(ch not in s for ch in "+ ") and not s.startswith("-")
                parts.append(f"{s}*{mono}" if single else f"({s})*{mono}")
        return " + ".join(parts) if parts else "0"

    def __repr__(self):
        return f"SkewPoly({self})"

    def to_json(self) -> list:
        return [str(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, field, items: Sequence[str], twist: int | None = None) -> "SkewPoly":
        return cls(field, [field.parse(s) for s in items], twist)

    @classmethod
    def parse(cls, text: str, field, twist: int | None = None) -> "SkewPoly":
        one = cls.constant(field.one, twist=twist)
        names = {"t": cls.tau(field, twist)}
        for sym, val in field._symbols().items():
            names[sym] = cls.constant(val, twist=twist)
        return parse_expression(text, names, one)


def skew_mul(u: SkewPoly, v: SkewPoly) -> SkewPoly:
    """Product in L<tau>: (a tau^i)(b tau^j) = a b^(q^i) tau^(i+j)."""
    if u.field != v.field or u.twist != v.twist:
        raise FieldMismatch("skew polynomials over different rings")
    if not u.coeffs or not v.coeffs:
        return u._new([])
    F = u.field
    tw = u.twister
    add, mul = F._add, F._mul
    zero = F._zero
    a = [c.value for c in u.coeffs]
    b = [c.value for c in v.coeffs]
    out = [zero] * (len(a) + len(b) - 1)
    bi = b
    for i, x in enumerate(a):
        if i:
            bi = [tw.once(y) for y in bi]
        if x == zero:
            continue
        for j, y in enumerate(bi):
            if y != zero:
                out[i + j] = add(out[i + j], mul(x, y))
    return u._new([FieldElement(F, w) for w in out])


def eval_raw(u: SkewPoly, target, x, coeff_values=None):
    """Raw evaluation of sum c_i x^(twist^i) in ``target``.

    ``coeff_values`` may supply the coefficients already mapped into ``target``.
    """
    if coeff_values is None:
        coeff_values = coefficient_values(u, target)
    tw = _target_twister(target, u.twist)
    add, mul = target._add, target._mul
    acc = target._zero
    xi = x
    for i, c in enumerate(coeff_values):
        if i:
            xi = tw.once(xi)
        if c != target._zero:
            acc = add(acc, mul(c, xi))
    return acc


def coefficient_values(u: SkewPoly, target) -> list:
    if target == u.field:
        return [c.value for c in u.coeffs]
    if not isinstance(u.field, ExtField) or not isinstance(target, ExtField):
        raise FieldMismatch(f"cannot evaluate over {u.field!r} at {target!r}")
    emb = embedding(u.field, target)
    return [emb.raw(c.value) for c in u.coeffs]


def _target_twister(target, twist: int) -> _Twister:
    return _Twister(target, twist)


def skew_eval(u: SkewPoly, x: FieldElement) -> FieldElement:
    """Evaluate the linearized polynomial sum c_i x^(q^i) at ``x``.

    ``x`` may live in an extension of the coefficient field; coefficients are
    mapped through the canonical embedding.
    """
    return FieldElement(x.field, eval_raw(u, x.field, x.value))


def right_divmod(u: SkewPoly, v: SkewPoly) -> tuple[SkewPoly, SkewPoly]:
    """Return (quo, rem) with u = quo*v + rem and deg rem < deg v."""
    if u.field != v.field or u.twist != v.twist:
        raise FieldMismatch("skew polynomials over different rings")
    if not v.coeffs:
        raise DivisionByZero("right division by the zero skew polynomial")
    F = u.field
    tw = u.twister
    dv = v.degree
    r = [c.value for c in u.coeffs]
    bv = [c.value for c in v.coeffs]
    if len(r) - 1 < dv:
        return u._new([]), u
    quo = [F._zero] * (len(r) - dv)
    # bv_k[j] = v_j^(q^k), built lazily
    shifted = {0: bv}

    def vk(k):
        if k not in shifted:
            prev = vk(k - 1)
            shifted[k] = [tw.once(y) for y in prev]
        return shifted[k]

    for top in range(len(r) - 1, dv - 1, -1):
        c = r[top]
        if c == F._zero:
            continue
        k = top - dv
        row = vk(k)
        t = F._mul(c, F._inv(row[-1]))
        quo[k] = t
        for j, y in enumerate(row):
            if y != F._zero:
                r[k + j] = F._sub(r[k + j], F._mul(t, y))
    rem = [FieldElement(F, w) for w in r[:dv]]
    return u._new([FieldElement(F, w) for w in quo]), u._new(rem)


def right_gcd(u: SkewPoly, v: SkewPoly) -> SkewPoly:
    """Monic generator of the left ideal L<tau>u + L<tau>v."""
    a, b = u, v
    while b:
        a, b = b, right_divmod(a, b)[1]
    if not a:
        return a
    return a._new([a.leading.inverse()]) * a
