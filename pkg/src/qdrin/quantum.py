"""The triple (order, ideal class, field) attached to a variety descriptor,
numeric generators of k, root extensions of number fields and a lattice
reduction search for minimal polynomials."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath
import sympy

from . import algebraic
from .algebraic import (
    AlgebraicReal,
    NumberField,
    adjoin,
    format_poly,
    irreducible_factors,
    lll,
    primitive_part,
)
from .errors import (
    ConventionUnavailable,
    DegreeCapExceeded,
    PrecisionTooLow,
    RankMismatch,
    ValidationError,
)
from .functor_f import Epsilon, IsogenyTuple, RMTorusImage, parse_epsilon, torsion_image
from .nctorus import K0Lattice, endomorphism_order, quadratic_class

LOG_BRANCH = "log k"
ARCCOS_BRANCH = "arccos k"


@dataclass(frozen=True)
class NumberFieldDesc:
    defining_poly: tuple[int, ...]
    embedding_hint: tuple[Fraction, Fraction]
    is_real: bool = True

    @classmethod
    def of(cls, K: NumberField) -> "NumberFieldDesc":
        t = K.theta
        return cls(tuple(t.poly), (t.lo, t.hi), True)

    @classmethod
    def rationals(cls) -> "NumberFieldDesc":
        return cls((0, 1), (Fraction(0), Fraction(0)), True)

    def to_field(self) -> NumberField:
        if not self.is_real:
            raise ConventionUnavailable("only real embeddings are represented exactly")
        if len(self.defining_poly) == 2:
            return NumberField.rationals()
        lo, hi = self.embedding_hint
        return NumberField(AlgebraicReal(self.defining_poly, lo, hi))

    @property
    def degree(self) -> int:
        return len(self.defining_poly) - 1

    def to_json(self) -> dict:
        return {
            "defining_poly": list(self.defining_poly),
            "defining_poly_str": format_poly(self.defining_poly),
            "embedding_hint": [str(x) for x in self.embedding_hint],
            "is_real": self.is_real,
            "degree": self.degree,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "NumberFieldDesc":
        if not bool(obj.get("is_real", True)):
            raise ConventionUnavailable("complex embeddings are not supported for exact fields")
        try:
            poly = primitive_part([int(c) for c in obj["defining_poly"]])
            hint = obj.get("embedding_hint", ["0", "0"])
            is_real = True
            desc = cls(tuple(poly), (Fraction(hint[0]), Fraction(hint[1])), is_real)
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"bad number field: {exc}") from None
        desc.to_field()  # validates irreducibility and the isolating interval
        return desc


@dataclass
class VarietyDescriptor:
    kind: str
    alphas: list[AlgebraicReal]
    epsilon: Epsilon
    k_is_real: bool = False
    n: int | None = None
    provenance: str = ""
    k0: dict | None = None

    def __post_init__(self):
        if self.kind not in ("cm_abelian", "raw"):
            raise ValidationError(f"unknown variety kind {self.kind!r}")
        if not self.alphas:
            raise ValidationError("at least one alpha is required")
        if self.kind == "cm_abelian":
            if self.n is None or self.n != len(self.alphas):
                raise RankMismatch(f"cm_abelian with n={self.n} needs exactly n alphas, got {len(self.alphas)}")
            if self.k_is_real:
                raise ValidationError("a CM abelian variety is defined over a non-real field")

    @property
    def rank(self) -> int:
        return len(self.alphas)

    @property
    def branch(self) -> str:
        return ARCCOS_BRANCH if self.k_is_real else LOG_BRANCH

    def lattice(self) -> K0Lattice:
        return K0Lattice(self.alphas)

    @classmethod
    def cm_abelian(cls, n: int, alphas: Sequence, epsilon, provenance: str = "") -> "VarietyDescriptor":
        return cls("cm_abelian", [AlgebraicReal.coerce(a) for a in alphas], _eps(epsilon), False, n, provenance)

    @classmethod
    def raw(cls, alphas: Sequence, epsilon, k_is_real: bool, provenance: str = "") -> "VarietyDescriptor":
        return cls("raw", [AlgebraicReal.coerce(a) for a in alphas], _eps(epsilon), k_is_real, None, provenance)

    @classmethod
    def from_image(cls, img: RMTorusImage, k_is_real: bool = False) -> "VarietyDescriptor":
        return cls("raw", list(img.lattice.generators()), img.epsilon, k_is_real, None,
                   f"image under {img.construction_tag}")

    def to_json(self) -> dict:
        out = {"kind": self.kind, "alphas": [a.to_json() for a in self.alphas],
               "epsilon": self.epsilon.to_json(), "k_is_real": self.k_is_real,
               "provenance": self.provenance}
        if self.n is not None:
            out["n"] = self.n
        if self.k0 is not None:
            out["k0"] = self.k0
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "VarietyDescriptor":
        try:
            alphas = [_parse_alpha(a) for a in obj["alphas"]]
            eps = Epsilon.from_json(obj["epsilon"])
            return cls(obj["kind"], alphas, eps, bool(obj.get("k_is_real", False)),
                       obj.get("n"), obj.get("provenance", ""), obj.get("k0"))
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"bad variety descriptor: {exc}") from None


def _eps(e) -> Epsilon:
    if isinstance(e, Epsilon):
        return e
    if isinstance(e, str):
        return parse_epsilon(e)
    if isinstance(e, dict):
        return Epsilon.from_json(e)
    return Epsilon(AlgebraicReal.coerce(e))


def _parse_alpha(a) -> AlgebraicReal:
    """An alpha given as JSON: an algebraic-real object, a rational, or a sympy expression."""
    return AlgebraicReal.from_json(a)


# ---------------------------------------------------------------------------


def q_invariant(v: VarietyDescriptor, precision_bits: int = 128) -> dict:
    """The triple (Lambda, [I], field) with the branch tag selecting log k or arccos k."""
    L = v.lattice()
    T = endomorphism_order(L)
    K = T.field
    if K.degree > algebraic.DEGREE_CAP:
        raise DegreeCapExceeded(f"field degree {K.degree} exceeds {algebraic.DEGREE_CAP}")
    out = {
        "triple": T.to_json(),
        "order_is_ring": T.is_order(),
        "field": NumberFieldDesc.of(K).to_json() if K.degree > 1 else NumberFieldDesc.rationals().to_json(),
        "branch": v.branch,
        "rank": v.rank,
        "kind": v.kind,
        "epsilon": v.epsilon.to_json(),
    }
    if T.degree == 2 and T.full:
        out["quadratic_class"] = quadratic_class(T)
    if v.k0 is not None:
        out["k0"] = v.k0
    out["_triple"] = T
    return out


def k_generators(v: VarietyDescriptor, precision_bits: int = 128) -> list:
    """exp(2 pi i alpha + log log eps) in the log branch, cos(2 pi alpha) * log eps in the other."""
    if not v.k_is_real:
        img = RMTorusImage({}, v.lattice(), v.epsilon, "descriptor")
        return torsion_image(img, precision_bits)
    out = []
    with mpmath.workprec(precision_bits + 32):
        L = v.epsilon.log(precision_bits + 32)
        for a in v.alphas:
            out.append(mpmath.cos(2 * mpmath.pi * a.approx(precision_bits + 32)) * L)
    with mpmath.workprec(precision_bits):
        return [+x for x in out]


def _cos_pi_over(m: int) -> AlgebraicReal:
    return AlgebraicReal.from_sympy(sympy.cos(sympy.pi / m))


def _root_value(x: AlgebraicReal, m: int, real_part: bool) -> AlgebraicReal:
    """Principal m-th root of x, or its real part."""
    s = x.sign()
    if s >= 0:
        return x.nth_root(m) if s else x
    if not real_part:
        raise ConventionUnavailable("the principal root of a negative number is not real; "
                                    "use the real-part branch")
    # principal root is |x|^(1/m) * exp(i pi/m)
    r = (-x).nth_root(m)
    return r * _cos_pi_over(m) if m > 2 else AlgebraicReal.rational(0)


def extend_by_roots(k: NumberFieldDesc, t: IsogenyTuple, x_list: Sequence,
                    real_part: bool = False) -> dict:
    """k(x_1^(1/m_1), ..., x_r^(1/m_r)) as one primitive-element field.

    ``x_list`` holds power-basis coordinate vectors of elements of k (or a
    single vector used for every index).  With ``real_part`` the real parts
    of the principal roots are adjoined instead.
    """
    K = k.to_field()
    xs = list(x_list)
    if xs and not isinstance(xs[0], (list, tuple)):
        xs = [xs]
    if len(xs) == 1 and len(t) > 1:
        xs = xs * len(t)
    if len(xs) != len(t):
        raise RankMismatch(f"{len(xs)} elements for a tuple of length {len(t)}")
    bound = k.degree * math.prod(t.m)
    steps = []
    for coords, m in zip(xs, t.m):
        x = K.element([Fraction(c) for c in coords]).to_real()
        if m == 1:
            steps.append({"m": 1, "degree": K.degree})
            continue
        y = _root_value(x, m, real_part)
        if K.degree * y.degree > algebraic.DEGREE_CAP:
            raise DegreeCapExceeded(f"extension degree would exceed {algebraic.DEGREE_CAP}")
        if y.is_rational():
            steps.append({"m": m, "degree": K.degree})
            continue
        if K.degree == 1:
            K = NumberField(y)
        else:
            K, _, _ = adjoin(K, y)
        if K.degree > algebraic.DEGREE_CAP:
            raise DegreeCapExceeded(f"extension degree {K.degree} exceeds {algebraic.DEGREE_CAP}")
        steps.append({"m": m, "degree": K.degree})
    desc = NumberFieldDesc.of(K) if K.degree > 1 else NumberFieldDesc.rationals()
    return {"field": desc, "degree": desc.degree, "degree_bound": bound, "steps": steps}


# ---------------------------------------------------------------------------


def _to_mp(value, bits):
    if isinstance(value, str):
        s = value.strip().replace(" ", "")
        return mpmath.mpmathify(s.replace("i", "j")) if ("i" in s or "j" in s) else mpmath.mpf(s)
    return mpmath.mpmathify(value)


def _poly_value(p, z):
    acc = 0
    for c in reversed(p):
        acc = acc * z + c
    return acc


def min_poly_guess(value, degree_bound: int, height_bound: int, precision_bits: int = 128) -> dict | None:
    """Search for an integer polynomial of small degree and height vanishing at ``value``.

    HEURISTIC: the result is a candidate found by lattice reduction, checked
    only numerically.  Returns a report or None.
    """
    if degree_bound < 1 or height_bound < 1:
        raise ValueError("bounds must be positive")
    need = 2 * degree_bound * math.log2(max(height_bound, 2))
    if precision_bits < need:
        raise PrecisionTooLow(f"{precision_bits} bits is below the floor {math.ceil(need)} "
                              f"for degree {degree_bound} and height {height_bound}")
    bits = precision_bits
    tol_exp = (3 * bits) // 4
    with mpmath.workprec(bits + 32):
        z = _to_mp(value, bits)
        is_complex = isinstance(z, mpmath.mpc) and z.imag != 0
        scale = mpmath.mpf(2) ** tol_exp
        tol = mpmath.mpf(2) ** (-tol_exp) * height_bound * (degree_bound + 1)
        for d in range(1, degree_bound + 1):
            powers = [mpmath.mpf(1)]
            for _ in range(d):
                powers.append(powers[-1] * z)
            rows = []
            for i, p in enumerate(powers):
                row = [int(i == j) for j in range(d + 1)]
                row.append(int(mpmath.nint(mpmath.re(p) * scale)))
                if is_complex:
                    row.append(int(mpmath.nint(mpmath.im(p) * scale)))
                rows.append(row)
            reduced = lll(rows)
            for vec in reduced[:2]:
                coeffs = vec[: d + 1]
                if not any(coeffs) or max(abs(c) for c in coeffs) > height_bound:
                    continue
                best = None
                for f in irreducible_factors(primitive_part(coeffs)):
                    if len(f) < 2:
                        continue
                    r = abs(_poly_value(f, z))
                    if best is None or r < best[1]:
                        best = (f, r)
                if best is None or best[1] > tol:
                    continue
                f = best[0]
                if f[-1] < 0:
                    f = tuple(-c for c in f)
                if max(abs(c) for c in f) > height_bound:
                    continue
                return {
                    "poly": list(f),
                    "poly_str": format_poly(f),
                    "degree": len(f) - 1,
                    "residual": mpmath.nstr(best[1], 5),
                    "tolerance": mpmath.nstr(tol, 5),
                    "precision_bits": bits,
                    "heuristic": True,
                }
    return None
