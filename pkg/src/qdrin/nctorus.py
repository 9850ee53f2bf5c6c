"""K-theory data of noncommutative tori with real multiplication.

Only the combinatorial shadow of the C*-algebras is modeled: skew-symmetric
Theta matrices with their SO(m,m|Z) action, and trace-image lattices
Z + (alpha_1/m_1)Z + ... + (alpha_r/m_r)Z inside a real number field together
with their multiplier rings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Sequence

from .algebraic import (AlgebraicReal, NFElement, NumberField, field_of, format_poly,
                        integer_left_kernel, lattice_basis, q_rank, q_solve_left)
from .errors import (ConstraintViolated, NotAModule, SingularDenominator, ValidationError,
                     ZeroDenominator)
from .quadorders import _class_set, reduce_indefinite

__all__ = [
    "AlgebraicReal", "NumberField", "K0Lattice", "HandelmanTriple", "ThetaMatrix", "SOElement",
    "scale_lattice", "endomorphism_order", "quadratic_class", "ideal_class_coset",
    "check_constraints", "so_mm_action", "morita_generators", "morita_search",
]


# ---------------------------------------------------------------------------
# lattices


class K0Lattice:
    """Z + sum (alpha_i / m_i) Z inside R."""

    def __init__(self, alphas: Sequence, denominators: Sequence[int] | None = None):
        self.alphas = [AlgebraicReal.coerce(a) for a in alphas]
        if not self.alphas:
            raise ValueError("a lattice needs at least one alpha")
        dens = [1] * len(self.alphas) if denominators is None else [int(m) for m in denominators]
        if len(dens) != len(self.alphas):
            raise ValueError("one denominator per alpha")
        if any(m == 0 for m in dens):
            raise ZeroDenominator("denominators must be nonzero")
        if any(m < 0 for m in dens):
            raise ValueError("denominators must be positive")
        self.denominators = dens
        self._field = None

    @property
    def rank(self) -> int:
        return len(self.alphas)

    def generators(self) -> list[AlgebraicReal]:
        """The values alpha_i / m_i (without the leading 1)."""
        return [a / m if m != 1 else a for a, m in zip(self.alphas, self.denominators)]

    def field(self):
        """(K, coords): the field generated by the alphas and the generators' coordinates."""
        if self._field is None:
            K, coords = field_of(self.alphas)
            gens = [K.one().coords]
            for c, m in zip(coords, self.denominators):
                gens.append(tuple(x / m for x in c))
            self._field = (K, gens)
        return self._field

    def __eq__(self, other):
        return (isinstance(other, K0Lattice) and self.alphas == other.alphas
                and self.denominators == other.denominators)

    def __hash__(self):
        return hash((tuple(a.poly for a in self.alphas), tuple(self.denominators)))

    def __repr__(self):
        parts = [f"({a})/{m}" if m != 1 else f"({a})" for a, m in zip(self.alphas, self.denominators)]
        return "K0Lattice(Z + " + " + ".join(f"{p}Z" for p in parts) + ")"

    def to_json(self) -> dict:
        return {"alphas": [a.to_json() for a in self.alphas], "denominators": self.denominators}

    @classmethod
    def from_json(cls, obj: dict) -> "K0Lattice":
        try:
            alphas = [AlgebraicReal.from_json(a) for a in obj["alphas"]]
            return cls(alphas, obj.get("denominators"))
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"bad lattice: {exc}") from None


def scale_lattice(L: K0Lattice, t: Sequence[int]) -> K0Lattice:
    """Divide each alpha_i by t_i on top of the existing denominators."""
    t = list(getattr(t, "m", t))
    if len(t) != L.rank:
        raise ValueError(f"tuple has length {len(t)}, lattice has rank {L.rank}")
    if any(x == 0 for x in t):
        raise ZeroDenominator("tuple entries must be nonzero")
    if any(x < 0 for x in t):
        raise ValueError("tuple entries must be positive")
    out = K0Lattice(L.alphas, [m * x for m, x in zip(L.denominators, t)])
    if L._field is not None:
        K, gens = L._field
        out._field = (K, [gens[0]] + [tuple(c / x for c in g) for g, x in zip(gens[1:], t)])
    return out


# ---------------------------------------------------------------------------
# multiplier rings


@dataclass
class HandelmanTriple:
    """(order, ideal, field) attached to a lattice.

    ``order_basis`` and the ideal rows are coordinate vectors in the power
    basis of ``field``; ``ideal_class`` is the lattice itself in Hermite normal
    form after clearing the common denominator.
    """

    order_basis: list[tuple[Fraction, ...]]
    ideal_class: dict
    field_K: tuple[int, ...]
    full: bool
    field: NumberField = dc_field(repr=False)
    module_basis: list[tuple[Fraction, ...]] = dc_field(repr=False, default_factory=list)

    @property
    def degree(self) -> int:
        return len(self.field_K) - 1

    def order_elements(self) -> list[NFElement]:
        return [self.field.element(b) for b in self.order_basis]

    def is_order(self) -> bool:
        """True iff the basis spans a ring (products re-expand integrally)."""
        basis = self.order_basis
        for x in basis:
            for y in basis:
                c = q_solve_left(basis, self.field.mul(x, y))
                if c is None or any(v.denominator != 1 for v in c):
                    return False
        return True

    def to_json(self) -> dict:
        return {
            "field_K": list(self.field_K),
            "field_K_str": format_poly(self.field_K),
            "field_interval": [str(self.field.theta.lo), str(self.field.theta.hi)],
            "order_basis": [[str(c) for c in b] for b in self.order_basis],
            "ideal_class": self.ideal_class,
            "full": self.full,
        }


def _module_hnf(vectors: Sequence[Sequence[Fraction]]) -> dict:
    den = math.lcm(*(Fraction(c).denominator for v in vectors for c in v))
    rows = [[int(Fraction(c) * den) for c in v] for v in vectors]
    return {"denominator": den, "hnf": lattice_basis(rows)}


def endomorphism_order(L: K0Lattice) -> HandelmanTriple:
    """The multiplier ring {x in K : x*M in M} of the lattice M."""
    K, gens = L.field()
    n = K.degree
    k = len(gens)
    if q_rank(gens) < k:
        raise NotAModule("lattice generators are linearly dependent over Q")
    # complete the generators to a Q-basis of K
    basis = [list(g) for g in gens]
    for j in range(n):
        e = [Fraction(int(i == j)) for i in range(n)]
        if q_rank(basis + [e]) > len(basis):
            basis.append(e)
    # coordinates of every product v_j * v_i in that basis
    int_cols, zero_cols = [], []
    for i in range(k):
        rows_i = [q_solve_left(basis, K.mul(gens[j], gens[i])) for j in range(k)]
        for t in range(n):
            col = [rows_i[j][t] for j in range(k)]
            (int_cols if t < k else zero_cols).append(col)
    den = math.lcm(1, *(c.denominator for col in int_cols + zero_cols for c in col))
    NV = [[int(col[j] * den) for col in int_cols] for j in range(k)]
    NC = [[int(col[j] * den) for col in zero_cols] for j in range(k)]
    big = [NV[j] + NC[j] for j in range(k)]
    for t in range(len(int_cols)):
        big.append([den * int(s == t) for s in range(len(int_cols))] + [0] * len(zero_cols))
    kernel = integer_left_kernel(big)
    coeffs = lattice_basis([row[:k] for row in kernel])
    order = []
    for a in coeffs:
        v = [Fraction(0)] * n
        for aj, g in zip(a, gens):
            if aj:
                v = [x + aj * y for x, y in zip(v, g)]
        order.append(tuple(v))
    order = _hnf_rows(order)
    ideal = _module_hnf(gens)
    return HandelmanTriple(order, ideal, K.poly, len(order) == n, K, [tuple(g) for g in gens])


def _hnf_rows(vectors) -> list[tuple[Fraction, ...]]:
    h = _module_hnf(vectors)
    d = h["denominator"]
    return [tuple(Fraction(c, d) for c in row) for row in h["hnf"]]


# ---------------------------------------------------------------------------
# quadratic case: ideal classes through binary quadratic forms


def _trace(K: NumberField, x) -> Fraction:
    M = K.mult_matrix(x)
    return sum(M[i][i] for i in range(K.degree))


def _norm(K: NumberField, x) -> Fraction:
    a, b = K.mult_matrix(x)
    return a[0] * b[1] - a[1] * b[0]


def order_discriminant(T: HandelmanTriple) -> int:
    K = T.field
    b = T.order_basis
    G = [[_trace(K, K.mul(x, y)) for y in b] for x in b]
    d = G[0][0] * G[1][1] - G[0][1] * G[1][0]
    assert d.denominator == 1
    return int(d)


def _module_form(K: NumberField, u, v) -> tuple[int, int, int]:
    a = _norm(K, u)
    b = _trace(K, u) * _trace(K, v) - _trace(K, K.mul(u, v))
    c = _norm(K, v)
    den = math.lcm(a.denominator, b.denominator, c.denominator)
    A, B, C = int(a * den), int(b * den), int(c * den)
    g = math.gcd(A, B, C)
    return A // g, B // g, C // g


def quadratic_class(T: HandelmanTriple, module=None) -> dict:
    """Wide class of a lattice in Cl(order) for a full module in a real quadratic field."""
    if T.degree != 2 or not T.full:
        raise ValueError("quadratic class needs a full module in a quadratic field")
    K = T.field
    rows = _hnf_rows(module if module is not None else T.module_basis)
    f = _module_form(K, rows[0], rows[1])
    D = order_discriminant(T)
    if f[1] ** 2 - 4 * f[0] * f[2] != D:
        raise ArithmeticError("module is not proper for the order")
    cs = _class_set(D, False)
    return {"discriminant": D, "form": list(f), "class": list(cs.label[reduce_indefinite(f, D)])}


def ideal_class_coset(fine: HandelmanTriple, coarse: HandelmanTriple) -> dict:
    """Compare two lattices along the map Cl(fine order) -> Cl(coarse order), I -> I*coarse.

    Reports whether the fine order sits inside the coarse one, the image of
    the fine class, whether it equals the coarse class, and the size of the
    kernel h(fine)/h(coarse).
    """
    if fine.field != coarse.field:
        raise ValueError("lattices live in different fields")
    K = fine.field
    contained = all(
        (c := q_solve_left(coarse.order_basis, x)) is not None and all(v.denominator == 1 for v in c)
        for x in fine.order_basis)
    prods = [K.mul(x, y) for x in fine.module_basis for y in coarse.order_basis]
    image = quadratic_class(coarse, prods)
    target = quadratic_class(coarse)
    D_fine, D_coarse = order_discriminant(fine), order_discriminant(coarse)
    h_fine = len(_class_set(D_fine, False).forms)
    h_coarse = len(_class_set(D_coarse, False).forms)
    return {
        "order_contained": contained,
        "image_class": image["class"],
        "target_class": target["class"],
        "in_coset": image["class"] == target["class"],
        "kernel_order": h_fine // h_coarse if h_fine % h_coarse == 0 else None,
        "discriminants": [D_fine, D_coarse],
    }


# ---------------------------------------------------------------------------
# Theta matrices and the SO(m,m|Z) action


def _mat_mul(A, B):
    n, k, m = len(A), len(B), len(B[0])
    return [[sum((A[i][t] * B[t][j] for t in range(k)), start=_zero_like(A, B)) for j in range(m)]
            for i in range(n)]


def _zero_like(A, B):
    for M in (A, B):
        for row in M:
            for x in row:
                if isinstance(x, NFElement):
                    return x.field.zero()
    return 0


def _mat_add(A, B):
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def _transpose(A):
    return [list(c) for c in zip(*A)]


def _identity(m):
    return [[int(i == j) for j in range(m)] for i in range(m)]


def _mat_inverse(M):
    """Gauss-Jordan inverse over a number field; None if singular."""
    n = len(M)
    F = next(x.field for row in M for x in row if isinstance(x, NFElement))
    A = [[F.scalar(x) if not isinstance(x, NFElement) else x for x in row]
         + [F.scalar(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for c in range(n):
        p = next((i for i in range(c, n) if A[i][c]), None)
        if p is None:
            return None
        A[c], A[p] = A[p], A[c]
        inv = A[c][c].inverse()
        A[c] = [x * inv for x in A[c]]
        for i in range(n):
            if i != c and A[i][c]:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[c])]
    return [row[n:] for row in A]


class ThetaMatrix:
    """Skew-symmetric m x m matrix with entries in a real number field."""

    def __init__(self, field: NumberField, entries: Sequence[Sequence]):
        self.field = field
        self.m = len(entries)
        self.entries = [[e if isinstance(e, NFElement) else field.scalar(e) for e in row]
                        for row in entries]
        for i in range(self.m):
            for j in range(self.m):
                if self.entries[i][j] != -self.entries[j][i]:
                    raise ValueError("Theta must be skew-symmetric")
        self.k0_rank = 2 ** (self.m - 1)

    @classmethod
    def from_values(cls, values: Sequence[Sequence]) -> "ThetaMatrix":
        m = len(values)
        vals = [[AlgebraicReal.coerce(v) for v in row] for row in values]
        irr = []
        for i in range(m):
            for j in range(i + 1, m):
                if not vals[i][j].is_rational() and vals[i][j] not in irr:
                    irr.append(vals[i][j])
        K, coords = field_of(irr)
        lookup = {i: c for i, c in enumerate(coords)}

        def conv(v: AlgebraicReal):
            if v.is_rational():
                return K.scalar(v.lo)
            return K.element(lookup[irr.index(v)])

        entries = [[None] * m for _ in range(m)]
        for i in range(m):
            entries[i][i] = K.zero()
            for j in range(i + 1, m):
                entries[i][j] = conv(vals[i][j])
                entries[j][i] = -entries[i][j]
        return cls(K, entries)

    @classmethod
    def from_upper(cls, m: int, upper: Sequence) -> "ThetaMatrix":
        """Build from the strictly upper-triangular entries, row by row."""
        vals = [[0] * m for _ in range(m)]
        it = iter(upper)
        for i in range(m):
            for j in range(i + 1, m):
                v = AlgebraicReal.coerce(next(it))
                vals[i][j] = v
                vals[j][i] = -v
        return cls.from_values(vals)

    def key(self):
        return tuple(e.coords for row in self.entries for e in row)

    def __eq__(self, other):
        return isinstance(other, ThetaMatrix) and self.field == other.field and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"ThetaMatrix(m={self.m}, {self.field!r})"

    def approx(self, bits: int = 53):
        return [[e.approx(bits) for e in row] for row in self.entries]

    def inverse(self) -> "ThetaMatrix":
        inv = _mat_inverse(self.entries)
        if inv is None:
            raise SingularDenominator("Theta is singular")
        return ThetaMatrix(self.field, inv)

    def to_json(self) -> dict:
        out = []
        for row in self.entries:
            r = []
            for e in row:
                if e.is_rational():
                    r.append(str(e.coords[0]))
                else:
                    a = e.to_real()
                    r.append({"min_poly": list(a.poly), "interval": [str(a.lo), str(a.hi)]})
            out.append(r)
        return {"m": self.m, "k0_rank": self.k0_rank, "entries": out}

    @classmethod
    def from_json(cls, obj: dict) -> "ThetaMatrix":
        try:
            rows = obj["entries"]
            return cls.from_values([[AlgebraicReal.from_json(v) for v in row] for row in rows])
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"bad Theta matrix: {exc}") from None


@dataclass(frozen=True)
class SOElement:
    """Block matrix [[A, B], [C, D]] with integer entries."""

    A: tuple
    B: tuple
    C: tuple
    D: tuple
    label: str = ""

    @classmethod
    def of(cls, A, B, C, D, label: str = "") -> "SOElement":
        t = lambda M: tuple(tuple(int(x) for x in row) for row in M)
        return cls(t(A), t(B), t(C), t(D), label)

    @property
    def m(self) -> int:
        return len(self.A)

    def __matmul__(self, other: "SOElement") -> "SOElement":
        """Block product self * other (act by other first)."""
        A = _mat_add(_mat_mul(self.A, other.A), _mat_mul(self.B, other.C))
        B = _mat_add(_mat_mul(self.A, other.B), _mat_mul(self.B, other.D))
        C = _mat_add(_mat_mul(self.C, other.A), _mat_mul(self.D, other.C))
        D = _mat_add(_mat_mul(self.C, other.B), _mat_mul(self.D, other.D))
        return SOElement.of(A, B, C, D, f"{self.label}*{other.label}".strip("*"))

    def to_json(self) -> dict:
        return {"label": self.label, "A": self.A, "B": self.B, "C": self.C, "D": self.D}


IDENTITIES = ("A^tD+C^tB=I", "A^tC+C^tA=0", "B^tD+D^tB=0")


def check_constraints(g: SOElement) -> None:
    """Raise ConstraintViolated naming the first identity that fails."""
    At, Bt, Ct, Dt = (_transpose(M) for M in (g.A, g.B, g.C, g.D))
    m = g.m
    lhs = [
        _mat_add(_mat_mul(At, g.D), _mat_mul(Ct, g.B)),
        _mat_add(_mat_mul(At, g.C), _mat_mul(Ct, g.A)),
        _mat_add(_mat_mul(Bt, g.D), _mat_mul(Dt, g.B)),
    ]
    rhs = [_identity(m), [[0] * m for _ in range(m)], [[0] * m for _ in range(m)]]
    for name, L, R in zip(IDENTITIES, lhs, rhs):
        if [list(r) for r in L] != R:
            raise ConstraintViolated(name)


def satisfies_constraints(g: SOElement) -> bool:
    try:
        check_constraints(g)
    except ConstraintViolated:
        return False
    return True


def so_mm_action(theta: ThetaMatrix, g: SOElement) -> ThetaMatrix:
    """(A Theta + B)(C Theta + D)^(-1)."""
    if g.m != theta.m:
        raise ValueError("dimension mismatch")
    check_constraints(g)
    T = theta.entries
    num = _mat_add(_mat_mul(g.A, T), g.B)
    den = _mat_add(_mat_mul(g.C, T), g.D)
    inv = _mat_inverse(den)
    if inv is None:
        raise SingularDenominator("C*Theta + D is singular")
    out = _mat_mul(num, inv)
    result = ThetaMatrix.__new__(ThetaMatrix)
    result.field = theta.field
    result.m = theta.m
    result.entries = [[x if isinstance(x, NFElement) else theta.field.scalar(x) for x in row]
                      for row in out]
    result.k0_rank = theta.k0_rank
    for i in range(result.m):
        for j in range(result.m):
            assert result.entries[i][j] == -result.entries[j][i], "action broke skew-symmetry"
    return result


def morita_generators(m: int, entry_bound: int = 1) -> list[SOElement]:
    """Deterministic generating list: inversion, shears by skew N, and diag(R, R^-t)."""
    I = _identity(m)
    Z = [[0] * m for _ in range(m)]
    gens = [SOElement.of(Z, I, I, Z, "inv")]
    ks = [k for v in range(1, entry_bound + 1) for k in (v, -v)]
    for i in range(m):
        for j in range(i + 1, m):
            for k in ks:
                N = [row[:] for row in Z]
                N[i][j], N[j][i] = k, -k
                gens.append(SOElement.of(I, N, Z, I, f"upper[{i},{j}]={k}"))
                gens.append(SOElement.of(I, Z, N, I, f"lower[{i},{j}]={k}"))
    for i in range(m):
        for j in range(m):
            if i == j:
                continue
            for k in ks:
                R = [row[:] for row in I]
                R[i][j] = k
                Rit = [row[:] for row in I]
                Rit[j][i] = -k
                gens.append(SOElement.of(R, Z, Z, Rit, f"elem[{i},{j}]={k}"))
    for i in range(m):
        R = [row[:] for row in I]
        R[i][i] = -1
        gens.append(SOElement.of(R, Z, Z, R, f"neg[{i}]"))
    return gens


@dataclass
class MoritaResult:
    word: list[str] | None
    element: SOElement | None
    explored: int
    conclusive: bool

    def to_json(self) -> dict:
        return {"word": self.word, "element": self.element.to_json() if self.element else None,
                "explored": self.explored, "found": self.word is not None,
                "note": None if self.word is not None else "inconclusive: no witness within bounds"}


def _express_theta(theta: ThetaMatrix, field: NumberField):
    if theta.field == field:
        return theta.key()
    out = []
    for row in theta.entries:
        for e in row:
            if e.is_rational():
                out.append(field.scalar(e.coords[0]).coords)
                continue
            c = field.contains(e.to_real())
            if c is None:
                return None
            out.append(tuple(c))
    return tuple(out)


def morita_search(theta1: ThetaMatrix, theta2: ThetaMatrix, entry_bound: int = 1,
                  depth: int = 2) -> MoritaResult:
    """Breadth-first search for a word g with g . theta1 = theta2 (exact comparison)."""
    if theta1.m != theta2.m:
        raise ValueError("dimension mismatch")
    target = _express_theta(theta2, theta1.field)
    if target is None:
        return MoritaResult(None, None, 0, False)
    if theta1.key() == target:
        I = _identity(theta1.m)
        Z = [[0] * theta1.m for _ in range(theta1.m)]
        return MoritaResult([], SOElement.of(I, Z, Z, I, "id"), 1, True)
    gens = morita_generators(theta1.m, entry_bound)
    frontier = [([], None, theta1)]
    seen = {theta1.key()}
    explored = 1
    for _ in range(depth):
        nxt = []
        for word, elt, th in frontier:
            for g in gens:
                try:
                    th2 = so_mm_action(th, g)
                except SingularDenominator:
                    continue
                explored += 1
                key = th2.key()
                if key in seen:
                    continue
                composed = g if elt is None else g @ elt
                w = word + [g.label]
                if key == target:
                    return MoritaResult(w, composed, explored, True)
                seen.add(key)
                nxt.append((w, composed, th2))
        frontier = nxt
    return MoritaResult(None, None, explored, False)
