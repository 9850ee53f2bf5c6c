"""Drinfeld modules over finite A-fields, A = F_q[T].

A module is fixed by ``rho_T`` in L<tau>, L a finite extension of F_q; the
structure map sends T to the constant term of ``rho_T``.  Torsion is found
by linear algebra: ``x -> rho_a(x)`` is F_q-linear on every extension of L,
so its kernel there is a null space.
"""

from __future__ import annotations

import functools
import random
from dataclasses import dataclass, field
from typing import Sequence

from . import fqlinalg as la
from .errors import (BadCharacteristic, DegreeCapExceeded, ModuleMismatch,
                     ValidationError, ZeroInput)
from .fqpoly import APoly, ExtField, FieldElement, FieldSpec, make_extension, parse_apoly
from .skew import SkewPoly, coefficient_values, eval_raw

DEFAULT_FIELD_CAP = 2 ** 16


class DrinfeldModule:
    """rho: F_q[T] -> L<tau> determined by ``rho_T`` (tau-degree = rank)."""

    def __init__(self, L: ExtField, rho_T: SkewPoly | Sequence):
        if not isinstance(rho_T, SkewPoly):
            rho_T = SkewPoly(L, [L(c) for c in rho_T])
        if rho_T.field != L:
            raise ModuleMismatch("rho_T must have coefficients in L")
        if rho_T.twist != L.q:
            raise ModuleMismatch("rho_T must be twisted by the q-Frobenius")
        if rho_T.degree < 1:
            raise ValueError("a Drinfeld module needs tau-degree >= 1")
        self.L = L
        self.base: FieldSpec = L.base
        self.q = L.q
        self.m = L.m
        self.rho_T = rho_T
        self.rank = rho_T.degree
        self.gamma_T = rho_T[0]

    def __eq__(self, other):
        return isinstance(other, DrinfeldModule) and self.rho_T == other.rho_T

    def __hash__(self):
        return hash(self.rho_T)

    def __repr__(self):
        return f"DrinfeldModule({self.L!r}, rho_T={self.rho_T})"

    def T(self) -> APoly:
        return APoly.x(self.base)

    def A(self, text: str) -> APoly:
        return parse_apoly(text, self.base)

    def gamma(self, a: APoly) -> FieldElement:
        """Structure map A -> L."""
        return a.evaluate(self.gamma_T)

    def characteristic(self) -> APoly:
        """The A-characteristic: monic generator of ker(gamma)."""
        return _min_poly_over_base(self.gamma_T)

    def is_prime_to_characteristic(self, a: APoly) -> bool:
        return bool(self.gamma(a))

    def compatible(self, other: "DrinfeldModule") -> bool:
        return self.L == other.L and self.rank == other.rank

    def to_json(self) -> dict:
        return {
            "q_field": self.base.to_json(),
            "L_degree": self.m,
            "L_modulus": list(self.L.modulus),
            "gamma_T": str(self.gamma_T),
            "rho_T": self.rho_T.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "DrinfeldModule":
        try:
            base = FieldSpec.from_json(obj["q_field"])
            m = int(obj.get("L_degree", 1))
            if "L_modulus" in obj:
                L = ExtField(base, m, obj["L_modulus"])
            else:
                L = make_extension(base, m)
            rho = SkewPoly.from_json(L, obj["rho_T"])
        except (KeyError, ValueError, TypeError) as exc:
            raise ValidationError(f"bad Drinfeld module descriptor: {exc}") from None
        if "gamma_T" in obj and L.parse(obj["gamma_T"]) != rho[0]:
            raise ValidationError("gamma_T must equal the constant term of rho_T")
        return cls(L, rho)


def _min_poly_over_base(x: FieldElement) -> APoly:
    L = x.field
    conj = [x]
    while True:
        nxt = L.frob_q(conj[-1])
        if nxt == x:
            break
        conj.append(nxt)
    acc = APoly(L, [L.one])
    for c in conj:
        acc = acc * APoly(L, [-c, L.one])
    return APoly(L.base, [FieldElement(L.base, c.value[0]) for c in acc.coeffs])


def random_module(rng: random.Random, base: FieldSpec, m: int, rank: int) -> DrinfeldModule:
    L = make_extension(base, m)
    coeffs = [L.random_element(rng) for _ in range(rank)]
    coeffs.append(L.random_element(rng, nonzero=True))
    return DrinfeldModule(L, SkewPoly(L, coeffs))


def rho_of(D: DrinfeldModule, a: APoly) -> SkewPoly:
    """Image of ``a`` in L<tau>, by Horner's rule in rho_T."""
    if not a:
        raise ZeroInput("rho_of needs a nonzero polynomial")
    if a.field != D.base:
        raise ModuleMismatch(f"{a} is not in F_q[T] for {D.base!r}")
    L = D.L
    acc = SkewPoly(L, [L.embed_base(a.leading)])
    for c in reversed(a.coeffs[:-1]):
        acc = acc * D.rho_T + L.embed_base(c)
    return acc


# ---------------------------------------------------------------------------
# Torsion


@dataclass
class TorsionModule:
    """Lambda_rho[a] inside its splitting field.

    ``kernel_basis`` is an F_q-basis of the torsion points; ``phi`` is the
    matrix of rho_T on it (columns are images); ``module_basis`` generates
    the points as an A/aA-module; ``structure`` lists the invariant factors.
    """

    module: DrinfeldModule
    a: APoly
    splitting_field: ExtField
    extension_degree: int
    kernel_basis: list[FieldElement]
    free_columns: list[int]
    phi: list[list[int]]
    module_basis: list[list[int]]
    structure: list[APoly]
    _points: list[FieldElement] | None = field(default=None, repr=False)

    @property
    def dimension(self) -> int:
        return len(self.kernel_basis)

    @property
    def size(self) -> int:
        return self.module.q ** self.dimension

    def coords(self, x: FieldElement) -> list[int]:
        """Coordinates of a torsion point in ``kernel_basis``."""
        return [x.value[c] for c in self.free_columns]

    def element(self, coords: Sequence[int]) -> FieldElement:
        K = self.splitting_field
        v = K._zero
        for c, b in zip(coords, self.kernel_basis):
            if c:
                v = K._add(v, K._scale(c, b.value))
        return FieldElement(K, v)

    @property
    def points(self) -> list[FieldElement]:
        if self._points is None:
            q = self.module.q
            pts = []
            for idx in range(self.size):
                coords = []
                for _ in range(self.dimension):
                    idx, d = divmod(idx, q)
                    coords.append(d)
                pts.append(self.element(coords))
            self._points = pts
        return self._points

    @property
    def generators(self) -> list[FieldElement]:
        return [self.element(c) for c in self.module_basis]

    def to_json(self, with_points: bool = True) -> dict:
        out = {
            "a": str(self.a),
            "splitting_field": self.splitting_field.to_json(),
            "extension_degree": self.extension_degree,
            "size": self.size,
            "kernel_basis": [str(b) for b in self.kernel_basis],
            "module_basis": [str(g) for g in self.generators],
            "invariant_factors": [str(f) for f in self.structure],
        }
        if with_points:
            out["points"] = [str(p) for p in self.points]
        return out


def linear_map_matrix(u: SkewPoly, K: ExtField) -> list[list[int]]:
    """Matrix over F_q of x -> u(x) on K (columns = images of basis vectors)."""
    cv = coefficient_values(u, K)
    cols = []
    for j in range(K.m):
        e = tuple(1 if i == j else 0 for i in range(K.m))
        cols.append(list(eval_raw(u, K, e, cv)))
    return la.transpose(cols)


def kernel_in(u: SkewPoly, K: ExtField):
    """F_q-basis of the roots of the linearized polynomial ``u`` lying in K."""
    M = linear_map_matrix(u, K)
    basis = la.nullspace(M, K.m, K.base)
    R, pivots = la.rref(M, K.base)
    free = [c for c in range(K.m) if c not in set(pivots)]
    return [FieldElement(K, tuple(v)) for v in basis], free


def torsion(D: DrinfeldModule, a: APoly, cap: int = DEFAULT_FIELD_CAP,
            seed: int = 0) -> TorsionModule:
    """Lambda_rho[a], computed in the smallest extension of L that splits it."""
    rho_a = rho_of(D, a)
    target_dim = rho_a.degree - rho_a.valuation
    base = D.base
    k = 1
    while True:
        K = D.L if k == 1 else make_extension(base, D.m * k)
        if K.order > cap:
            raise DegreeCapExceeded(
                f"splitting field of rho_a exceeds {cap} elements (degree {D.m * k} over F_q)")
        basis, free = kernel_in(rho_a, K)
        if len(basis) == target_dim:
            break
        k += 1
    phi = _action_matrix(D.rho_T, K, basis, free)
    structure = _invariant_factors(phi, base)
    gens = _find_generators(phi, len(structure), base, len(basis), seed)
    return TorsionModule(D, a, K, k, basis, free, phi, gens, structure)


def _action_matrix(u: SkewPoly, K: ExtField, basis, free) -> list[list[int]]:
    cv = coefficient_values(u, K)
    cols = []
    for b in basis:
        img = eval_raw(u, K, b.value, cv)
        cols.append([img[c] for c in free])
    return la.transpose(cols) if cols else []


def _krylov_rank(phi, vectors, F, dim) -> int:
    if dim == 0:
        return 0
    vecs = []
    for v in vectors:
        w = list(v)
        for _ in range(dim):
            vecs.append(w)
            w = la.matvec(phi, w, F)
    return la.rank(vecs, F)


def _find_generators(phi, count: int, F: FieldSpec, dim: int, seed: int) -> list[list[int]]:
    """``count`` vectors generating F_q^dim as an F_q[phi]-module (seeded search)."""
    if dim == 0 or count == 0:
        return []
    rng = random.Random(seed)
    for _ in range(10000):
        cand = [[rng.randrange(F.q) for _ in range(dim)] for _ in range(count)]
        if _krylov_rank(phi, cand, F, dim) == dim:
            return cand
    raise RuntimeError("failed to find module generators")  # pragma: no cover


def smith_invariants(M: list[list[APoly]]) -> list[APoly]:
    """Non-unit invariant factors of a square matrix over F_q[T], d_1 | d_2 | ..."""
    M = [list(r) for r in M]
    n = len(M)
    if n == 0:
        return []
    ncols = len(M[0])
    diag = []
    for t in range(min(n, ncols)):
        while True:
            best = None
            for i in range(t, n):
                for j in range(t, ncols):
                    e = M[i][j]
                    if e and (best is None or e.degree < M[best[0]][best[1]].degree):
                        best = (i, j)
            if best is None:
                break
            i, j = best
            M[t], M[i] = M[i], M[t]
            for row in M:
                row[t], row[j] = row[j], row[t]
            p = M[t][t]
            clean = True
            for i in range(t + 1, n):
                if M[i][t]:
                    qt, r = divmod(M[i][t], p)
                    M[i] = [x - qt * y for x, y in zip(M[i], M[t])]
                    clean = clean and not r
            for j in range(t + 1, ncols):
                if M[t][j]:
                    qt, r = divmod(M[t][j], p)
                    for row in M:
                        row[j] = row[j] - qt * row[t]
                    clean = clean and not r
            if not clean:
                continue
            bad = next((i for i in range(t + 1, n) for j in range(t + 1, ncols)
                        if M[i][j] % p), None)
            if bad is not None:
                M[t] = [x + y for x, y in zip(M[t], M[bad])]
                continue
            break
        if best is None:
            break
        diag.append(M[t][t].monic())
    return [d for d in diag if d.degree >= 1]


def _invariant_factors(phi: list[list[int]], F: FieldSpec) -> list[APoly]:
    n = len(phi)
    T = APoly.x(F)
    M = [[(T if i == j else APoly(F)) - FieldElement(F, phi[i][j]) for j in range(n)]
         for i in range(n)]
    return smith_invariants(M)


# ---------------------------------------------------------------------------
# Galois image


@dataclass
class GaloisImage:
    """Matrix of the |L|-power Frobenius on an A/aA-basis of Lambda_rho[a].

    Column i holds the coordinates of Frob(lambda_i); entries are reduced
    polynomials mod a.
    """

    a: APoly
    frobenius_matrix: list[list[APoly]]
    group_order: int
    splitting_degree: int
    torsion: TorsionModule = field(repr=False)

    def to_json(self) -> dict:
        return {
            "a": str(self.a),
            "matrix": [[str(e) for e in row] for row in self.frobenius_matrix],
            "group_order": self.group_order,
            "splitting_degree": self.splitting_degree,
        }


def _frob_L_raw(K: ExtField, m: int, v):
    for _ in range(m % K.m if K.m else 0):
        v = K._frobq(v)
    return v


def galois_image(D: DrinfeldModule, a: APoly, cap: int = DEFAULT_FIELD_CAP,
                 seed: int = 0) -> GaloisImage:
    if not a:
        raise ZeroInput("galois_image needs a nonzero polynomial")
    if not D.is_prime_to_characteristic(a):
        raise BadCharacteristic(f"{a} is not prime to the A-characteristic {D.characteristic()}")
    tm = torsion(D, a, cap=cap, seed=seed)
    F = D.base
    r, d = D.rank, a.degree
    # columns w_(i,j) = phi^j lambda_i, ordered i-major
    cols = []
    for lam in tm.module_basis:
        w = list(lam)
        for _ in range(d):
            cols.append(w)
            w = la.matvec(tm.phi, w, F)
    W = la.transpose(cols)
    K = tm.splitting_field
    matrix = [[None] * r for _ in range(r)]
    for i, lam in enumerate(tm.generators):
        img = FieldElement(K, _frob_L_raw(K, D.m, lam.value))
        y = la.solve(W, tm.coords(img), F)
        for i2 in range(r):
            matrix[i2][i] = APoly(F, [FieldElement(F, c) for c in y[i2 * d:(i2 + 1) * d]])
    order = matrix_order(matrix, a, limit=tm.extension_degree * 4 + 16)
    return GaloisImage(a, matrix, order, tm.extension_degree, tm)


def _matmul_mod(A, B, a: APoly):
    n = len(A)
    F = a.field
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = APoly(F)
            for k in range(n):
                acc = acc + A[i][k] * B[k][j]
            row.append(acc % a)
        out.append(row)
    return out


def _is_identity(M) -> bool:
    return all((e == 1) if i == j else (not e) for i, row in enumerate(M) for j, e in enumerate(row))


def matrix_order(M, a: APoly, limit: int) -> int:
    """Multiplicative order of M in GL_r(A/aA) (searched up to ``limit``)."""
    P = M
    for e in range(1, limit + 1):
        if _is_identity(P):
            return e
        P = _matmul_mod(P, M, a)
    raise RuntimeError(f"matrix order exceeds {limit}")


def matrix_det_mod(M, a: APoly) -> APoly:
    coeffs = berkowitz(M, APoly(a.field), APoly(a.field, [a.field.one]))
    det = coeffs[-1] if len(M) % 2 == 0 else -coeffs[-1]
    return det % a


def berkowitz(A, zero, one) -> list:
    """Coefficients [1, c_1, ..., c_n] of det(x I - A) over a commutative ring."""
    n = len(A)
    if n == 0:
        return [one]
    C = [one, zero - A[0][0]]
    for k in range(1, n):
        Ak = [row[:k] for row in A[:k]]
        R = A[k][:k]
        S = [A[i][k] for i in range(k)]
        a = A[k][k]
        items = [one, zero - a]
        vec = S
        for _ in range(k):
            s = zero
            for x, y in zip(R, vec):
                s = s + x * y
            items.append(zero - s)
            vec = [_dot(row, vec, zero) for row in Ak]
        C = [_dot([items[i - j] if i >= j else zero for j in range(k + 1)], C, zero)
             for i in range(k + 2)]
    return C


def _dot(u, v, zero):
    s = zero
    for x, y in zip(u, v):
        s = s + x * y
    return s


# ---------------------------------------------------------------------------
# Frobenius characteristic data


def frobenius_char_data(D: DrinfeldModule, probe_ideals: Sequence[APoly],
                        cap: int = DEFAULT_FIELD_CAP) -> list[tuple[APoly, list[APoly]]]:
    """Characteristic polynomial (ascending coefficients mod a) of each Galois matrix."""
    out = []
    for a in probe_ideals:
        g = galois_image(D, a, cap=cap)
        F = a.field
        c = berkowitz(g.frobenius_matrix, APoly(F), APoly(F, [F.one]))
        out.append((a, [x % a for x in reversed(c)]))
    return out


@functools.lru_cache(maxsize=256)
def frobenius_charpoly(D: DrinfeldModule) -> tuple[APoly, ...]:
    """Characteristic polynomial of pi = tau^m, ascending, with coefficients in A.

    Computed from the matrix of tau^m on the basis 1, tau, ..., tau^(r-1) of
    L<tau> viewed as an L[T]-module (T acting by right multiplication by
    rho_T), and checked against the relation sum a_i pi^i = 0.
    """
    L, r, m = D.L, D.rank, D.m
    zero = APoly(L)
    one = APoly(L, [L.one])
    cr_inv = D.rho_T.leading.inverse()
    A_tau = [[zero] * r for _ in range(r)]
    for i in range(r - 1):
        A_tau[i + 1][i] = one
    A_tau[0][r - 1] = APoly(L, [-D.gamma_T * cr_inv, cr_inv])
    for j in range(1, r):
        A_tau[j][r - 1] = APoly(L, [-D.rho_T[j] * cr_inv])

    def sigma(M, k):
        return [[APoly(L, [L.frob_q(c, k) for c in e.coeffs]) for e in row] for row in M]

    Pi = A_tau
    for k in range(1, m):
        S = sigma(A_tau, k)
        Pi = [[_dot(Pi[i], [S[t][j] for t in range(r)], zero) for j in range(r)]
              for i in range(r)]
    c = berkowitz(Pi, zero, one)
    base = D.base
    coeffs = []
    for e in reversed(c):
        for x in e.coeffs:
            if any(x.value[1:]):
                raise AssertionError("Frobenius characteristic polynomial left F_q[T]")
        coeffs.append(APoly(base, [FieldElement(base, x.value[0]) for x in e.coeffs]))
    check = SkewPoly(L)
    for i, ai in enumerate(coeffs):
        if ai:
            check = check + rho_of(D, ai).shift(m * i)
    if check:
        raise AssertionError("Frobenius does not satisfy its characteristic polynomial")
    return tuple(coeffs)


# ---------------------------------------------------------------------------
# Isogenies


@dataclass(frozen=True)
class Isogeny:
    source: DrinfeldModule
    target: DrinfeldModule
    u: SkewPoly

    @property
    def degree(self) -> int:
        return self.u.degree

    def to_json(self) -> dict:
        return {"u": self.u.to_json(), "tau_degree": self.u.degree}


def _check_compatible(D: DrinfeldModule, E: DrinfeldModule):
    if not D.compatible(E):
        raise ModuleMismatch("modules differ in L or rank")


def is_isogeny(u: SkewPoly, D: DrinfeldModule, E: DrinfeldModule) -> bool:
    """True iff u != 0 and u * rho_T = rho~_T * u."""
    _check_compatible(D, E)
    if u.field != D.L:
        raise ModuleMismatch("u must have coefficients in L")
    if not u:
        return False
    return u * D.rho_T == E.rho_T * u


def find_isogeny(D: DrinfeldModule, E: DrinfeldModule, max_tau_deg: int) -> Isogeny | None:
    """Minimal-degree u with u * rho_T = rho~_T * u, or None up to ``max_tau_deg``."""
    _check_compatible(D, E)
    L = D.L
    F = D.base
    m, r = L.m, D.rank
    for d in range(max_tau_deg + 1):
        nrows = (d + r + 1) * m
        cols = []
        for i in range(d + 1):
            for j in range(m):
                e = FieldElement(L, tuple(1 if t == j else 0 for t in range(m)))
                mono = SkewPoly(L, [e]).shift(i)
                diff = mono * D.rho_T - E.rho_T * mono
                col = []
                for k in range(d + r + 1):
                    col.extend(diff[k].value)
                cols.append(col)
        M = la.transpose(cols)
        assert len(M) == nrows
        sols = la.nullspace(M, (d + 1) * m, F)
        if sols:
            v = sols[0]
            coeffs = [FieldElement(L, tuple(v[i * m:(i + 1) * m])) for i in range(d + 1)]
            return Isogeny(D, E, SkewPoly(L, coeffs))
    return None


def dual_degree_cap(D: DrinfeldModule, u: SkewPoly) -> int:
    """Upper bound r * m * deg(u) on the tau-degree of a dual isogeny."""
    return max(1, D.rank * D.m * u.degree)


def conjugate(D: DrinfeldModule, c: FieldElement) -> DrinfeldModule:
    """The isomorphic module c * rho_T * c^(-1)."""
    cs = SkewPoly(D.L, [c])
    ci = SkewPoly(D.L, [c.inverse()])
    return DrinfeldModule(D.L, cs * D.rho_T * ci)
