"""From Drinfeld modules to trace-image lattices, and the isogeny action on them.

The lattice attached to a module is built by a named convention.  The
default, ``frobenius-real-embeddings``, encodes the characteristic
polynomial of the Frobenius of the module as an Eisenstein polynomial over Z
and takes fractional parts of powers of its positive real root.  Isomorphic
and isogenous modules share that characteristic polynomial, so they land on
the same lattice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .algebraic import AlgebraicReal, NumberField, select_root
from .drinfeld import DrinfeldModule, frobenius_charpoly
from .errors import ConventionUnavailable, EpsilonOutOfRange, RankMismatch, ValidationError
from .fqpoly import APoly
from .nctorus import K0Lattice, scale_lattice
from .quadorders import fundamental_unit, squarefree_part

DEFAULT_CONVENTION = "frobenius-real-embeddings"


@dataclass(frozen=True)
class IsogenyTuple:
    m: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "m", tuple(int(x) for x in self.m))
        if not self.m or any(x < 1 for x in self.m):
            raise ValueError("tuple entries must be positive integers")

    @classmethod
    def parse(cls, text: str) -> "IsogenyTuple":
        try:
            return cls(tuple(int(x) for x in text.split(",")))
        except ValueError as exc:
            raise ValidationError(f"bad tuple {text!r}: {exc}") from None

    @property
    def lcm(self) -> int:
        return math.lcm(*self.m)

    def __mul__(self, other: "IsogenyTuple") -> "IsogenyTuple":
        if len(self.m) != len(other.m):
            raise RankMismatch("tuples of different lengths")
        return IsogenyTuple(tuple(a * b for a, b in zip(self.m, other.m)))

    def __len__(self):
        return len(self.m)

    def to_json(self) -> dict:
        return {"m": list(self.m), "lcm": self.lcm}


def _mpf(r: Fraction):
    return mpmath.mpf(r.numerator) / r.denominator


@dataclass(frozen=True)
class Epsilon:
    """Scaling factor with log(eps) = (log base)^log_power, base > 1."""

    base: AlgebraicReal
    log_power: Fraction = Fraction(1)
    source: str = ""

    def __post_init__(self):
        if self.base <= 1:
            raise EpsilonOutOfRange("epsilon must exceed 1 so that log log epsilon is real")

    def log(self, bits: int):
        with mpmath.workprec(bits + 32):
            L = mpmath.log(self.base.approx(bits + 32))
            return L ** _mpf(self.log_power)

    def loglog(self, bits: int):
        with mpmath.workprec(bits + 32):
            return _mpf(self.log_power) * mpmath.log(mpmath.log(self.base.approx(bits + 32)))

    def raise_log(self, k) -> "Epsilon":
        return Epsilon(self.base, self.log_power * k, self.source)

    def to_json(self) -> dict:
        return {"base": self.base.to_json(), "log_power": str(self.log_power), "source": self.source,
                "log_epsilon": mpmath.nstr(self.log(64), 15)}

    @classmethod
    def from_json(cls, obj) -> "Epsilon":
        if isinstance(obj, str):
            return parse_epsilon(obj)
        if "fundamental_unit_of" in obj:
            e = parse_epsilon(f"fundamental:{obj['fundamental_unit_of']}")
            return e.raise_log(Fraction(obj.get("log_power", 1)))
        return cls(AlgebraicReal.from_json(obj["base"]), Fraction(obj.get("log_power", 1)),
                   obj.get("source", ""))


def epsilon_fundamental(d: int) -> Epsilon:
    u = fundamental_unit(d)
    # eps + eps' = x and eps * eps' = norm
    p = (u.norm, -u.x, 1)
    eps = select_root([p], lambda bits: u.value(bits + 16))
    return Epsilon(eps, Fraction(1), f"fundamental unit of Q(sqrt({d}))")


def parse_epsilon(text: str) -> Epsilon:
    """``fundamental:<d>``, a rational like ``7`` or ``15/2``, or ``sqrt:<n>``."""
    text = text.strip()
    try:
        if text.startswith("fundamental:"):
            return epsilon_fundamental(int(text.split(":", 1)[1]))
        if text.startswith("sqrt:"):
            return Epsilon(AlgebraicReal.sqrt(Fraction(text.split(":", 1)[1])), Fraction(1), text)
        return Epsilon(AlgebraicReal.rational(Fraction(text)), Fraction(1), text)
    except ValueError as exc:
        if isinstance(exc, EpsilonOutOfRange):
            raise
        raise ValidationError(f"bad epsilon {text!r}: {exc}") from None


@dataclass
class RMTorusImage:
    source: dict
    lattice: K0Lattice
    epsilon: Epsilon
    construction_tag: str
    theta: object = None
    flags: list[str] = field(default_factory=list)

    @property
    def rank(self) -> int:
        return self.lattice.rank

    def to_json(self) -> dict:
        return {
            "source": self.source,
            "lattice": self.lattice.to_json(),
            "epsilon": self.epsilon.to_json(),
            "construction_tag": self.construction_tag,
            "theta": None if self.theta is None else self.theta.to_json(),
            "flags": self.flags,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "RMTorusImage":
        try:
            return cls(obj.get("source", {}), K0Lattice.from_json(obj["lattice"]),
                       Epsilon.from_json(obj["epsilon"]), obj.get("construction_tag", "user"),
                       None, list(obj.get("flags", [])))
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"bad torus image: {exc}") from None


# ---------------------------------------------------------------------------
# the lattice construction


def _encode(a: APoly) -> int:
    """Non-negative integer code sum code(c_j) q^j of a polynomial over F_q."""
    q = a.field.q
    return sum(c.value * q ** j for j, c in enumerate(a.coeffs))


def eisenstein_polynomial(D: DrinfeldModule) -> tuple[int, ...]:
    """X^(r+1) - p * (1 + p * sum N(a_i) X^i) from the Frobenius polynomial sum a_i X^i."""
    P = frobenius_charpoly(D)
    p = D.base.p
    r = D.rank
    coeffs = [-p * (1 + p * _encode(P[0]))]
    coeffs += [-p * p * _encode(P[i]) for i in range(1, r)]
    coeffs += [0] * (r + 1 - len(coeffs)) + [1]
    return tuple(coeffs)


def _frobenius_real_embeddings(D: DrinfeldModule):
    f = eisenstein_polynomial(D)
    theta = select_root([f], lambda bits: _positive_root(f, bits))
    K = NumberField(theta)
    alphas = []
    power = K.one()
    for _ in range(D.rank):
        power = power * K.gen()
        x = power.to_real()
        alphas.append(x - x.floor())
    return alphas, theta, {"eisenstein_poly": list(f)}


def _positive_root(f, bits):
    with mpmath.workprec(bits + 32):
        roots = mpmath.polyroots(list(reversed(f)), maxsteps=200, extraprec=bits + 64)
        return max(mpmath.re(z) for z in roots if abs(mpmath.im(z)) < mpmath.mpf(2) ** (-bits // 2))


CONVENTIONS = {DEFAULT_CONVENTION: _frobenius_real_embeddings}


def _auto_epsilon(theta: AlgebraicReal) -> Epsilon:
    if theta.degree == 2:
        a, b, c = theta.poly
        disc = b * b - 4 * a * c
        core, _ = squarefree_part(disc)
        return epsilon_fundamental(core)
    return Epsilon(theta, Fraction(1), "generator of K")


def f_object(D: DrinfeldModule, convention: str = DEFAULT_CONVENTION,
             epsilon: Epsilon | str | None = "auto") -> RMTorusImage:
    """The torus image of D under the named lattice convention."""
    if convention not in CONVENTIONS:
        raise ConventionUnavailable(f"unknown convention {convention!r}; known: {sorted(CONVENTIONS)}")
    alphas, theta, extra = CONVENTIONS[convention](D)
    if epsilon is None or epsilon == "auto":
        eps = _auto_epsilon(theta)
    elif isinstance(epsilon, str):
        eps = parse_epsilon(epsilon)
    else:
        eps = epsilon
    source = D.to_json()
    source.update(extra)
    return RMTorusImage(source, K0Lattice(alphas), eps, convention)


# ---------------------------------------------------------------------------
# torsion image and the isogeny action


def torsion_image(img: RMTorusImage, precision_bits: int = 128) -> list:
    """exp(2 pi i alpha_i/m_i + log log eps) for each generator of the lattice."""
    if precision_bits < 64:
        raise ValueError("precision must be at least 64 bits")
    out = []
    ll = img.epsilon.loglog(precision_bits + 32)
    with mpmath.workprec(precision_bits + 32):
        for g in img.lattice.generators():
            a = g.approx(precision_bits + 32)
            out.append(mpmath.exp(2j * mpmath.pi * a + ll))
    with mpmath.workprec(precision_bits):
        return [+v for v in out]


def isogeny_act(img: RMTorusImage, t: IsogenyTuple) -> RMTorusImage:
    """Scale the lattice by t and transport eps by log eps~ = (log eps)^lcm(t)."""
    if len(t) != img.rank:
        raise RankMismatch(f"tuple of length {len(t)} for a rank-{img.rank} image")
    flags = list(img.flags)
    note = "epsilon composed by LCM per action; composition across actions is not determined"
    if t.lcm != 1 and note not in flags:
        flags.append(note)
    return RMTorusImage(img.source, scale_lattice(img.lattice, t.m), img.epsilon.raise_log(t.lcm),
                        img.construction_tag, img.theta, flags)


def principal_representative(a: Fraction | mpmath.mpf):
    """a - k with k an integer and the result in (-1/2, 1/2]."""
    if isinstance(a, Fraction):
        return a - math.ceil(a - Fraction(1, 2))
    return a - mpmath.ceil(a - mpmath.mpf(1) / 2)


def verify_substitution(img: RMTorusImage, t: IsogenyTuple, precision_bits: int = 256) -> dict:
    """Compare exp(2 pi i a/m + log((log eps)^(1/m))) with the principal m-th root of
    exp(2 pi i a + log log eps), per index.

    ``a`` is the principal representative of alpha_i modulo Z (it spans the
    same lattice); the deviation with the raw alpha_i is reported alongside,
    together with the branch shift it needs.
    """
    if len(t) != img.rank:
        raise RankMismatch(f"tuple of length {len(t)} for a rank-{img.rank} image")
    bits = precision_bits
    rows = []
    with mpmath.workprec(bits + 64):
        L = img.epsilon.log(bits + 64)
        for g, m in zip(img.lattice.generators(), t.m):
            raw = g.approx(bits + 64)
            a = principal_representative(raw)
            # cospi/sinpi are exact at half-integers, keeping z = -L on the principal side of the cut
            z = L * mpmath.mpc(mpmath.cospi(2 * a), mpmath.sinpi(2 * a))
            rhs = mpmath.exp(mpmath.log(z) / m)
            root = L ** (mpmath.mpf(1) / m)
            lhs = root * mpmath.mpc(mpmath.cospi(2 * a / m), mpmath.sinpi(2 * a / m))
            lhs_raw = root * mpmath.mpc(mpmath.cospi(2 * raw / m), mpmath.sinpi(2 * raw / m))
            shift = int(mpmath.nint(raw - a))
            rows.append({"m": m, "deviation": abs(lhs - rhs), "raw_deviation": abs(lhs_raw - rhs),
                         "branch_shift": shift})
        dev = max(r["deviation"] for r in rows)
    tol = mpmath.mpf(2) ** (-bits + 8)
    return {
        "max_deviation": dev,
        "tolerance": tol,
        "ok": dev < tol,
        "per_index": rows,
    }


def lattice_tuple(source: K0Lattice, target: K0Lattice) -> IsogenyTuple | None:
    """The unique t with scale_lattice(source, t) == target, or None.

    Solving alpha~_i * t_i = alpha_i generator by generator: t_i is the
    ratio of corresponding generators and must be a positive integer.
    """
    if source.rank != target.rank:
        return None
    out = []
    for a, b in zip(source.generators(), target.generators()):
        if b.sign() == 0:
            return None
        r = a / b
        if not r.is_rational():
            return None
        v = r.as_fraction()
        if v.denominator != 1 or v < 1:
            return None
        out.append(int(v))
    return IsogenyTuple(tuple(out))
