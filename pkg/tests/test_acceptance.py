"""Acceptance criteria, one test each, with one PASS/FAIL line per criterion.

The lines are collected in RESULTS and printed at the end of the pytest run
(see conftest.py); running this file directly prints them as well.
"""

import json
import math
import random
import time
from fractions import Fraction

import mpmath
import numpy as np
import pytest
import sympy

from oracles import brute_torsion, multiplier_ring_bruteforce, splitting_degree
from qdrin.algebraic import AlgebraicReal
from qdrin.cli import run_pipeline
from qdrin.drinfeld import (
    DrinfeldModule,
    conjugate,
    find_isogeny,
    galois_image,
    is_isogeny,
    matrix_det_mod,
    random_module,
    rho_of,
    torsion,
)
from qdrin.errors import DegreeCapExceeded, SearchExhausted, SingularDenominator
from qdrin.fqpoly import APoly, make_field
from qdrin.functor_f import (
    Epsilon,
    IsogenyTuple,
    RMTorusImage,
    f_object,
    isogeny_act,
    lattice_tuple,
    torsion_image,
    verify_substitution,
)
from qdrin.nctorus import (
    K0Lattice,
    SOElement,
    ThetaMatrix,
    endomorphism_order,
    morita_generators,
    morita_search,
    satisfies_constraints,
    scale_lattice,
    so_mm_action,
)
from qdrin.quadorders import QuadOrder, class_group, class_number_formula, class_number_sweep, match_conductor
from qdrin.quantum import VarietyDescriptor, min_poly_guess, q_invariant

RESULTS: list[str] = []


def record(n, ok, detail):
    line = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS.append(line)
    print(line)
    return ok


BASES = {2: make_field(2, 1), 3: make_field(3, 1), 4: make_field(2, 2)}


def sweep_modules(seed, count):
    """Modules with q in {2,3,4}, rank in {1,2,3} and |L| <= 3^6, cycling through every (q, r)."""
    rng = random.Random(seed)
    out = []
    for i in range(count):
        q = [2, 3, 4][i % 3]
        r = [1, 2, 3][(i // 3) % 3]
        mmax = max(m for m in range(1, 7) if q ** m <= 3 ** 6)
        out.append(random_module(rng, BASES[q], rng.randint(1, mmax), r))
    return out, rng


def random_a(rng, base, lo, hi):
    d = rng.randint(lo, hi)
    return APoly(base, [base.random_element(rng) for _ in range(d)] + [base.random_element(rng, nonzero=True)])


# ---------------------------------------------------------------------------


def test_criterion_01_homomorphism_laws():
    t0 = time.perf_counter()
    mods, rng = sweep_modules(101, 24)
    pairs = bad = 0
    for D in mods:
        for _ in range(50):
            a, b = random_a(rng, D.base, 0, 3), random_a(rng, D.base, 0, 3)
            pairs += 1
            if rho_of(D, a * b) != rho_of(D, a) * rho_of(D, b):
                bad += 1
            if a + b and rho_of(D, a + b) != rho_of(D, a) + rho_of(D, b):
                bad += 1
    dt = time.perf_counter() - t0
    ok = bad == 0 and dt < 30
    record(1, ok, f"{len(mods)} modules, {pairs} pairs, {bad} mismatches, {dt:.1f}s (< 30s)")
    assert ok


def test_criterion_02_torsion_cardinality():
    t0 = time.perf_counter()
    rng = random.Random(202)
    computed = brute = capped = bad = 0
    i = 0
    while computed < 24:
        mods, _ = sweep_modules(1000 + i, 9)
        i += 1
        for D in mods:
            a = random_a(rng, D.base, 1, 2)
            if not D.is_prime_to_characteristic(a):
                continue
            try:
                tm = torsion(D, a)
            except DegreeCapExceeded:
                capped += 1
                continue
            computed += 1
            if tm.size != D.q ** (D.rank * a.degree) or len(tm.points) != tm.size:
                bad += 1
            if tm.splitting_field.order <= 2 ** 12:
                brute += 1
                if {p.value for p in tm.points} != brute_torsion(D, a, tm.splitting_field):
                    bad += 1
    dt = time.perf_counter() - t0
    ok = bad == 0 and brute >= 10 and dt < 120
    record(2, ok, f"{computed} cases within the 2^16 field cap ({capped} over the cap), "
                  f"{brute} enumerated, {bad} mismatches, {dt:.1f}s (< 120s)")
    assert ok


def _mat_mul_mod(X, Y, a):
    n = len(X)
    return [[sum((X[i][k] * Y[k][j] for k in range(n)), APoly(a.field)) % a for j in range(n)] for i in range(n)]


def _mat_order(M, a, limit):
    one = APoly(a.field, [a.field.one])
    n = len(M)
    I = [[one if i == j else APoly(a.field) for j in range(n)] for i in range(n)]
    P = [row[:] for row in M]
    for k in range(1, limit + 1):
        if P == I:
            return k
        P = _mat_mul_mod(P, M, a)
    return None


def test_criterion_03_galois_image():
    t0 = time.perf_counter()
    rng = random.Random(303)
    cases = bad = 0
    while cases < 30:
        base = rng.choice([BASES[2], BASES[3], BASES[4]])
        D = random_module(rng, base, rng.randint(1, 2), rng.randint(1, 2))
        a = random_a(rng, base, 1, 2)
        if not D.is_prime_to_characteristic(a):
            continue
        try:
            g = galois_image(D, a, cap=2 ** 14)
        except DegreeCapExceeded:
            continue
        cases += 1
        M = g.frobenius_matrix
        det = matrix_det_mod(M, a)
        invertible = det.degree >= 0 and det.gcd(a).degree == 0
        reduced = all(e.degree < a.degree for row in M for e in row)
        order = _mat_order(M, a, 10 ** 4)
        indep = splitting_degree(D, a)
        if not (invertible and reduced and order == g.group_order == indep):
            bad += 1
    dt = time.perf_counter() - t0
    ok = bad == 0
    record(3, ok, f"{cases} cases: matrix invertible mod a, order = independent splitting degree; "
                  f"{bad} mismatches, {dt:.1f}s")
    assert ok


def test_criterion_04_isogeny_tuples():
    t0 = time.perf_counter()
    rng = random.Random(404)
    quads = [AlgebraicReal.sqrt(d) for d in (2, 3, 5, 6, 7)]
    bad = 0
    for _ in range(100):
        r = rng.randint(1, 4)
        alphas = [rng.choice(quads) * rng.randint(1, 5) + rng.randint(-3, 3) for _ in range(r)]
        L = K0Lattice(alphas)
        img = RMTorusImage({}, L, Epsilon(AlgebraicReal.rational(7)), "user")
        t1 = IsogenyTuple(tuple(rng.randint(1, 9) for _ in range(r)))
        t2 = IsogenyTuple(tuple(rng.randint(1, 9) for _ in range(r)))
        if scale_lattice(scale_lattice(L, t1.m), t2.m) != scale_lattice(L, (t1 * t2).m):
            bad += 1
        if isogeny_act(isogeny_act(img, t1), t2).lattice != isogeny_act(img, t1 * t2).lattice:
            bad += 1
    pairs = 0
    while pairs < 6:
        base = rng.choice([BASES[2], BASES[3]])
        D = random_module(rng, base, rng.randint(2, 3), rng.randint(1, 2))
        q = D.q
        twist = DrinfeldModule(D.L, [c ** q for c in D.rho_T.coeffs])
        E = conjugate(twist, D.L.random_element(rng, nonzero=True))
        iso = find_isogeny(D, E, 2)
        if iso is None or not is_isogeny(iso.u, D, E):
            bad += 1
            continue
        pairs += 1
        LD, LE = f_object(D).lattice, f_object(E).lattice
        t = lattice_tuple(LD, LE)
        if t is None or scale_lattice(LD, t.m) != LE:
            bad += 1
    dt = time.perf_counter() - t0
    ok = bad == 0
    record(4, ok, f"100 tuple pairs obey the monoid law; {pairs} isogenous pairs related by a unique tuple; "
                  f"{bad} failures, {dt:.1f}s")
    assert ok


def test_criterion_05_substitution_identity():
    t0 = time.perf_counter()
    rng = random.Random(505)
    worst = mpmath.mpf(0)
    for _ in range(200):
        if rng.random() < 0.5:
            alpha = AlgebraicReal.rational(Fraction(rng.randint(0, 999), 1000))
        else:
            x = AlgebraicReal.sqrt(rng.choice([2, 3, 5, 7, 11, 13]))
            alpha = x - x.floor()
        eps = Fraction(rng.randint(272, 9999), 100)  # (e, 100)
        m = rng.randint(1, 12)
        img = RMTorusImage({}, K0Lattice([alpha]), Epsilon(AlgebraicReal.rational(eps)), "user")
        res = verify_substitution(img, IsogenyTuple((m,)), 256)
        worst = max(worst, res["max_deviation"])
    dt = time.perf_counter() - t0
    ok = worst < mpmath.mpf(10) ** -30 and dt < 10
    record(5, ok, f"200 samples at 256 bits, max deviation {mpmath.nstr(worst, 3)} (< 1e-30), {dt:.1f}s (< 10s)")
    assert ok


def test_criterion_06_torsion_image_modulus():
    rng = random.Random(606)
    worst = mpmath.mpf(0)
    for _ in range(100):
        x = AlgebraicReal.sqrt(rng.choice([2, 3, 5, 6, 7, 10]))
        alpha = x - x.floor() if rng.random() < 0.5 else AlgebraicReal.rational(Fraction(rng.randint(0, 96), 97))
        eps = AlgebraicReal.rational(Fraction(rng.randint(101, 100000), 100))
        img = RMTorusImage({}, K0Lattice([alpha]), Epsilon(eps), "user")
        (z,) = torsion_image(img, 128)
        with mpmath.workprec(256):
            ref = mpmath.log(mpmath.mpf(eps.lo.numerator) / eps.lo.denominator)
            worst = max(worst, abs(abs(z) - ref))
    ok = worst < mpmath.mpf(2) ** -124
    record(6, ok, f"100 samples at 128 bits, max |z| - log eps error {mpmath.nstr(worst, 3)} (< 2^-124)")
    assert ok


def _numpy_ok(g):
    A, B, C, D = (np.array(M, dtype=np.int64) for M in (g.A, g.B, g.C, g.D))
    m = A.shape[0]
    return (np.array_equal(A.T @ D + C.T @ B, np.eye(m, dtype=np.int64))
            and not (A.T @ C + C.T @ A).any() and not (B.T @ D + D.T @ B).any())


def test_criterion_07_so_action():
    rng = random.Random(707)
    bad = 0
    products = 0
    sqrt2, sqrt3 = AlgebraicReal.sqrt(2), AlgebraicReal.sqrt(3)
    for m in (1, 2, 4):
        gens = morita_generators(m, 2)
        cands = list(gens)
        for g in gens:
            for _ in range(3):
                M = [[list(r) for r in X] for X in (g.A, g.B, g.C, g.D)]
                M[rng.randrange(4)][rng.randrange(m)][rng.randrange(m)] += rng.choice([-1, 1])
                cands.append(SOElement.of(*M))
        bad += sum(satisfies_constraints(g) != _numpy_ok(g) for g in cands)
        bad += sum(not satisfies_constraints(g) for g in gens)
        vals = [[AlgebraicReal.rational(0)] * m for _ in range(m)]
        for i in range(m):
            for j in range(i + 1, m):
                v = rng.choice([sqrt2, sqrt3]) * rng.randint(1, 3) + rng.randint(-2, 2)
                vals[i][j], vals[j][i] = v, -v
        th = ThetaMatrix.from_values(vals)
        done = tries = 0
        while done < 50 and tries < 2000:
            tries += 1
            g1 = rng.choice(gens) @ rng.choice(gens)
            g2 = rng.choice(gens) @ rng.choice(gens)
            try:
                stepwise = so_mm_action(so_mm_action(th, g1), g2)
            except SingularDenominator:
                continue
            done += 1
            if not satisfies_constraints(g2 @ g1) or so_mm_action(th, g2 @ g1) != stepwise:
                bad += 1
        products += done
    th = ThetaMatrix.from_values([[0, sqrt2 + 1], [-(sqrt2 + 1), 0]])
    witness = morita_search(th, th.inverse(), depth=1).word
    ok = bad == 0 and witness == ["inv"] and products >= 100
    record(7, ok, f"checker agrees with an independent check; {products} composed products exact "
                  f"(Theta sizes 1, 2, 4); inverse witness {witness}; {bad} failures")
    assert ok


def test_criterion_08_class_group_dual_path():
    t0 = time.perf_counter()
    table = class_number_sweep(10 ** 5)
    bad = [D for D, (forms, formula) in table.items() if forms != formula]
    anchors = (table[-23][0] == 3 and table[-4][0] == 1
               and table[20][0] == table[20][1] == class_number_formula(QuadOrder(5, 2)))
    dt = time.perf_counter() - t0
    ok = not bad and anchors and dt < 300
    record(8, ok, f"{len(table)} discriminants with |D| <= 1e5, {len(bad)} disagreements, "
                  f"anchors h(-23)=3 h(-4)=1 h(20)=formula, {dt:.1f}s (< 300s)")
    assert ok


def test_criterion_09_attainable_part():
    fp, _, _ = match_conductor(-3, 1)
    assert fp == 1
    target = class_group(QuadOrder(-23)).invariant_factors
    assert target == [3]
    brute = [f for f in range(1, 101) if class_group(QuadOrder(23, f)).invariant_factors == target]
    with pytest.raises(SearchExhausted):
        match_conductor(-23, 1, bound=100)
    assert brute == []


@pytest.mark.xfail(strict=True, raises=SearchExhausted,
                   reason="no order of Q(sqrt 23) has class group Z/3; see the decisions ledger")
def test_criterion_09_match_conductor():
    t0 = time.perf_counter()
    detail = ("d=-3 gives f'=1; brute force over f' <= 100 agrees with the search; "
              "d=-23: no f' <= 10^4 has invariant factors (3)")
    try:
        fp, inv, _ = match_conductor(-23, 1)
    except SearchExhausted:
        record(9, False, detail + f" [expected failure], {time.perf_counter() - t0:.1f}s")
        raise
    record(9, inv == [3], f"d=-23 gives f'={fp}")
    assert inv == [3]


def test_criterion_10_invariant_end_to_end():
    carlitz = {"q_field": {"p": 2, "n": 1, "modulus": [0, 1]}, "L_degree": 2, "gamma_T": "g", "rho_T": ["g", "1"]}
    spec = {"seed": 0, "steps": [
        {"command": "functor.apply", "args": {"module": carlitz}},
        {"command": "quantum.invariant", "args": {"image": {"$step": 0, "path": "image"}}},
    ]}
    runs = [run_pipeline(spec) for _ in range(2)]
    for r in runs:
        r.pop("timing")
    deterministic = json.dumps(runs[0], sort_keys=True) == json.dumps(runs[1], sort_keys=True)
    bad = 0
    for d, f in [(2, 1), (3, 1), (5, 1), (6, 1), (7, 1), (2, 3), (5, 2), (13, 2)]:
        s = AlgebraicReal.sqrt(d)
        T = endomorphism_order(scale_lattice(K0Lattice([s]), (f,)))
        root = T.field.contains(s)
        basis = []
        for v in T.order_basis:
            b = Fraction(v[1]) / root[1]
            basis.append((v[0] - b * root[0], b))
        (a1, b1), (a2, b2) = basis
        det = a1 * b2 - a2 * b1
        brute = multiplier_ring_bruteforce(d, f)
        inside = all(((x * b2 - y * a2) / det).denominator == 1 and ((a1 * y - b1 * x) / det).denominator == 1
                     for x, y in brute)
        if not (inside and all(tuple(p) in set(brute) for p in basis)):
            bad += 1
        inv_log = q_invariant(VarietyDescriptor.raw([s / f], "fundamental:5", False))
        inv_cos = q_invariant(VarietyDescriptor.raw([s / f], "fundamental:5", True))
        if (inv_log["triple"], inv_log.get("quadratic_class")) != (inv_cos["triple"], inv_cos.get("quadratic_class")):
            bad += 1
    out = runs[0]["steps"][1]["output"]
    ok = deterministic and bad == 0 and out["field"]["defining_poly"] == [-5, 10, 1]
    record(10, ok, f"pipeline deterministic={deterministic}, field {out['field']['defining_poly_str']}; "
                   f"8 rank-1 sqrt cases match the multiplier-ring oracle and agree across branches; {bad} failures")
    assert ok


def test_criterion_11_min_poly_round_trip():
    rng = random.Random(1111)
    X = sympy.Symbol("x")
    recovered = n = 0
    while n < 50:
        d = rng.randint(1, 6)
        c = [rng.randint(-50, 50) for _ in range(d)] + [rng.randint(1, 50)]
        if not sympy.Poly(list(reversed(c)), X).is_irreducible:
            continue
        g = math.gcd(*c)
        want = [v // g for v in c]
        n += 1
        with mpmath.workprec(320):
            z = rng.choice(mpmath.polyroots(list(reversed(c)), maxsteps=400, extraprec=600))
            r = min_poly_guess(z, 6, 50, 256)
        recovered += r is not None and r["poly"] == want
    with mpmath.workprec(320):
        false_pos = [name for name, v in (("pi", mpmath.pi), ("e", mpmath.e)) if min_poly_guess(v, 6, 50, 256)]
    ok = recovered == 50 and not false_pos
    record(11, ok, f"{recovered}/50 recovered at 256 bits (degree <= 6, height <= 50); false positives {false_pos}")
    assert ok


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q"]))
