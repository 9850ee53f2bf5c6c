"""Lattices, the tuple action and Morita moves for rank-1 and rank-2 tori."""

import mpmath

from qdrin.algebraic import AlgebraicReal
from qdrin.functor_f import Epsilon, IsogenyTuple, RMTorusImage, isogeny_act, verify_substitution
from qdrin.nctorus import K0Lattice, ThetaMatrix, endomorphism_order, morita_search, quadratic_class

s2, s5 = AlgebraicReal.sqrt(2), AlgebraicReal.sqrt(5)
golden = (s5 - 1) / 2

img = RMTorusImage({}, K0Lattice([golden, s2 - 1]), Epsilon(AlgebraicReal.rational(10)), "user")
out = isogeny_act(img, IsogenyTuple((2, 3)))
print("scaled generators:", [g.approx(40) for g in out.lattice.generators()])
print("log power of epsilon:", out.epsilon.log_power, "flags:", out.flags)

rep = verify_substitution(img, IsogenyTuple((2, 3)), 256)
print("substitution check ok:", rep["ok"], "max deviation", mpmath.nstr(rep["max_deviation"], 3))
for row in rep["per_index"]:
    print("   m =", row["m"], "raw alpha deviation", mpmath.nstr(row["raw_deviation"], 3),
          "branch shift", row["branch_shift"])

for f in (1, 2, 3):
    T = endomorphism_order(K0Lattice([s5 / f]))
    print(f"Z + (sqrt5/{f})Z: order basis {T.to_json()['order_basis']}, class {quadratic_class(T)['form']}")

theta = ThetaMatrix.from_values([[0, golden], [-golden, 0]])
res = morita_search(theta, theta.inverse(), depth=1)
print("inverse reached by", res.word, "after", res.explored, "nodes")
other = ThetaMatrix.from_values([[0, s2], [-s2, 0]])
res = morita_search(theta, other, depth=2)
print("golden vs sqrt2:", res.word, "conclusive:", res.conclusive)
