"""Walk the Carlitz module over F_4 through every stage of the package.

torsion points -> Galois action -> lattice and epsilon -> invariant triple.
"""

from qdrin.drinfeld import DrinfeldModule, frobenius_charpoly, galois_image, torsion
from qdrin.fqpoly import make_extension, prime_field
from qdrin.functor_f import eisenstein_polynomial, f_object, torsion_image
from qdrin.quantum import VarietyDescriptor, q_invariant

F2 = prime_field(2)
L = make_extension(F2, 2)
xi = L.gen

D = DrinfeldModule(L, [xi, L.one])
print("module:", D.rho_T)

for a in ("T", "T^2+1", "T^3+T+1"):
    tm = torsion(D, D.A(a))
    g = galois_image(D, D.A(a))
    print(f"  a = {a:<8} |torsion| = {tm.size:<3} splitting degree {tm.extension_degree}"
          f"  Frobenius order {g.group_order}")

print("Frobenius polynomial (ascending):", [str(c) for c in frobenius_charpoly(D)])
print("integer polynomial:", eisenstein_polynomial(D))

img = f_object(D)
(alpha,) = img.lattice.alphas
print("alpha minimal polynomial:", alpha.poly, "approx", alpha.approx(64))
print("epsilon:", img.epsilon.to_json()["log_epsilon"], "=", img.epsilon.source)
print("torsion image:", torsion_image(img, 64))

inv = q_invariant(VarietyDescriptor.from_image(img))
print("order basis:", inv["triple"]["order_basis"])
print("field:", inv["field"]["defining_poly_str"], " branch:", inv["branch"])
print("ideal class:", inv["quadratic_class"])
