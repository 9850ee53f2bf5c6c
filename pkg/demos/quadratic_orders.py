# Class groups of quadratic orders, computed twice: by counting reduced
# forms and by the conductor formula. Then the conductor-matching search.

from qdrin.errors import SearchExhausted
from qdrin.quadorders import QuadOrder, class_group, class_number_formula, fundamental_unit, match_conductor

for d, f in [(-23, 1), (-1, 2), (-21, 1), (5, 2), (3, 1), (79, 1), (-5, 7)]:
    o = QuadOrder(d, f)
    cg = class_group(o)
    print(f"D = {o.discriminant:>5}: h = {cg.h} {cg.invariant_factors or '[trivial]'}"
          f"  formula {class_number_formula(o)}")

for d in (2, 3, 23, 94):
    u = fundamental_unit(d)
    print(f"unit of Q(sqrt {d}): ({u.x} + {u.y} sqrt {u.D_K})/2, norm {u.norm:+d}")

print("match -3:", match_conductor(-3, 1)[:2])
try:
    match_conductor(-23, 1, bound=2000)
except SearchExhausted as exc:
    # no order of Q(sqrt 23) below the bound has class group Z/3
    print("match -23:", exc)
    print("wide h for f = 1..12:", [class_group(QuadOrder(23, f)).h for f in range(1, 13)])
