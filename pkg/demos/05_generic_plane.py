"""
Generic subgroups of the plane
==============================

Points with fresh coordinates generate a dense subgroup of R^2 that meets
every line through the origin in a cyclic group.  A linearly discrete group
can be extended by a fresh point on a missed line without changing the old
line intersections.
"""

from fractions import Fraction

from eucgroups import FgGroup, LineSpec, affine_line_meet, density_report, extend_discrete, line_meet, make_generic
from eucgroups.groups import format_vector
from eucgroups.intersect import decide_discrete, intersect_subspace
from eucgroups.scalars import ConstantBasis, ExactScalar

gg = make_generic(3, 2, seed=0)
p0, p1, p2 = gg.group.generators
print("points:", [format_vector(p) for p in gg.group.generators])

# lines through the origin: G ∩ L = Z u*
u = gg.element((2, 4, 0))
m = line_meet(gg, LineSpec(u))
print("u = 2 p0 + 4 p1  ->  u* =", format_vector(m.u_star), " support", sorted(m.support))

# an affine line through p0 with direction p1
a = affine_line_meet(gg, LineSpec(p1, offset=p0))
print("affine:", a.describe())

# density, checked inside a box
rep = density_report(gg, [(Fraction(k, 4), Fraction(1, 3)) for k in range(4)], Fraction(1, 20), 12)
for r in rep.rows:
    print("  target", tuple(map(str, r.target)), "distance", f"{float(r.distance):.3g}")

# extending Z^2 by fresh points on three lines
cb = ConstantBasis()
cb.add("t", "1.4142135623730950488")
t = cb.scalar("t")
G = FgGroup([(1, 0), (0, 1)])
for k, d in enumerate([(ExactScalar(1), t), (ExactScalar(1), 2 * t + 1), (t, ExactScalar(3))]):
    ext = extend_discrete(G, d, cb, seed=k, lines=[LineSpec((1, 0)), LineSpec((1, 1))])
    G = ext.group
    probe = LineSpec(ext.p)
    print(f"step {k}: p = {format_vector(ext.p)}; old lines unchanged: {ext.conservative};",
          "new line", decide_discrete(intersect_subspace(G, probe.subspace())).describe())
