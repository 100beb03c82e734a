"""
Intersections with subspaces
============================

G ∩ V is computed as the integer points of a rational linear system on the
abstract coordinates of G.  The elimination trace records, level by level,
the gcd pivot k_n; the levels with k_n != 0 index a basis.
"""

from eucgroups import FgGroup, SubspaceSpec, intersect_subspace, make_generic
from eucgroups.groups import format_vector
from eucgroups.scalars import ConstantBasis

# a coordinate plane in Z^3
res = intersect_subspace(FgGroup([(1, 0, 0), (0, 1, 0), (0, 0, 1)]), SubspaceSpec.from_equations([(0, 0, 1)]))
print("Z^3 ∩ {z = 0}:", [format_vector(g) for g in res.generators], "|", res.verdict.describe())
print("trace:", [(lvl.level, lvl.k) for lvl in res.trace], "Q =", res.Q)

# the x-axis meets a group densely
cb = ConstantBasis()
cb.add("t", "1.4142135623730950488")
t = cb.scalar("t")
res = intersect_subspace(FgGroup([(1, 0), (t, 0), (0, 1)]), SubspaceSpec.from_span([(1, 0)]))
print("x-axis:", [format_vector(g) for g in res.generators], "|", res.verdict.describe())

# generic points: the plane through p0 and p1 meets G only in span{p0, p1}
gg = make_generic(3, 3, seed=1)
p = gg.group.generators
res = intersect_subspace(gg.group, SubspaceSpec.from_span([p[0], p[1]]))
print("generic plane:", [format_vector(g) for g in res.generators], "|", res.verdict.describe(), f"[{res.provenance}]")
