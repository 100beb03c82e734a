"""
Closure of a finitely generated group
=====================================

The closure of G in R^m splits into a dense subspace V0 and a lattice part.
Below eps0 every group element lies in V0, and short bases of V0 can be
pulled out of G at every scale.
"""

from fractions import Fraction

from eucgroups import FgGroup, decompose, dense_witnesses, enumerate_ball
from eucgroups.closure import approximate_in_V0, approximation_error
from eucgroups.groups import format_vector
from eucgroups.scalars import ConstantBasis, ExactScalar

cb = ConstantBasis()
cb.add("t", "1.4142135623730950488")
t = cb.scalar("t")

# Z^2 is discrete: no dense part, eps0 = 1
d = decompose(FgGroup([(1, 0), (0, 1)]))
print("Z^2: dim V0 =", d.dim_V0, " F =", [format_vector(f) for f in d.F], " eps0 =", d.epsilon0)

# adding (t, 0) makes the x-axis dense
G = FgGroup([(1, 0), (t, 0), (0, 1)])
d = decompose(G)
print("x-axis group: V0 =", [format_vector(v) for v in d.V0_basis], " F =", [format_vector(f) for f in d.F])

# a brute-force look at short elements agrees: all lie on the x-axis
short = enumerate_ball(G, 30, Fraction(1, 20))
print(len(short), "elements of norm < 1/20 in the 30-box; off-axis:", sum(1 for v, _ in short if v[1] != 0))

# short bases at scales eps0 * 2^-n
w = dense_witnesses(d, 4)
for n, (eps, B) in enumerate(zip(w.epsilons, w.B)):
    print(f"stage {n}: eps = {eps}", [format_vector(u) for u in B])

# approximating a point of V0 by group elements
line = FgGroup([(1,), (t,)])
w = dense_witnesses(line, 7)
v = (ExactScalar(Fraction(1, 3)),)
approx, ks = approximate_in_V0(w.B[7], v)
print("1/3 ~", format_vector(approx), "error", float(approximation_error(v, approx)))
