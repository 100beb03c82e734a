"""
Exact scalars over named constants
==================================

Coordinates are rational functions in named real constants.  Zero tests are
symbolic; each constant also carries a decimal realization that is used only
for signs, comparisons and norms.
"""

from fractions import Fraction

from eucgroups.scalars import ConstantBasis, compare, format_scalar, parse_scalar

# declare a constant with a decimal realization
cb = ConstantBasis()
cb.add("t", "1.41421356")
t = cb.scalar("t")

# arithmetic cancels symbolically
q = (t * t - 1) / (t - 1)
print("(t^2 - 1)/(t - 1) =", format_scalar(q))

# t^2 - 2 is not zero as a formal expression, only tiny after evaluation
x = t * t - 2
print("t^2 - 2 is zero?", x.is_zero())
print("evaluation:", x.evaluate(), "~", float(x.evaluate()))

# comparisons use the exact rational realization
print("compare(t, 3/2):", compare(t, Fraction(3, 2)).name)

# the textual syntax round-trips
a = parse_scalar("3/2 + 2*t - t^2", cb)
print(format_scalar(a), "->", parse_scalar(format_scalar(a), cb) == a)

# fresh constants get seeded realizations, reproducible from the seed
fresh = ConstantBasis()
p = fresh.fresh("p", 7)
print("fresh constant", p.name, "realized as", p.literal[:20] + "...")
