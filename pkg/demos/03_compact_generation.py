"""
Compact generating sequences with certificates
==============================================

Every countable subgroup of R, R^m, or (finitely supported) R^omega is
generated by {0}, a finite set, and a sequence tending to 0.  The
constructors emit certificates that an independent verifier replays.
"""

from dataclasses import replace
from fractions import Fraction

from eucgroups import FgGroup, compactgen_R, compactgen_Rm, compactgen_Romega, verify_certificate
from eucgroups.groups import format_vector, sup_norm
from eucgroups.scalars import ConstantBasis

cb = ConstantBasis()
cb.add("t", "1.4142135623730950488")
t = cb.scalar("t")

# Z has a smallest positive element
cert = compactgen_R(FgGroup([(1,)]))
print("Z:", [format_vector(e.vector) for e in cert.finite_part], verify_certificate(FgGroup([(1,)]), cert).summary())

# span{1, t} is dense: a null sequence with halving bounds
G = FgGroup([(1,), (t,)])
cert = compactgen_R(G, 6)
for e in cert.null_sequence:
    print(f"  stage {e.stage} {e.role:>10}: {format_vector(e.vector):>14}  norm {float(sup_norm(e.vector)):.2e} <= {float(e.bound):.2e}")
print("verdict:", verify_certificate(G, cert).summary())

# R^2 with a dense x-axis
G2 = FgGroup([(1, 0), (t, 0), (0, 1)])
cert = compactgen_Rm(G2, 5)
print("R^2:", len(cert.finite_part), "finite,", len(cert.null_sequence), "null;", verify_certificate(G2, cert).summary())

# R^omega, stage bounds on prefixes
Gw = FgGroup([(1, 0, 0, 0), (t, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, t)])
cert = compactgen_Romega(Gw, 8, support=4)
print("R^omega:", len(cert.null_sequence), "staged elements;", verify_certificate(Gw, cert).summary())

# a forged bound is caught, with the stage named
e = cert.null_sequence[-1]
forged = replace(e, bound=Fraction(0))
bad = replace(cert, null_sequence=cert.null_sequence[:-1] + (forged,))
print("forged:", verify_certificate(Gw, bad).summary())
