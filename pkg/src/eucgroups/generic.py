"""Generic dense subgroups built from fresh constants, and their lines.

A generic point has one freshly minted constant per coordinate.  Because a
fresh constant satisfies no polynomial relation over the earlier ones, every
"avoid this countable set of bad points" step of a generic construction
becomes "mint a new constant".

Lines are handled exactly: a point sum x_i h_i lies on o + R d iff every
functional vanishing on d takes the same value on it as on o.  Expanding over
monomials gives a rational affine system in x, solved over the integers.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from . import linalg
from ._search import DEFAULT_CAP, box_search
from .errors import LineMeetsGroup, NotInGroup
from .groups import FgGroup, Vector, format_vector, is_zero_vector, vector, vsub, zero_vector
from .intersect import SubspaceSpec, intersect_subspace
from .scalars import ONE, Constant, ConstantBasis, ExactScalar, mono_key


@dataclass
class GenericGroup:
    group: FgGroup
    constants: ConstantBasis
    minted: tuple[str, ...]
    seed: int = 0

    @property
    def points(self) -> tuple[Vector, ...]:
        return self.group.generators

    @property
    def ambient(self) -> int:
        return self.group.ambient

    def point(self, i: int) -> Vector:
        return self.group.generators[i]

    def element(self, coeffs: Sequence[int]) -> Vector:
        """Integer combination of the points (which form the abstract basis up to order)."""
        return self.group.from_generators(coeffs)


def _fg(G) -> FgGroup:
    return G.group if isinstance(G, GenericGroup) else G


def make_generic(count: int, ambient: int, seed: int = 0, constants: ConstantBasis | None = None, prefix: str = "p") -> GenericGroup:
    """span_Z of ``count`` points in R^ambient with distinct fresh coordinates p{i}_{j}."""
    if count < 1 or ambient < 1:
        raise ValueError("need at least one point in dimension at least one")
    cb = constants if constants is not None else ConstantBasis()
    names, points = [], []
    for i in range(count):
        row = []
        for j in range(ambient):
            c = cb.fresh(f"{prefix}{i}_{j}", seed)
            names.append(c.name)
            row.append(ExactScalar.of(c))
        points.append(tuple(row))
    return GenericGroup(FgGroup(points, ambient=ambient), cb, tuple(names), seed)


@dataclass(frozen=True)
class LineSpec:
    """The line offset + R * direction."""

    direction: Vector
    offset: Vector | None = None

    def __post_init__(self):
        d = vector(self.direction)
        if is_zero_vector(d):
            raise ValueError("line direction must be nonzero")
        o = vector(self.offset) if self.offset is not None else zero_vector(len(d))
        if len(o) != len(d):
            raise ValueError("offset and direction differ in length")
        object.__setattr__(self, "direction", d)
        object.__setattr__(self, "offset", o)

    @property
    def ambient(self) -> int:
        return len(self.direction)

    @property
    def through_origin(self) -> bool:
        return is_zero_vector(self.offset)

    @classmethod
    def through(cls, a: Vector, b: Vector) -> "LineSpec":
        a, b = vector(a), vector(b)
        return cls(vsub(b, a), a)

    def contains(self, v: Vector) -> bool:
        """All 2x2 minors of (v - offset, direction) vanish."""
        w = vsub(vector(v), self.offset)
        d = self.direction
        n = len(d)
        return all(not (w[i] * d[j] - w[j] * d[i]) for i in range(n) for j in range(i + 1, n))

    def subspace(self) -> SubspaceSpec:
        if not self.through_origin:
            raise ValueError("only lines through the origin are subspaces")
        return SubspaceSpec.from_span([self.direction])


def _clear(values):
    den = ONE
    for a in values:
        if not a.is_polynomial():
            den = den * ExactScalar.from_fraction(a.denominator)
    return [a * den for a in values] if den != ONE else list(values)


def _line_system(G: FgGroup, L: LineSpec):
    """Rational (M, b) with M x = b iff sum x_i h_i lies on L (x over the abstract basis)."""
    M, b = [], []
    for f in linalg.kernel([list(L.direction)], ncols=L.ambient):
        vals = [sum((a * c for a, c in zip(f, h)), ExactScalar(0)) for h in G.basis]
        rhs = sum((a * c for a, c in zip(f, L.offset)), ExactScalar(0))
        cleared = _clear(vals + [rhs])
        monos = sorted({mo for a in cleared for mo in a.numerator}, key=mono_key)
        for mo in monos:
            M.append([a.coefficient(mo) for a in cleared[:-1]])
            b.append(cleared[-1].coefficient(mo))
    return M, b


@dataclass(frozen=True)
class LineMeet:
    """G ∩ L = Z u_star for a line through the origin."""

    u: Vector
    u_star: Vector
    divisor: int
    coefficients: tuple[int, ...]  # abstract-basis coordinates of u_star
    witness: tuple[int, ...]  # combination of the input generators

    @property
    def support(self) -> frozenset[int]:
        return support_of(self.coefficients)


def support_of(coeffs: Sequence[int]) -> frozenset[int]:
    return frozenset(i for i, c in enumerate(coeffs) if c)


def line_meet(G, L) -> LineMeet:
    """The cyclic generator u* = u / gcd(coordinates of u) of G ∩ R u."""
    H = _fg(G)
    if not isinstance(L, LineSpec):
        L = LineSpec(L)
    if not L.through_origin:
        raise ValueError("line_meet needs a line through the origin; use affine_line_meet")
    u = L.direction
    c = H.coordinates(u)
    if c is None:
        raise NotInGroup(f"direction {format_vector(u)} has no integer witness in G")
    D, _, _ = linalg.snf([list(c)])
    d = abs(D[0][0])
    coeffs = tuple(x // d for x in c)
    return LineMeet(u, H.element(coeffs), d, coeffs, H.basis_to_generators(coeffs))


@dataclass(frozen=True)
class AffineMeet:
    """G ∩ L = u0 + span_Z(steps); empty when u0 is None."""

    line: LineSpec
    u0: Vector | None
    u0_coefficients: tuple[int, ...] | None
    steps: tuple[Vector, ...] = ()
    step_coefficients: tuple[tuple[int, ...], ...] = ()

    @property
    def empty(self) -> bool:
        return self.u0 is None

    @property
    def u1(self) -> Vector | None:
        return self.steps[0] if len(self.steps) == 1 else None

    def describe(self) -> str:
        if self.empty:
            return "empty"
        if not self.steps:
            return f"{{{format_vector(self.u0)}}}"
        return format_vector(self.u0) + " + " + " + ".join(f"Z{format_vector(s)}" for s in self.steps)


def affine_line_meet(G, L: LineSpec) -> AffineMeet:
    """G ∩ L for an arbitrary line, solved exactly over the integers.

    The base point u0 is reduced modulo the lattice of directions so it is
    canonical: its coefficient at each pivot of that lattice lies in [0, k).
    """
    H = _fg(G)
    if L.ambient != H.ambient:
        raise ValueError("dimension mismatch")
    M, b = _line_system(H, L)
    r = H.rank
    x0 = linalg.integer_affine_solution(M, b) if M else [0] * r
    if x0 is None:
        return AffineMeet(L, None, None)
    full = linalg.hnf(linalg.identity(r), r)
    C = linalg.lattice_intersect_subspace(full, M) if M else full
    x0 = list(x0)
    for row, p in zip(C.basis, C.pivots):
        q = x0[p] // row[p]
        if q:
            x0 = [a - q * s for a, s in zip(x0, row)]
    steps = tuple(tuple(row) for row in C.basis)
    return AffineMeet(L, H.element(x0), tuple(x0), tuple(H.element(s) for s in steps), steps)


@dataclass
class Extension:
    group: FgGroup
    p: Vector
    constant: Constant
    constants: ConstantBasis
    # (line, G ∩ L generators, conserved?) for every checked line
    checks: list[tuple[LineSpec, tuple[Vector, ...], bool]] = field(default_factory=list)

    @property
    def conservative(self) -> bool:
        return all(ok for _, _, ok in self.checks)


def extend_discrete(
    G,
    direction: Vector,
    constants: ConstantBasis,
    seed: int = 0,
    lines: Iterable[LineSpec] = (),
    prefix: str = "s",
) -> Extension:
    """G + Z p with p = s d for a freshly minted constant s.

    Raises LineMeetsGroup when the line R d already contains a nonzero point
    of G.  For every supplied line through the origin, G' ∩ L is recomputed
    and compared with G ∩ L.
    """
    H = _fg(G)
    d = vector(direction)
    if len(d) != H.ambient:
        raise ValueError("direction has the wrong dimension")
    L0 = LineSpec(d)
    meet = intersect_subspace(H, L0.subspace())
    if meet.generators:
        raise LineMeetsGroup(f"line through {format_vector(d)} meets G in {format_vector(meet.generators[0])}")
    c = constants.mint(prefix, seed)
    s = ExactScalar.of(c)
    p = tuple(s * a for a in d)
    G2 = FgGroup(tuple(H.generators) + (p,), ambient=H.ambient)
    ext = Extension(G2, p, c, constants)
    for L in lines:
        old = intersect_subspace(H, L.subspace()).generators
        new = intersect_subspace(G2, L.subspace()).generators
        ok = all(G2.coordinates(v) is not None for v in old) and all(H.coordinates(v) is not None for v in new)
        ext.checks.append((L, new, ok))
    return ext


# -- density ---------------------------------------------------------------------------------

@dataclass(frozen=True)
class DensityRow:
    target: tuple[Fraction, ...]
    distance: Fraction
    coefficients: tuple[int, ...]  # abstract-basis coordinates of the nearest element found
    witness: tuple[int, ...]  # combination of the input generators
    element: Vector
    flagged: bool


@dataclass
class DensityReport:
    delta: Fraction
    K: int
    rows: list[DensityRow]

    @property
    def all_within(self) -> bool:
        return not any(r.flagged for r in self.rows)

    def to_csv(self, out=None) -> str:
        buf = out if out is not None else io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["target", "distance", "distance_float", "flagged", "coefficients"])
        for r in self.rows:
            w.writerow([
                " ".join(str(x) for x in r.target),
                str(r.distance),
                f"{float(r.distance):.6e}",
                int(r.flagged),
                " ".join(str(x) for x in r.witness),
            ])
        return buf.getvalue() if out is None else ""


def _nearest(A, target, K, delta, cap):
    """Exact nearest point of the K-box to ``target``; radius doubles from delta until hit."""
    m = len(target)
    radius = Fraction(delta)
    while True:
        hits = box_search(A, K, radius, target=target, cap=cap)
        if hits:
            best = None
            for x in hits:
                val = max((abs(sum((a * xi for a, xi in zip(A[j], x) if xi), Fraction(0)) - target[j]) for j in range(m)), default=Fraction(0))
                if best is None or (val, x) < best:
                    best = (val, x)
            return best
        radius *= 2


def density_report(G, targets: Sequence[Sequence], delta, K: int, cap: int = DEFAULT_CAP) -> DensityReport:
    """For each rational target, the closest element over the K-box and its distance."""
    H = _fg(G)
    delta = Fraction(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    A = H.evaluated_basis_matrix()
    rows = []
    for t in targets:
        t = tuple(Fraction(x) for x in t)
        if len(t) != H.ambient:
            raise ValueError(f"target {t} has the wrong dimension")
        dist, x = _nearest(A, t, K, delta, cap)
        rows.append(DensityRow(t, dist, x, H.basis_to_generators(x), H.element(x), dist > delta))
    return DensityReport(delta, K, rows)
