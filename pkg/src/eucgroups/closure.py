"""Closure decomposition of a finitely generated subgroup G of R^m.

The closure of G splits as V0 + (lattice): V0 is the real span of arbitrarily
short elements, and modulo V0 the group is discrete.  Let h_1..h_r be the
abstract basis and A the m x r matrix with columns h_i.  A functional
sending every h_i to an integer n_i exists iff n is orthogonal to the real
relations ker(A).  The integer vectors with that property form the
annihilator lattice; V0 is the image under A of its orthogonal complement.
Only the rational part of the relation space matters, so V0 is computed
exactly from ker(A) over the fraction field of the constants.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import floor

from . import linalg
from ._search import DEFAULT_CAP, box_search
from .errors import BudgetExceeded
from .groups import FgGroup, Vector, combine, evaluate_vector, sup_norm, vsub
from .scalars import ONE, ExactScalar, mono_key

DEFAULT_START_K = 8
DEFAULT_MAX_K = 2**16


@dataclass(frozen=True)
class ClosureDecomposition:
    group: FgGroup
    V0_basis: tuple[Vector, ...]
    dense_lattice: tuple[tuple[int, ...], ...]  # Z-basis of G ∩ V0, abstract coordinates
    F: tuple[Vector, ...]
    F_coefficients: tuple[tuple[int, ...], ...]
    epsilon0: Fraction
    epsilon0_exact: bool
    annihilator: tuple[tuple[int, ...], ...]  # Z-basis of {n : n.c in Z for all c}, abstract coordinates
    # per generator: (coefficients on F, abstract coordinates of the V0 part)
    coverage: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]
    norm: str = "sup"

    @property
    def dim_V0(self) -> int:
        return len(self.V0_basis)

    def dense_vectors(self) -> list[Vector]:
        return [self.group.element(c) for c in self.dense_lattice]

    def in_V0(self, v: Vector) -> bool:
        """Symbolic test of v in span_R(V0_basis)."""
        if not any(v):
            return True
        if not self.V0_basis:
            return False
        return v_in_span(v, self.V0_basis)

    def split(self, coeffs) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Write abstract coordinates as (F-coefficients, V0-part coordinates)."""
        rows = [list(r) for r in self.dense_lattice] + [list(r) for r in self.F_coefficients]
        sol = linalg.left_solve([[Fraction(x) for x in r] for r in rows], [Fraction(x) for x in coeffs])
        if sol is None or any(x.denominator != 1 for x in sol):
            raise ValueError("coordinates are not in the group lattice")
        sol = [int(x) for x in sol]
        nd = len(self.dense_lattice)
        a, z = sol[:nd], sol[nd:]
        d = [sum(ai * row[k] for ai, row in zip(a, self.dense_lattice)) for k in range(self.group.rank)]
        return tuple(z), tuple(d)


def v_in_span(v: Vector, basis) -> bool:
    cols = [[b[j] for b in basis] for j in range(len(v))]
    return linalg.solve(cols, list(v)) is not None


def _clear_denominators(vec):
    den = ONE
    for x in vec:
        if not x.is_polynomial():
            den = den * ExactScalar.from_fraction(x.denominator)
    return [x * den for x in vec] if den != ONE else list(vec)


def _relation_equations(G: FgGroup) -> list[list[Fraction]]:
    """Rational rows spanning the complement of the annihilator directions.

    Each real relation c (A c = 0) forces n.c = 0; expanding c over monomials
    turns this into rational linear equations on n.
    """
    r, m = G.rank, G.ambient
    if r == 0:
        return []
    A = [[G.basis[i][j] for i in range(r)] for j in range(m)]
    rows = []
    for c in linalg.kernel(A, ncols=r):
        poly = _clear_denominators(c)
        monos = sorted({mo for x in poly for mo in x.numerator}, key=mono_key)
        for mo in monos:
            rows.append([x.coefficient(mo) for x in poly])
    if not rows:
        return []
    R, _, rk = linalg.rref(rows)
    return R[:rk]


def _dual_vector(G: FgGroup, w) -> list[ExactScalar]:
    """Some y in R^m with h_i . y = w_i for every abstract basis vector h_i."""
    AT = [list(h) for h in G.basis]
    y = linalg.solve(AT, [ExactScalar(x) for x in w])
    if y is None:
        raise ValueError("functional is not realizable on the span of G")
    return y


def _l1(y) -> Fraction:
    return sum((abs(a.evaluate()) for a in y), Fraction(0))


def _shortest_norm(G: FgGroup, cap: int = DEFAULT_CAP) -> Fraction | None:
    """Exact minimum sup norm over nonzero elements of a discrete G (rank = dim span)."""
    if G.rank == 0:
        return None
    R = min(sup_norm(h) for h in G.basis)
    # |x_i| = |y_i . g| <= ||y_i||_1 ||g||_inf bounds the coefficients of short elements
    K = max(floor(R * _l1(_dual_vector(G, [int(i == k) for i in range(G.rank)]))) for k in range(G.rank))
    hits = box_search(G.evaluated_basis_matrix(), K, R, cap=cap)
    norms = [sup_norm(G.element(x)) for x in hits if any(x)]
    return min(norms + [R])


@lru_cache(maxsize=256)
def decompose(G: FgGroup) -> ClosureDecomposition:
    r = G.rank
    E = _relation_equations(G)
    identity = linalg.hnf(linalg.identity(r), r)
    if not E:
        dense = ()
    elif len(E) == r:
        dense = identity.basis
    else:
        normals = [list(v) for v in linalg.kernel(E)]
        dense = linalg.lattice_intersect_subspace(identity, normals).basis
    annihilator = linalg.lattice_intersect_subspace(identity, E).basis if E else identity.basis

    spanning = [combine(row, G.basis, G.ambient) for row in E]
    if spanning:
        R, _, rk = linalg.rref([list(v) for v in spanning])
        V0 = tuple(tuple(row) for row in R[:rk])
    else:
        V0 = ()

    complement = linalg.unimodular_completion([list(d) for d in dense], r) if r else []
    if complement:
        complement = [list(row) for row in linalg.hnf(complement, r).basis]
        piv = linalg.ZLattice(dense, r).pivots if dense else ()
        for f in complement:
            for drow, p in zip(dense, piv):
                q = f[p] // drow[p]
                if q:
                    f[:] = [x - q * y for x, y in zip(f, drow)]
    F_coeffs = tuple(tuple(f) for f in complement)
    F = tuple(G.element(f) for f in F_coeffs)

    if not F_coeffs:
        eps0, exact = Fraction(1), True
    else:
        eps0, exact = None, False
        if not dense:
            try:
                eps0 = _shortest_norm(G)
                exact = True
            except BudgetExceeded:
                eps0 = None
        if eps0 is None:
            worst = max(_l1(_dual_vector(G, w)) for w in annihilator)
            eps0 = 1 / worst

    decomp = ClosureDecomposition(
        group=G,
        V0_basis=V0,
        dense_lattice=tuple(dense),
        F=F,
        F_coefficients=F_coeffs,
        epsilon0=eps0,
        epsilon0_exact=exact,
        annihilator=tuple(annihilator),
        coverage=(),
    )
    coverage = tuple(decomp.split(t) for t in G.to_basis)
    object.__setattr__(decomp, "coverage", coverage)
    return decomp


def dense_part(G: FgGroup) -> tuple[Vector, ...]:
    """Echelonized real basis of V0."""
    return decompose(G).V0_basis


def lattice_part(G: FgGroup, V0=None) -> tuple[tuple[Vector, ...], Fraction]:
    """(F, epsilon0): a lattice complement of V0 inside G and a separation radius.

    Every element of G with sup norm below epsilon0 lies in V0.
    """
    d = decompose(G)
    return d.F, d.epsilon0


# -- short spanning sets --------------------------------------------------------------

@dataclass
class ShortBasis:
    vectors: list[Vector]
    coefficients: list[tuple[int, ...]]  # abstract coordinates in G
    bound: Fraction
    K: int


def find_short_basis(
    decomp: ClosureDecomposition,
    eps: Fraction,
    start_K: int = DEFAULT_START_K,
    max_K: int = DEFAULT_MAX_K,
    cap: int = DEFAULT_CAP,
) -> ShortBasis:
    """dim V0 independent elements of G ∩ V0 with sup norm < eps.

    Iterative deepening over the Z-basis of G ∩ V0, doubling the coefficient
    bound until enough short vectors appear.  Among the hits, shorter vectors
    are preferred (ties broken lexicographically).
    """
    G = decomp.group
    eps = Fraction(eps)
    need = decomp.dim_V0
    if need == 0:
        return ShortBasis([], [], eps, 0)
    dvecs = decomp.dense_vectors()
    cols = [evaluate_vector(v) for v in dvecs]
    A = [[col[j] for col in cols] for j in range(G.ambient)]
    K = start_K
    while K <= max_K:
        try:
            hits = box_search(A, K, eps, cap=cap)
        except BudgetExceeded as exc:
            raise BudgetExceeded(f"short-vector search for eps={eps} exhausted the budget at K={K}", reached=K) from exc
        cands = []
        for x in hits:
            if not any(x):
                continue
            val = [sum((xi * c[j] for xi, c in zip(x, cols)), Fraction(0)) for j in range(G.ambient)]
            cands.append((max(abs(v) for v in val), x, val))
        cands.sort(key=lambda t: (t[0], t[1]))
        chosen, chosen_vals = [], []
        for _, x, val in cands:
            if linalg.rank(chosen_vals + [val]) > len(chosen_vals):
                chosen.append(x)
                chosen_vals.append(val)
                if len(chosen) == need:
                    break
        if len(chosen) == need:
            coeffs = [tuple(sum(xi * row[k] for xi, row in zip(x, decomp.dense_lattice)) for k in range(G.rank)) for x in chosen]
            return ShortBasis([G.element(c) for c in coeffs], coeffs, eps, K)
        K *= 2
    raise BudgetExceeded(f"no spanning set of norm < {eps} with coefficients up to {max_K}", reached=max_K)


@dataclass
class DenseWitnesses:
    epsilons: list[Fraction]
    B: list[list[Vector]]
    coefficients: list[list[tuple[int, ...]]]
    K_used: list[int] = field(default_factory=list)

    @property
    def stages(self) -> int:
        return len(self.epsilons)


def dense_witnesses(G_or_decomp, stages: int, **search) -> DenseWitnesses:
    """Sets B_0..B_s in G, each a basis of V0 with sup norm below eps0 * 2^-n."""
    decomp = G_or_decomp if isinstance(G_or_decomp, ClosureDecomposition) else decompose(G_or_decomp)
    out = DenseWitnesses([], [], [], [])
    for n in range(stages + 1):
        eps = decomp.epsilon0 / 2**n
        sb = find_short_basis(decomp, eps, **search)
        out.epsilons.append(eps)
        out.B.append(sb.vectors)
        out.coefficients.append(sb.coefficients)
        out.K_used.append(sb.K)
    return out


def approximate_in_V0(B: list[Vector], v: Vector) -> tuple[Vector, tuple[int, ...]]:
    """w = sum floor(alpha_u) u over u in B, where v = sum alpha_u u.

    ``B`` is a real basis of a subspace containing ``v``; the returned pair is
    (w, integer coefficients on B).  sup_norm(v - w) < |B| * max ||u||.
    """
    if not B:
        if any(v):
            raise ValueError("nonzero target but empty basis")
        return v, ()
    m = len(v)
    cols = [[u[j] for u in B] for j in range(m)]
    alpha = linalg.solve(cols, list(v))
    if alpha is None:
        raise ValueError("target is not in the span of B")
    ks = tuple(floor(a.evaluate()) for a in alpha)
    return combine(ks, B, m), ks


def approximation_error(v: Vector, w: Vector) -> Fraction:
    return sup_norm(vsub(v, w))
