"""Compact generating sets: {0} ∪ finite part ∪ a sequence converging to 0.

Three constructors produce certificates:

* :func:`compactgen_R`      subgroups of R (smallest positive element, or a
                            positive null sequence x_n with remainders
                            g_n - k_n x_n);
* :func:`compactgen_Rm`     subgroups of R^m (lattice part F, short bases
                            B_n of V0, and corrections g_n - u_n);
* :func:`compactgen_Romega` finitely supported subgroups of R^omega, built
                            stage by stage on the prefixes R^n.

:func:`verify_certificate` re-checks a certificate using only the group and
the certificate itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import floor
from typing import Sequence

from ._search import DEFAULT_CAP, box_search
from .closure import (
    DEFAULT_MAX_K,
    DEFAULT_START_K,
    ClosureDecomposition,
    approximate_in_V0,
    decompose,
    find_short_basis,
)
from .errors import BudgetExceeded, SupportExceeded
from .groups import (
    FgGroup,
    StreamedGroup,
    Vector,
    combine,
    format_vector,
    member,
    sup_norm,
    sup_norm_prefix,
    zero_vector,
)

DEFAULT_STAGES = 8


@dataclass(frozen=True)
class Emitted:
    """One element of the generating set."""

    vector: Vector
    witness: tuple[int, ...]  # integer combination of the input generators
    stage: int | None = None  # None: finite part
    bound: Fraction | None = None  # claimed sup-norm bound
    prefix: int | None = None  # bound applies to the first `prefix` coordinates only
    role: str = "finite"


@dataclass(frozen=True)
class CompactGenCertificate:
    space: str  # "R^m" or "R^omega"
    dimension: int  # m, or the support bound for R^omega
    method: str  # "R", "Rm", "Romega"
    generators: tuple[Vector, ...]
    finite_part: tuple[Emitted, ...]
    null_sequence: tuple[Emitted, ...]
    # per input generator: (element index, integer coefficient) pairs over finite_part + null_sequence
    coverage: tuple[tuple[tuple[int, int], ...], ...]
    scale: Fraction | None  # stage-n bounds are <= scale * 2^-n; None for R^omega / streamed
    epsilon0: Fraction
    search_K: tuple[int, ...] = ()
    streamed: bool = False
    norm: str = "sup"

    @property
    def elements(self) -> tuple[Emitted, ...]:
        return self.finite_part + self.null_sequence


@dataclass
class Verdict:
    valid: bool
    failures: list[str] = field(default_factory=list)
    checked: int = 0

    def __bool__(self):
        return self.valid

    @property
    def first_failure(self) -> str | None:
        return self.failures[0] if self.failures else None

    def summary(self) -> str:
        return "valid" if self.valid else f"invalid: {self.first_failure}"


# -- helpers ---------------------------------------------------------------------------

def _smallest_positive(G: FgGroup, eps: Fraction, start_K=DEFAULT_START_K, max_K=DEFAULT_MAX_K, cap=DEFAULT_CAP):
    """Smallest positive element of a subgroup of R with value < eps found by deepening."""
    A = G.evaluated_basis_matrix()
    K = start_K
    while K <= max_K:
        best = None
        for x in box_search(A, K, eps, cap=cap):
            val = sum((xi * a for xi, a in zip(x, A[0])), Fraction(0))
            if val > 0 and (best is None or (val, x) < best):
                best = (val, x)
        if best is not None:
            return best[1], best[0], K
        K *= 2
    raise BudgetExceeded(f"no positive element below {eps} with coefficients up to {max_K}", reached=max_K)


class _Builder:
    """Collects emitted elements and integer expressions over them."""

    def __init__(self, G: FgGroup):
        self.G = G
        self.finite: list[Emitted] = []
        self.null: list[Emitted] = []

    def witness(self, coords) -> tuple[int, ...]:
        return self.G.basis_to_generators(coords)

    def add_finite(self, coords) -> tuple:
        self.finite.append(Emitted(self.G.element(coords), self.witness(coords)))
        return ("f", len(self.finite) - 1)

    def add_null(self, coords, stage, bound, role, prefix=None) -> tuple:
        self.null.append(Emitted(self.G.element(coords), self.witness(coords), stage, Fraction(bound), prefix, role))
        return ("n", len(self.null) - 1)

    def finish(self, expressions):
        order = sorted(range(len(self.null)), key=lambda i: (self.null[i].stage, i))
        new_index = {("f", i): i for i in range(len(self.finite))}
        for pos, i in enumerate(order):
            new_index[("n", i)] = len(self.finite) + pos
        null = tuple(self.null[i] for i in order)
        coverage = []
        for expr in expressions:
            pairs = sorted((new_index[k], c) for k, c in expr.items() if c)
            coverage.append(tuple(pairs))
        return tuple(self.finite), null, tuple(coverage)


def _add_expr(target: dict, expr: dict, times: int = 1):
    for k, c in expr.items():
        target[k] = target.get(k, 0) + times * c


def _unit(i: int, n: int) -> tuple[int, ...]:
    return tuple(int(j == i) for j in range(n))


def _sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _lincomb(pairs, r):
    out = [0] * r
    for c, coords in pairs:
        if c:
            for k, x in enumerate(coords):
                out[k] += c * x
    return tuple(out)


# -- R ------------------------------------------------------------------------------------

def compactgen_R(G, stages: int = DEFAULT_STAGES, **search) -> CompactGenCertificate:
    """Compact generating sequence for a subgroup of R.

    A discrete group (abstract rank <= 1) is generated by its smallest
    positive element.  Otherwise positive elements x_n below 2^-n x_0 are found
    by deepening search, and each enumerated g_n (generators in rounds) is
    split as (g_n - k_n x_n) + k_n x_n with k_n = floor(g_n / x_n).
    """
    if isinstance(G, StreamedGroup):
        return _compactgen_R_streamed(G, stages, **search)
    if G.ambient != 1:
        raise ValueError("compactgen_R needs a subgroup of R")
    ngen, r = len(G.generators), G.rank
    b = _Builder(G)
    exprs = []
    if r == 0:
        b.finite.append(Emitted(zero_vector(1), (0,) * ngen))
        fin, null, cov = b.finish([{} for _ in range(ngen)])
        return CompactGenCertificate("R^m", 1, "R", G.generators, fin, null, cov, Fraction(1), Fraction(1))
    if r == 1:
        s = 1 if G.basis[0][0].sign() > 0 else -1
        key = b.add_finite((s,))
        exprs = [{key: s * G.to_basis[i][0]} for i in range(ngen)]
        fin, null, cov = b.finish(exprs)
        return CompactGenCertificate("R^m", 1, "R", G.generators, fin, null, cov, Fraction(1), sup_norm(G.basis[0]))

    x0_coords, x0, K0 = _smallest_positive(G, Fraction(1), **search)
    xs = [(x0_coords, x0)]
    Ks = [K0]
    total = max(stages, ngen)
    for n in range(1, total):
        coords, val, K = _smallest_positive(G, x0 / 2**n, **search)
        xs.append((coords, val))
        Ks.append(K)
    exprs = [dict() for _ in range(ngen)]
    for n in range(total):
        coords, val = xs[n]
        xkey = b.add_null(coords, n, x0 / 2**n, "short")
        i = n % ngen
        g = G.to_basis[i]
        k = floor(G.generators[i][0].evaluate() / val)
        c = _sub(g, _lincomb([(k, coords)], r))
        expr = {xkey: k}
        if any(c):
            ckey = b.add_null(c, n, val, "correction")
            expr[ckey] = 1
        if n < ngen:
            exprs[i] = expr
    fin, null, cov = b.finish(exprs)
    return CompactGenCertificate("R^m", 1, "R", G.generators, fin, null, cov, x0, Fraction(1), tuple(Ks))


def _compactgen_R_streamed(S: StreamedGroup, stages: int, **search) -> CompactGenCertificate:
    if S.ambient != 1:
        raise ValueError("compactgen_R needs a subgroup of R")
    final = S.prefix(stages)
    b = _Builder(final)
    exprs = []
    Ks = []
    for n in range(stages):
        P = S.prefix(n + 1)
        g = S.element(n)
        if P.rank == 0:
            exprs.append({})
            continue
        if P.rank == 1:
            s = 1 if P.basis[0][0].sign() > 0 else -1
            coords_P, val, K = (s,), abs(P.basis[0][0].evaluate()), 0
            bound = val
        else:
            coords_P, val, K = _smallest_positive(P, Fraction(1, 2**n), **search)
            bound = Fraction(1, 2**n)
        Ks.append(K)
        # coordinates in the final prefix group, via generator combinations of P
        wit = P.basis_to_generators(coords_P) + (0,) * (stages - n - 1)
        coords = final.generators_to_basis(wit)
        xkey = b.add_null(coords, n, bound, "short")
        k = floor(g[0].evaluate() / val)
        c = _sub(final.to_basis[n], _lincomb([(k, coords)], final.rank))
        expr = {xkey: k}
        if any(c):
            expr[b.add_null(c, n, val, "correction")] = 1
        exprs.append(expr)
    fin, null, cov = b.finish(exprs)
    return CompactGenCertificate("R^m", 1, "R", final.generators, fin, null, cov, None, Fraction(1), tuple(Ks), streamed=True)


# -- R^m -----------------------------------------------------------------------------------

def _needed_stage(dim: int, eps0: Fraction, n: int) -> int:
    """Smallest k with dim * eps0 * 2^-k < 2^-n."""
    k = 0
    while dim * eps0 / 2**k >= Fraction(1, 2**n):
        k += 1
    return k


def compactgen_Rm(G: FgGroup, stages: int = DEFAULT_STAGES, **search) -> CompactGenCertificate:
    """Compact generating sequence for a subgroup of R^m.

    Emits the lattice part F, short bases B_k of V0 (norm < eps0 2^-k), and for
    each enumerated generator g_n a correction g_n - u_n of norm < 2^-n where
    u_n is an integer combination of F and some B_k.
    """
    decomp = decompose(G)
    ngen, r = len(G.generators), G.rank
    b = _Builder(G)
    if r == 0:
        b.finite.append(Emitted(zero_vector(G.ambient), (0,) * ngen))
    Fkeys = [b.add_finite(c) for c in decomp.F_coefficients]
    k0 = decomp.dim_V0
    eps0 = decomp.epsilon0
    bases = {}
    Bkeys = {}
    Ks = []

    def stage_basis(k):
        if k not in bases:
            sb = find_short_basis(decomp, eps0 / 2**k, **search)
            bases[k] = sb
            Bkeys[k] = [b.add_null(c, k, sb.bound, "short") for c in sb.coefficients]
            Ks.append(sb.K)
        return bases[k]

    if k0:
        for k in range(stages):
            stage_basis(k)
    exprs = [dict() for _ in range(ngen)]
    total = max(stages, ngen)
    for n in range(total):
        i = n % ngen
        z, d = decomp.coverage[i]
        expr = {}
        for key, zj in zip(Fkeys, z):
            if zj:
                expr[key] = zj
        if any(d):
            k = _needed_stage(k0, eps0, n)
            sb = stage_basis(k)
            _, ks = approximate_in_V0(sb.vectors, G.element(d))
            w = _lincomb(zip(ks, sb.coefficients), r)
            c = _sub(d, w)
            for key, kj in zip(Bkeys[k], ks):
                if kj:
                    expr[key] = expr.get(key, 0) + kj
            if any(c):
                expr[b.add_null(c, n, Fraction(1, 2**n), "correction")] = 1
        if n < ngen:
            exprs[i] = expr
    fin, null, cov = b.finish(exprs)
    scale = max(eps0, Fraction(1))
    return CompactGenCertificate("R^m", G.ambient, "Rm", G.generators, fin, null, cov, scale, eps0, tuple(Ks))


# -- R^omega ---------------------------------------------------------------------------------

def _check_support(G: FgGroup, support: int):
    for g in G.generators:
        if any(a for a in g[support:]):
            raise SupportExceeded(f"generator {format_vector(g)} has support beyond coordinate {support - 1}")


def compactgen_Romega(G: FgGroup, stages: int | None = None, support: int | None = None, **search) -> CompactGenCertificate:
    """Staged compact generating sequence for a finitely supported subgroup of R^omega.

    Vectors of ``G`` list the coordinates below the support bound.  At stage n
    the prefix group G|n is decomposed; B_n are elements of G whose n-prefix
    spans V_n with prefix norm < eps_n < 2^-n, F_n lifts the lattice part of
    G|n, and every u in F_{n+1} is corrected by some û in span_Z(F_n ∪ B_n)
    with prefix norm ||u - û||_n <= n 2^-n.
    """
    if support is not None:
        _check_support(G, support)
    S = support if support is not None else G.ambient
    N = stages if stages is not None else max(S, DEFAULT_STAGES)
    ngen, r = len(G.generators), G.rank
    b = _Builder(G)
    if r == 0:
        b.finite.append(Emitted(zero_vector(G.ambient), (0,) * ngen))
    Ks = []

    levels = []
    for n in range(N + 1):
        T = G.truncate(n)
        dec = decompose(T)
        eps_n = min(dec.epsilon0, Fraction(1)) / 2 ** (n + 1)
        sb = find_short_basis(dec, eps_n, **search)
        Ks.append(sb.K)
        B_lift = [T.basis_to_generators(c) for c in sb.coefficients]
        F_lift = [T.basis_to_generators(c) for c in dec.F_coefficients]
        Bkeys = [b.add_null(c, n, eps_n, "short", prefix=n) for c in B_lift]
        levels.append((T, dec, sb, B_lift, F_lift, Bkeys))

    def correct(n, coords):
        """û in span_Z(F_n ∪ B_n) for u with G-coordinates `coords`; returns (û coords, expr over F_n/B_n)."""
        T, dec, sb, B_lift, F_lift, Bkeys = levels[n]
        z, d = dec.split(T.generators_to_basis(coords))
        _, ks = approximate_in_V0([T.element(c) for c in sb.coefficients], T.element(d))
        uhat = _lincomb(list(zip(z, F_lift)) + list(zip(ks, B_lift)), r)
        return uhat, z, ks

    # expressions of F_n elements over emitted keys, built inductively
    F_expr = [[] for _ in range(N + 1)]
    for n in range(N):
        _, _, _, _, F_next, _ = levels[n + 1]
        Bkeys = levels[n][5]
        exprs = []
        for u in F_next:
            uhat, z, ks = correct(n, u)
            expr = {}
            for zj, e in zip(z, F_expr[n]):
                _add_expr(expr, e, zj)
            for kj, key in zip(ks, Bkeys):
                if kj:
                    expr[key] = expr.get(key, 0) + kj
            h = _sub(u, uhat)
            if any(h):
                expr[b.add_null(h, n, Fraction(n, 2**n), "tail", prefix=n)] = 1
            exprs.append(expr)
        F_expr[n + 1] = exprs

    gen_exprs = []
    for i in range(ngen):
        coords = G.to_basis[i]
        uhat, z, ks = correct(N, coords)
        expr = {}
        for zj, e in zip(z, F_expr[N]):
            _add_expr(expr, e, zj)
        for kj, key in zip(ks, levels[N][5]):
            if kj:
                expr[key] = expr.get(key, 0) + kj
        h = _sub(coords, uhat)
        if any(h):
            expr[b.add_null(h, N, Fraction(N, 2**N), "correction", prefix=N)] = 1
        gen_exprs.append(expr)
    fin, null, cov = b.finish(gen_exprs)
    eps0 = levels[N][1].epsilon0
    return CompactGenCertificate("R^omega", S, "Romega", G.generators, fin, null, cov, None, eps0, tuple(Ks))


def compactgen(G, stages: int | None = None, **kwargs) -> CompactGenCertificate:
    """Dispatch on the ambient space: R, R^m, or (with ``omega=True``) R^omega."""
    omega = kwargs.pop("omega", False)
    if omega:
        return compactgen_Romega(G, stages, **kwargs)
    stages = DEFAULT_STAGES if stages is None else stages
    if isinstance(G, StreamedGroup) or G.ambient == 1:
        return compactgen_R(G, stages, **kwargs)
    return compactgen_Rm(G, stages, **kwargs)


# -- verification -------------------------------------------------------------------------------

def verify_certificate(G, cert: CompactGenCertificate) -> Verdict:
    """Re-check membership, norm bounds, decay and generation, item by item."""
    if isinstance(G, StreamedGroup):
        G = G.prefix(len(cert.generators))
    failures: list[str] = []
    checked = 0
    gens = G.generators
    if len(gens) != len(cert.generators) or any(a != b for a, b in zip(gens, cert.generators)):
        failures.append("generator list of the certificate does not match the group")
        return Verdict(False, failures, checked)
    elements = cert.elements
    last_stage = -1
    for idx, e in enumerate(elements):
        label = f"element {idx}" + (f" (stage {e.stage})" if e.stage is not None else " (finite part)")
        checked += 1
        if len(e.vector) != G.ambient:
            failures.append(f"{label}: wrong dimension")
            continue
        if len(e.witness) != len(gens) or combine(e.witness, gens, G.ambient) != tuple(e.vector):
            failures.append(f"{label}: witness does not reproduce the vector")
        if not member(G, e.vector):
            failures.append(f"{label}: membership failure, {format_vector(e.vector)} is not in G")
        if e.stage is None:
            continue
        if e.stage < last_stage:
            failures.append(f"{label}: stages out of order")
        last_stage = max(last_stage, e.stage)
        if e.bound is None:
            failures.append(f"{label}: missing norm bound")
            continue
        norm = sup_norm_prefix(e.vector, e.prefix) if e.prefix is not None else sup_norm(e.vector)
        if norm > e.bound:
            failures.append(f"stage {e.stage}: {label} has norm {norm} exceeding claimed bound {e.bound}")
        if cert.method == "Romega":
            if e.prefix != e.stage:
                failures.append(f"stage {e.stage}: {label} bound is not on the {e.stage}-prefix")
            elif e.bound > Fraction(e.stage, 2**e.stage):
                failures.append(f"stage {e.stage}: claimed bound {e.bound} exceeds n*2^-n")
        elif not cert.streamed:
            if cert.scale is None or e.bound > cert.scale / 2**e.stage:
                failures.append(f"stage {e.stage}: claimed bound {e.bound} exceeds c*2^-n with c={cert.scale}")
    if len(cert.coverage) != len(gens):
        failures.append("coverage does not list every generator")
    else:
        for j, (g, pairs) in enumerate(zip(gens, cert.coverage)):
            checked += 1
            if any(not 0 <= i < len(elements) for i, _ in pairs):
                failures.append(f"generator {j}: coverage refers to a missing element")
                continue
            total = combine([c for _, c in pairs], [elements[i].vector for i, _ in pairs], G.ambient)
            if total != tuple(g):
                failures.append(f"generator {j}: claimed combination does not equal {format_vector(g)}")
    return Verdict(not failures, failures, checked)


def is_convergent_sequence_form(cert: CompactGenCertificate) -> bool:
    """Structural check: finitely many elements per stage and bounds tending to 0."""
    stages = [e.stage for e in cert.null_sequence]
    if any(s is None for s in stages) or stages != sorted(stages):
        return False
    if cert.method == "Romega":
        return all(e.prefix == e.stage and e.bound <= Fraction(e.stage, 2**e.stage) for e in cert.null_sequence)
    if cert.scale is None:
        return False
    return all(e.bound <= cert.scale / 2**e.stage for e in cert.null_sequence)
