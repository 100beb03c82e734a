import io
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eucgroups.errors import LineMeetsGroup, NotInGroup
from eucgroups.generic import (
    LineSpec,
    affine_line_meet,
    density_report,
    extend_discrete,
    line_meet,
    make_generic,
    support_of,
)
from eucgroups.groups import FgGroup, combine, vadd
from eucgroups.intersect import decide_discrete, independence_check, intersect_subspace
from eucgroups.scalars import ConstantBasis, ExactScalar

from oracles import SymbolTable, in_integer_span, kernel_points, subspace_conditions

ONE, ZERO = ExactScalar(1), ExactScalar(0)


def _oracle_line_points(G, u, K):
    """Coefficient vectors (on G's generators) in the K-box whose element lies on R u."""
    tab = SymbolTable()
    gens = [tab.vector(g) for g in G.generators]
    E = subspace_conditions(gens, span_sym=[tab.vector(u)], consts=tab.all)
    return kernel_points(E, len(gens), K)


def test_make_generic_examples():
    gg = make_generic(1, 2)
    (p,) = gg.group.generators
    assert len(gg.minted) == 2 and all(a.is_polynomial() and len(a.monomials()) == 1 for a in p)
    assert independence_check(make_generic(3, 2).group)
    a, b = make_generic(3, 2, seed=4), make_generic(3, 2, seed=4)
    assert [c.realization for c in a.constants] == [c.realization for c in b.constants]
    assert [c.realization for c in a.constants] != [c.realization for c in make_generic(3, 2, seed=5).constants]


def test_line_meet_examples():
    gg = make_generic(3, 2, seed=1)
    p0, p1, _ = gg.group.generators
    for u, expected in [
        (gg.element((2, 3, 0)), gg.element((2, 3, 0))),
        (gg.element((2, 4, 0)), gg.element((1, 2, 0))),
        (p0, p0),
    ]:
        m = line_meet(gg, LineSpec(u))
        assert m.u_star == expected
        assert m.support == support_of(gg.group.coordinates(u))
        pts = _oracle_line_points(gg.group, u, 50)
        coeffs = np.array(gg.group.basis_to_generators(m.coefficients), dtype=np.int64)
        assert in_integer_span(pts, [tuple(int(c) for c in coeffs)]).all()
    with pytest.raises(NotInGroup):
        line_meet(gg, LineSpec(tuple(a / 2 for a in p0)))


def test_affine_line_meet_examples():
    gg = make_generic(3, 2, seed=2)
    p0, p1, p2 = gg.group.generators
    res = affine_line_meet(gg, LineSpec(p1, offset=p0))
    assert res.u0 == p0 and res.u1 == p1
    fresh = ConstantBasis()
    fresh.fresh("q", 99)
    q = fresh.scalar("q")
    assert affine_line_meet(gg, LineSpec(p1, offset=(q, ZERO))).empty
    shifted = vadd(p0, p2)
    res = affine_line_meet(gg, LineSpec(p1, offset=shifted))
    base = line_meet(gg, LineSpec(p1))
    assert res.u1 == base.u_star
    assert LineSpec(p1, offset=shifted).contains(res.u0)
    assert gg.group.coordinates(res.u0) is not None
    assert "Z" in res.describe()


def test_extend_examples():
    cb = ConstantBasis()
    cb.add("t", "1.41421356")
    t = cb.scalar("t")
    Z2 = FgGroup([(1, 0), (0, 1)])
    ext = extend_discrete(Z2, (ONE, t), cb, seed=0)
    s = ExactScalar.of(ext.constant)
    assert ext.p == (s, s * t)
    G2 = ext.group
    pts = [G2.from_generators(c) for c in [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1), (2, -1, 1), (1, 0, -1)]]
    lines = [LineSpec(vadd(a, tuple(-x for x in b))) for a in pts for b in pts if a != b][:20]
    for L in lines:
        assert decide_discrete(intersect_subspace(G2, L.subspace())).discrete
    with pytest.raises(LineMeetsGroup):
        extend_discrete(Z2, (ONE, ExactScalar(2)), cb)

    trivial = FgGroup([], ambient=2)
    ext = extend_discrete(trivial, (ONE, t), cb, seed=1)
    assert ext.group.rank == 1

    cb3 = ConstantBasis()
    cb3.add("t", "1.41421356")
    t3 = cb3.scalar("t")
    G = FgGroup([], ambient=2)
    for k, d in enumerate([(ONE, t3), (ONE, 2 * t3 + 1), (t3, ExactScalar(3))]):
        G = extend_discrete(G, d, cb3, seed=k).group
    assert independence_check(G, allow_nonlinear=True)
    assert G.rank == 3


def test_extension_checks_supplied_lines():
    cb = ConstantBasis()
    cb.add("t", "1.41421356")
    t = cb.scalar("t")
    G = FgGroup([(1, 0), (0, 1)])
    lines = [LineSpec((ONE, ZERO)), LineSpec((ONE, ONE)), LineSpec((2, ExactScalar(3)))]
    ext = extend_discrete(G, (ONE, t), cb, lines=lines)
    assert ext.conservative and len(ext.checks) == 3
    assert [gens for _, gens, _ in ext.checks][0] == ((ONE, ZERO),)


def test_density_examples():
    cb = ConstantBasis()
    cb.add("t", "1.41421356")
    t = cb.scalar("t")
    rep = density_report(FgGroup([(1,), (t,)]), [(Fraction(1, 3),)], Fraction(1, 100), 1000)
    assert rep.rows[0].distance < Fraction(1, 100) and rep.all_within
    rep = density_report(FgGroup([(1, 0), (0, 1)]), [(Fraction(1, 2), Fraction(1, 2))], Fraction(1, 100), 7)
    assert rep.rows[0].distance == Fraction(1, 2) and rep.rows[0].flagged
    rep = density_report(FgGroup([(1,), (t,)]), [(t.evaluate(),)], Fraction(1, 100), 3)
    assert rep.rows[0].distance == 0
    buf = io.StringIO()
    rep.to_csv(buf)
    assert buf.getvalue().splitlines()[0] == "target,distance,distance_float,flagged,coefficients"


# -- properties ------------------------------------------------------------------------------

@settings(max_examples=10, deadline=None)
@given(st.integers(0, 1000), st.lists(st.integers(-4, 4), min_size=3, max_size=3).filter(any))
def test_line_meet_minimality_and_support(seed, coeffs):
    gg = make_generic(3, 2, seed=seed)
    u = gg.group.from_generators(coeffs)
    m = line_meet(gg, LineSpec(u))
    pts = _oracle_line_points(gg.group, u, 50)
    gen = gg.group.basis_to_generators(m.coefficients)
    assert in_integer_span(pts, [gen]).all()
    for x in pts:
        if any(x):
            assert support_of(x) == support_of(gen)


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 1000))
def test_density_distances_shrink_with_K(seed):
    gg = make_generic(2, 1, seed=seed)
    targets = [(Fraction(k, 7),) for k in range(7)]
    prev = None
    for K in (5, 20, 80):
        rep = density_report(gg, targets, Fraction(1, 100), K)
        d = [r.distance for r in rep.rows]
        if prev is not None:
            assert all(a <= b for a, b in zip(d, prev))
        prev = d
