from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from eucgroups.closure import (
    approximate_in_V0,
    approximation_error,
    decompose,
    dense_part,
    dense_witnesses,
    find_short_basis,
    lattice_part,
)
from eucgroups.errors import BudgetExceeded
from eucgroups.groups import FgGroup, combine, enumerate_ball, member, sup_norm, vadd
from eucgroups.scalars import ConstantBasis, ExactScalar

from oracles import structured_group

CB = ConstantBasis()
CB.add("t", "1.41421356")
T = CB.scalar("t")
ONE, ZERO = ExactScalar(1), ExactScalar(0)

Z2 = FgGroup([(1, 0), (0, 1)])
ZT = FgGroup([(1,), (T,)])
XAXIS = FgGroup([(1, 0), (T, 0), (0, 1)])


def test_lattice_has_no_dense_part():
    d = decompose(Z2)
    assert d.V0_basis == ()
    assert d.F == ((ONE, ZERO), (ZERO, ONE))
    assert d.epsilon0 == 1 and d.epsilon0_exact


def test_dense_line():
    assert dense_part(ZT) == ((ONE,),)
    F, eps0 = lattice_part(ZT)
    assert F == () and eps0 > 0


def test_dense_x_axis_in_plane():
    d = decompose(XAXIS)
    assert d.V0_basis == ((ONE, ZERO),)
    assert d.F == ((ZERO, ONE),)
    assert 0 < d.epsilon0 <= 1
    # oracle: the K=50 box holds no nonzero element off the x-axis of norm < 1
    for v, _ in enumerate_ball(XAXIS, 50, Fraction(1, 100)):
        assert v[1] == 0
    for v, _ in enumerate_ball(XAXIS, 6, 1):
        assert v[1] == 0


def test_trivial_group():
    d = decompose(FgGroup([], ambient=2))
    assert d.V0_basis == () and d.F == () and d.epsilon0 == 1


def test_dense_witnesses_examples():
    w = dense_witnesses(ZT, 3)
    eps0 = decompose(ZT).epsilon0
    for n, (eps, B, coeffs) in enumerate(zip(w.epsilons, w.B, w.coefficients)):
        assert eps == eps0 / 2**n
        assert len(B) == 1
        assert sup_norm(B[0]) < eps
        assert member(ZT, B[0])
        assert ZT.element(coeffs[0]) == B[0]
    w = dense_witnesses(Z2, 2)
    assert w.B == [[], [], []]
    w = dense_witnesses(XAXIS, 2)
    assert all(len(B) == 1 and B[0][1] == 0 for B in w.B)


def test_short_basis_budget_reports_reached_K():
    d = decompose(ZT)
    with pytest.raises(BudgetExceeded) as info:
        find_short_basis(d, Fraction(1, 10**12), start_K=4, max_K=64)
    assert info.value.reached is not None


def test_approximate_in_V0():
    w = dense_witnesses(ZT, 7)
    n = next(i for i, e in enumerate(w.epsilons) if e <= Fraction(1, 100))
    B = w.B[n]
    v = (ExactScalar(Fraction(1, 3)),)
    approx, ks = approximate_in_V0(B, v)
    assert member(ZT, approx)
    assert approximation_error(v, approx) <= len(B) * w.epsilons[n] <= Fraction(1, 100)
    assert approximate_in_V0(B, (ZERO,)) == ((ZERO,), (0,))
    assert approximate_in_V0(B, B[0]) == (B[0], (1,))


# -- properties ------------------------------------------------------------------------------

seeds = st.integers(0, 10**6)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_coverage(seed):
    G, _ = structured_group(seed)
    d = decompose(G)
    assert len(d.coverage) == len(G.generators)
    for g, (fc, vc) in zip(G.generators, d.coverage):
        f = combine(fc, d.F, G.ambient)
        v = G.element(vc)
        assert vadd(f, v) == g
        assert d.in_V0(v)
    for f in d.F:
        assert member(G, f)


@settings(max_examples=20, deadline=None)
@given(seeds, st.randoms(use_true_random=False))
def test_dense_part_invariant_under_unimodular_rewrites(seed, rnd):
    G, _ = structured_group(seed)
    gens = [list(g) for g in G.generators]
    n = len(gens)
    for _ in range(3 * n):
        i, j = rnd.randrange(n), rnd.randrange(n)
        if i != j:
            c = rnd.choice([-2, -1, 1, 2])
            gens[i] = [a + c * b for a, b in zip(gens[i], gens[j])]
    rnd.shuffle(gens)
    H = FgGroup(gens, ambient=G.ambient)
    assert dense_part(H) == dense_part(G)


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_dense_witnesses_lie_in_V0(seed):
    G, _ = structured_group(seed)
    d = decompose(G)
    if not d.dim_V0:
        return
    w = dense_witnesses(d, 2)
    for eps, B in zip(w.epsilons, w.B):
        assert len(B) == d.dim_V0
        for u in B:
            assert sup_norm(u) < eps and member(G, u) and d.in_V0(u)
