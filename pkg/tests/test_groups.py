import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from eucgroups import linalg
from eucgroups.errors import BudgetExceeded, NonlinearCoordinate
from eucgroups.groups import (
    FgGroup,
    StreamedGroup,
    combine,
    enumerate_ball,
    flatten,
    member,
    sup_norm,
    sup_norm_prefix,
)
from eucgroups.scalars import ConstantBasis, ExactScalar

from oracles import brute_ball, structured_group

CB = ConstantBasis()
CB.add("t", "1.41421356")
CB.add("s", "1.7320508")
T = CB.scalar("t")
S = CB.scalar("s")
ONE, ZERO = ExactScalar(1), ExactScalar(0)

Z2 = FgGroup([(1, 0), (0, 1)])
ZT = FgGroup([(1,), (T,)])


def test_flatten_examples():
    rows, legend = flatten(Z2)
    assert rows == [[1, 0], [0, 1]]
    rows, legend = flatten(ZT)
    assert rows == [[1, 0], [0, 1]]
    rows, legend = flatten(FgGroup([(ONE, T)]))
    assert rows == [[1, 0, 0, 1]]
    assert [(j, len(mono)) for j, mono in legend] == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_flatten_rejects_degree_two():
    with pytest.raises(NonlinearCoordinate):
        flatten(FgGroup([(T * T,)]))
    rows, _ = flatten(FgGroup([(T * T,)]), allow_nonlinear=True)
    assert len(rows) == 1


def test_member_examples():
    m = member(Z2, (2, 3))
    assert m and m.witness == (2, 3)
    assert not member(Z2, (Fraction(1, 2), 0))
    m = member(ZT, (3 - 2 * T,))
    assert m and m.witness == (3, -2)
    assert not member(ZT, (T / 2,))


def test_sup_norm_examples():
    assert sup_norm((ZERO, ZERO)) == 0
    assert sup_norm((ONE, T)) == T.evaluate()
    assert sup_norm((-T,)) == T.evaluate()
    assert sup_norm_prefix((ExactScalar(5), ONE, ExactScalar(7)), 2) == 5


def test_enumerate_ball_examples():
    assert [x for _, x in enumerate_ball(Z2, 1, Fraction(1, 2))] == [(0, 0)]
    vecs = [v for v, _ in enumerate_ball(ZT, 3, Fraction(1, 4))]
    assert (3 - 2 * T,) in vecs and (-3 + 2 * T,) in vecs
    assert [x for _, x in enumerate_ball(ZT, 0, Fraction(1, 4))] == [(0, 0)]


def test_enumerate_ball_matches_brute_force_and_is_sorted():
    G = FgGroup([(1, 0), (T, 0), (0, 1), (T, T)])
    for K, eps in [(3, Fraction(1, 2)), (4, Fraction(1, 5)), (2, Fraction(3, 2))]:
        got = [x for _, x in enumerate_ball(G, K, eps)]
        assert got == sorted(got)
        assert set(got) == brute_ball(G, K, eps)


def test_enumerate_ball_budget():
    # the cap counts grid points over the free coefficients (two here)
    G = FgGroup([(1,), (T,), (S,)])
    with pytest.raises(BudgetExceeded) as info:
        enumerate_ball(G, 1000, Fraction(1, 10), cap=10**4)
    assert info.value.reached == 1000
    assert len(enumerate_ball(G, 40, Fraction(1, 10), cap=10**4)) > 1


def test_truncate_uses_abstract_coordinates():
    G = FgGroup([(1, T, 0), (0, 1, 1)])
    H = G.truncate(2)
    assert H.ambient == 2
    assert [h for h in H.generators] == [h[:2] for h in G.basis]


def test_streamed_group_prefixes():
    S = StreamedGroup.round_robin([(1,), (T,)])
    assert S.take(3) == [(ONE,), (T,), (ONE,)]
    assert S.prefix(2).rank == 2
    assert S.prefix(5).rank == 2
    sq = StreamedGroup(1, lambda n: (Fraction(1, 2**n),))
    assert sq.prefix(4).rank == 1
    assert member(sq.prefix(4), (Fraction(1, 8),))
    assert not member(sq.prefix(3), (Fraction(1, 8),))


# -- properties ------------------------------------------------------------------------------

seeds = st.integers(0, 10**6)


@settings(max_examples=40, deadline=None)
@given(seeds, st.lists(st.integers(-3, 3), min_size=4, max_size=4), st.lists(st.integers(-3, 3), min_size=4, max_size=4))
def test_member_witness_and_group_operations(seed, a, b):
    G, _ = structured_group(seed)
    n = len(G.generators)
    for i, g in enumerate(G.generators):
        m = member(G, g)
        assert m and combine(m.witness, G.generators, G.ambient) == g
    u = G.from_generators(a[:n])
    v = G.from_generators(b[:n])
    for w in (u, v, tuple(x + y for x, y in zip(u, v)), tuple(-x for x in u)):
        m = member(G, w)
        assert m and combine(m.witness, G.generators, G.ambient) == w


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_basis_round_trip(seed):
    G, _ = structured_group(seed)
    n, r = len(G.generators), G.rank
    # to_basis is n x r, from_basis is r x n; from_basis . to_basis = I_r
    prod = linalg.matmul([list(row) for row in G.from_basis], [list(row) for row in G.to_basis])
    assert prod == linalg.identity(r)
    for i in range(n):
        e = [0] * n
        e[i] = 1
        assert G.element(G.generators_to_basis(e)) == G.generators[i]
    for j in range(r):
        e = [0] * r
        e[j] = 1
        assert G.from_generators(G.basis_to_generators(e)) == G.basis[j]


@settings(max_examples=25, deadline=None)
@given(seeds, st.integers(1, 3), st.fractions(Fraction(1, 10), Fraction(2), max_denominator=20))
def test_enumeration_symmetric_and_flatten_injective(seed, K, eps):
    G, _ = structured_group(seed)
    if (2 * K + 1) ** G.rank > 20000:
        return
    out = enumerate_ball(G, K, eps)
    coeffs = {x for _, x in out}
    assert coeffs == brute_ball(G, K, eps)
    assert {tuple(-c for c in x) for x in coeffs} == coeffs
    for v, x in out:
        assert G.coordinates(v) == x
    for (_, x), (_, y) in itertools.islice(itertools.product(out, out), 200):
        s = tuple(a + b for a, b in zip(x, y))
        if max(map(abs, s), default=0) <= K and sup_norm(G.element(s)) < eps:
            assert s in coeffs
