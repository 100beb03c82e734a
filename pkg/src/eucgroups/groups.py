"""Finitely generated subgroups of R^m with exact coordinates.

A group element is a tuple of :class:`ExactScalar` coordinates.  Each
coordinate is a polynomial over Q in the constants; expanding every
coordinate over its monomials ("flattening") embeds the group in a rational
vector space, where integer spans are ordinary lattices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, NamedTuple, Sequence

from . import linalg
from ._search import DEFAULT_CAP, box_search
from .errors import NonlinearCoordinate
from .scalars import ONE_MONO, ZERO, ExactScalar, Monomial, as_scalar, format_monomial, mono_key

_ONE = Fraction(1)

Vector = tuple  # tuple[ExactScalar, ...]


def vector(coords: Iterable) -> Vector:
    return tuple(as_scalar(c) for c in coords)


def zero_vector(m: int) -> Vector:
    return (ZERO,) * m


def vadd(u: Vector, v: Vector) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def vsub(u: Vector, v: Vector) -> Vector:
    return tuple(a - b for a, b in zip(u, v))


def vneg(u: Vector) -> Vector:
    return tuple(-a for a in u)


def vscale(c, u: Vector) -> Vector:
    c = as_scalar(c)
    return tuple(c * a for a in u)


def combine(coeffs: Sequence, vectors: Sequence[Vector], m: int | None = None) -> Vector:
    """Sum of ``c_i * v_i``; ``m`` is needed when ``vectors`` is empty."""
    if m is None:
        m = len(vectors[0])
    out = [ZERO] * m
    for c, v in zip(coeffs, vectors):
        if c:
            for j, a in enumerate(v):
                if a:
                    out[j] = out[j] + (a * c if not isinstance(c, int) else a.scale(c))
    return tuple(out)


def is_zero_vector(v: Vector) -> bool:
    return not any(v)


def evaluate_vector(v: Vector) -> tuple[Fraction, ...]:
    return tuple(a.evaluate() for a in v)


def sup_norm(v: Vector) -> Fraction:
    """max_j |evaluate(v_j)|."""
    return max((abs(a.evaluate()) for a in v), default=Fraction(0))


def sup_norm_prefix(v: Vector, n: int) -> Fraction:
    """Sup norm of the first ``n`` coordinates (coordinates past the end count as 0)."""
    return sup_norm(v[:n])


def format_vector(v: Vector) -> str:
    return "(" + ", ".join(str(a) for a in v) + ")"


# -- flattening ------------------------------------------------------------------

def _check_polynomial(v: Vector):
    for a in v:
        if not a.is_polynomial():
            raise NonlinearCoordinate(f"coordinate {a} is not a polynomial in the constants")


def _legend_for(vectors: Sequence[Vector], m: int, allow_nonlinear: bool):
    monos: set = set()
    consts: set = set()
    for v in vectors:
        _check_polynomial(v)
        for a in v:
            for mono in a.monomials():
                if len(mono) > 1 or (mono and mono[0][1] > 1):
                    if not allow_nonlinear:
                        raise NonlinearCoordinate(f"coordinate {a} has degree >= 2 (field-tier only)")
                monos.add(mono)
                consts.update(c for c, _ in mono)
    if allow_nonlinear and any(len(mo) > 1 or (mo and mo[0][1] > 1) for mo in monos):
        basis = sorted(monos | {ONE_MONO}, key=mono_key)
    else:
        basis = [ONE_MONO] + [((c, 1),) for c in sorted(consts, key=lambda c: c.sort_key())]
    return tuple((j, mono) for j in range(m) for mono in basis)


def _flatten_vector(v: Vector, index: dict) -> list[Fraction] | None:
    row = [Fraction(0)] * len(index)
    for j, a in enumerate(v):
        for mono, c in a.numerator.items():
            k = index.get((j, mono))
            if k is None:
                return None
            row[k] = c
    return row


def flatten(G: "FgGroup", allow_nonlinear: bool = False):
    """Rational matrix of flattened generators and its column legend.

    The legend lists ``(coordinate, monomial)`` pairs.  In the linear tier the
    monomials are 1 and every constant appearing in the group.  Coordinates of
    degree >= 2 raise :class:`NonlinearCoordinate` unless ``allow_nonlinear``.
    """
    legend = _legend_for(G.generators, G.ambient, allow_nonlinear)
    index = {key: k for k, key in enumerate(legend)}
    return [_flatten_vector(g, index) for g in G.generators], legend


def legend_labels(legend) -> list[tuple[int, str]]:
    return [(j, format_monomial(mono)) for j, mono in legend]


# -- groups ------------------------------------------------------------------------

class Membership(NamedTuple):
    ok: bool
    witness: tuple[int, ...] | None

    def __bool__(self):
        return self.ok


class FgGroup:
    """The subgroup of R^m generated by finitely many exact vectors.

    On construction the generators are flattened and put in Hermite normal
    form, giving a free Z-basis (``basis``) together with integer change-of-basis
    matrices ``to_basis`` (generator i = sum_j to_basis[i][j] basis[j]) and
    ``from_basis`` (basis j = sum_i from_basis[j][i] generator i).
    """

    def __init__(self, generators: Iterable[Iterable], ambient: int | None = None):
        gens = tuple(vector(g) for g in generators)
        if ambient is None:
            if not gens:
                raise ValueError("ambient dimension required for an empty generator list")
            ambient = len(gens[0])
        for g in gens:
            if len(g) != ambient:
                raise ValueError(f"generator {format_vector(g)} has length {len(g)}, expected {ambient}")
        self.generators: tuple[Vector, ...] = gens
        self.ambient: int = ambient
        legend = _legend_for(gens, ambient, allow_nonlinear=True)
        self.legend = legend
        self.tier = "field" if any(len(mo) > 1 or (mo and mo[0][1] > 1) for _, mo in legend) else "linear"
        self._index = {key: k for k, key in enumerate(legend)}
        flat = [_flatten_vector(g, self._index) for g in gens]
        if flat:
            ints, den = linalg.integer_row_scale(flat)
            H, U, pivots = linalg.hnf_with_transform(ints)
        else:
            den, H, U, pivots = 1, [], [], []
        r = len(pivots)
        self._den = den
        self._hnf = tuple(tuple(row) for row in H[:r])
        self._pivots = tuple(pivots)
        self.from_basis = tuple(tuple(row) for row in U[:r])
        if gens:
            Uinv = linalg.integer_inverse(U)
            self.to_basis = tuple(tuple(row[:r]) for row in Uinv)
        else:
            self.to_basis = ()
        self.basis: tuple[Vector, ...] = tuple(self._unflatten([Fraction(x, den) for x in row]) for row in self._hnf)

    def _unflatten(self, row: Sequence[Fraction]) -> Vector:
        coords: list[dict] = [{} for _ in range(self.ambient)]
        for (j, mono), c in zip(self.legend, row):
            if c:
                coords[j][mono] = c if isinstance(c, Fraction) else Fraction(c)
        # polynomial numerators over a unit denominator are already canonical
        return tuple(ExactScalar._raw(p, {ONE_MONO: _ONE}) for p in coords)

    @property
    def rank(self) -> int:
        return len(self.basis)

    def __repr__(self):
        return f"FgGroup(ambient={self.ambient}, rank={self.rank}, generators={[format_vector(g) for g in self.generators]})"

    def element(self, coeffs: Sequence[int]) -> Vector:
        """The element with the given integer coordinates on the abstract basis."""
        if len(coeffs) != self.rank:
            raise ValueError(f"expected {self.rank} coordinates, got {len(coeffs)}")
        # integer arithmetic on the Hermite rows, then one rebuild per coordinate
        row = [0] * len(self.legend)
        for c, h in zip(coeffs, self._hnf):
            if c:
                for k, x in enumerate(h):
                    if x:
                        row[k] += c * x
        den = self._den
        return self._unflatten([Fraction(x, den) if x else 0 for x in row])

    def from_generators(self, coeffs: Sequence[int]) -> Vector:
        return combine(coeffs, self.generators, self.ambient)

    def coordinates(self, v: Vector) -> tuple[int, ...] | None:
        """Integer coordinates of ``v`` on the abstract basis, or None if v is not in G."""
        v = vector(v)
        if len(v) != self.ambient:
            raise ValueError("dimension mismatch")
        _check_polynomial(v)
        row = _flatten_vector(v, self._index)
        if row is None:
            return None
        scaled = [x * self._den for x in row]
        if any(x.denominator != 1 for x in scaled):
            return None
        return linalg.lattice_member(linalg.ZLattice(self._hnf, len(self.legend)), [int(x) for x in scaled])

    def basis_to_generators(self, coeffs: Sequence[int]) -> tuple[int, ...]:
        """Convert abstract-basis coordinates to a generator combination."""
        n = len(self.generators)
        out = [0] * n
        for c, row in zip(coeffs, self.from_basis):
            if c:
                for i, x in enumerate(row):
                    out[i] += c * x
        return tuple(out)

    def generators_to_basis(self, coeffs: Sequence[int]) -> tuple[int, ...]:
        out = [0] * self.rank
        for c, row in zip(coeffs, self.to_basis):
            if c:
                for j, x in enumerate(row):
                    out[j] += c * x
        return tuple(out)

    def evaluated_basis_matrix(self) -> list[list[Fraction]]:
        """Rows = ambient coordinates, columns = evaluated basis vectors."""
        cols = [evaluate_vector(h) for h in self.basis]
        return [[col[j] for col in cols] for j in range(self.ambient)]

    def truncate(self, n: int) -> "FgGroup":
        """The image of G under projection to the first ``n`` coordinates.

        Generators of the result are the truncated abstract basis vectors of G,
        so generator coordinates of the truncation are abstract coordinates of G.
        """
        return FgGroup([h[:n] + (ZERO,) * max(0, n - len(h)) for h in self.basis], ambient=n)


def member(G: FgGroup, v: Vector) -> Membership:
    """Decide ``v in G``; the witness is an integer combination of the generators."""
    c = G.coordinates(v)
    if c is None:
        return Membership(False, None)
    return Membership(True, G.basis_to_generators(c))


def independence_check(G: FgGroup, allow_nonlinear: bool = False) -> bool:
    """True iff the flattened generators are Q-linearly independent."""
    rows, _ = flatten(G, allow_nonlinear=allow_nonlinear)
    return linalg.rank(rows) == len(rows) if rows else True


def enumerate_ball(G: FgGroup, K: int, eps, cap: int = DEFAULT_CAP) -> list[tuple[Vector, tuple[int, ...]]]:
    """Elements sum x_i h_i with all |x_i| <= K and sup norm < eps.

    The search is complete within the box; results come in lexicographic
    order of the abstract coefficients.
    """
    if K < 0:
        raise ValueError("K must be non-negative")
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    hits = box_search(G.evaluated_basis_matrix(), K, eps, cap=cap)
    return [(G.element(x), x) for x in hits]


@dataclass
class StreamedGroup:
    """A countable group given by an enumeration n -> g_n (ambient R^m).

    Only finite prefixes are ever inspected; ``prefix(n)`` is the finitely
    generated group spanned by g_0, ..., g_{n-1}.
    """

    ambient: int
    enumerate: Callable[[int], Vector]
    support: int | None = None

    @classmethod
    def round_robin(cls, generators: Sequence[Vector], ambient: int | None = None, support: int | None = None):
        gens = [vector(g) for g in generators]
        if not gens:
            raise ValueError("round-robin enumeration needs at least one generator")
        return cls(ambient if ambient is not None else len(gens[0]), lambda n: gens[n % len(gens)], support)

    def element(self, n: int) -> Vector:
        return vector(self.enumerate(n))

    def prefix(self, n: int) -> FgGroup:
        return FgGroup([self.element(i) for i in range(n)], ambient=self.ambient)

    def take(self, n: int) -> list[Vector]:
        return [self.element(i) for i in itertools.islice(itertools.count(), n)]
