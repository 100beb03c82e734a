"""Exact linear algebra.

Field routines (``rref``, ``kernel``, ``solve``) work on dense row-major
lists whose entries are Fractions or ExactScalars; zero is tested with
``bool(entry)``, which is symbolic for ExactScalar.  Integer routines use
Python ints throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

Matrix = list  # list of rows


def _copy(M):
    return [list(row) for row in M]


def identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(M, ncols: int | None = None):
    if not M:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*M)]


def matmul(A, B):
    if not A:
        return []
    Bt = transpose(B, len(B[0]) if B else 0)
    return [[sum((a * b for a, b in zip(row, col)), 0 * row[0] if row else 0) for col in Bt] for row in A]


def matvec(A, v):
    return [sum((a * x for a, x in zip(row, v)), 0) for row in A]


# -- field-level ----------------------------------------------------------------

def rref(M: Sequence[Sequence]) -> tuple[list[list], list[int], int]:
    """Reduced row echelon form; pivots are the first symbolically nonzero entries."""
    A = _copy(M)
    nrows = len(A)
    ncols = len(A[0]) if A else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if A[i][c]), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        piv = A[r][c]
        if piv != 1:
            A[r] = [x / piv for x in A[r]]
        for i in range(nrows):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
    return A, pivots, r


def rank(M) -> int:
    return rref(M)[2] if M else 0


def kernel(M: Sequence[Sequence], ncols: int | None = None) -> list[list]:
    """Basis of the right kernel {x : M x = 0}, one vector per free column."""
    if not M:
        n = ncols or 0
        return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    R, pivots, _ = rref(M)
    n = len(M[0])
    zero = R[0][0] * 0 if R and R[0] else Fraction(0)
    one = zero + 1
    basis = []
    free = [c for c in range(n) if c not in pivots]
    for f in free:
        v = [zero] * n
        v[f] = one
        for i, p in enumerate(pivots):
            v[p] = -R[i][f]
        basis.append(v)
    return basis


def solve(M: Sequence[Sequence], b: Sequence):
    """One solution x of M x = b (free variables set to 0), or None."""
    if not M:
        return None if any(b) else []
    n = len(M[0])
    aug = [list(row) + [bi] for row, bi in zip(M, b)]
    R, pivots, rk = rref(aug)
    if pivots and pivots[-1] == n:
        return None
    zero = 0 * R[0][0]
    x = [zero] * n
    for i, p in enumerate(pivots):
        x[p] = R[i][n]
    return x


def left_solve(rows: Sequence[Sequence], v: Sequence):
    """Coefficients y with sum_i y_i rows[i] = v, or None."""
    if not rows:
        return [] if not any(v) else None
    return solve(transpose(rows), v)


# -- integer lattices ------------------------------------------------------------

def _row_sub(A, i, j, q):
    if q:
        A[i] = [x - q * y for x, y in zip(A[i], A[j])]


def hnf_with_transform(M: Sequence[Sequence[int]]):
    """Row Hermite normal form.

    Returns ``(H, U, pivots)`` with ``U`` unimodular and ``U M = H``.  The first
    ``len(pivots)`` rows of ``H`` are the basis (positive pivots, entries above
    each pivot reduced into ``[0, pivot)``); the remaining rows are zero and the
    matching rows of ``U`` span the integer left kernel of ``M``.
    """
    A = [[int(x) for x in row] for row in M]
    n = len(A)
    m = len(A[0]) if A else 0
    U = identity(n)
    pivots: list[int] = []
    r = 0
    for c in range(m):
        if r == n:
            break
        while True:
            nz = [i for i in range(r, n) if A[i][c]]
            if not nz:
                break
            p = min(nz, key=lambda i: (abs(A[i][c]), i))
            A[r], A[p] = A[p], A[r]
            U[r], U[p] = U[p], U[r]
            clean = True
            for i in range(r + 1, n):
                if A[i][c]:
                    q = A[i][c] // A[r][c]
                    _row_sub(A, i, r, q)
                    _row_sub(U, i, r, q)
                    if A[i][c]:
                        clean = False
            if clean:
                break
        if not A[r][c]:
            continue
        if A[r][c] < 0:
            A[r] = [-x for x in A[r]]
            U[r] = [-x for x in U[r]]
        for i in range(r):
            q = A[i][c] // A[r][c]
            _row_sub(A, i, r, q)
            _row_sub(U, i, r, q)
        pivots.append(c)
        r += 1
    return A, U, pivots


@dataclass(frozen=True)
class ZLattice:
    """Integer lattice given by a basis in row Hermite normal form."""

    basis: tuple[tuple[int, ...], ...]
    ambient: int

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def pivots(self) -> tuple[int, ...]:
        return tuple(next(j for j, x in enumerate(row) if x) for row in self.basis)


def hnf(M: Sequence[Sequence[int]], ambient: int | None = None) -> ZLattice:
    if ambient is None:
        ambient = len(M[0]) if M else 0
    if not M:
        return ZLattice((), ambient)
    H, _, pivots = hnf_with_transform(M)
    return ZLattice(tuple(tuple(row) for row in H[: len(pivots)]), ambient)


def lattice_member(L: ZLattice, v: Sequence[int]):
    """Integer coordinates of ``v`` on the HNF basis of ``L``, or None."""
    rest = [int(x) for x in v]
    if len(rest) != L.ambient:
        raise ValueError("dimension mismatch")
    coeffs = []
    for row, p in zip(L.basis, L.pivots):
        if any(rest[:p]):
            return None
        q, rem = divmod(rest[p], row[p])
        if rem:
            return None
        coeffs.append(q)
        if q:
            rest = [x - q * y for x, y in zip(rest, row)]
    if any(rest):
        return None
    return tuple(coeffs)


def snf(M: Sequence[Sequence[int]]):
    """Smith normal form ``(D, U, V)`` with ``U M V = D`` and d1 | d2 | ...."""
    D = [[int(x) for x in row] for row in M]
    n = len(D)
    m = len(D[0]) if D else 0
    U = identity(n)
    V = identity(m)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def col_sub(i, j, q):  # col_i -= q col_j
        for row in D:
            row[i] -= q * row[j]
        for row in V:
            row[i] -= q * row[j]

    t = 0
    while t < min(n, m):
        entries = [(abs(D[i][j]), i, j) for i in range(t, n) for j in range(t, m) if D[i][j]]
        if not entries:
            break
        _, i0, j0 = min(entries)
        swap_rows(t, i0)
        swap_cols(t, j0)
        while True:
            piv = D[t][t]
            for i in range(t + 1, n):
                if D[i][t]:
                    q = D[i][t] // piv
                    _row_sub(D, i, t, q)
                    _row_sub(U, i, t, q)
            for j in range(t + 1, m):
                if D[t][j]:
                    col_sub(j, t, D[t][j] // piv)
            rest = [(abs(D[i][t]), i, t) for i in range(t + 1, n) if D[i][t]]
            rest += [(abs(D[t][j]), t, j) for j in range(t + 1, m) if D[t][j]]
            if rest:
                _, i1, j1 = min(rest)
                swap_rows(t, i1)
                swap_cols(t, j1)
                continue
            bad = next(((i, j) for i in range(t + 1, n) for j in range(t + 1, m) if D[i][j] % piv), None)
            if bad is None:
                break
            D[t] = [x + y for x, y in zip(D[t], D[bad[0]])]
            U[t] = [x + y for x, y in zip(U[t], U[bad[0]])]
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return D, U, V


def determinant(M) -> int | Fraction:
    """Exact determinant by fraction-free Bareiss elimination on a square matrix."""
    A = _copy(M)
    n = len(A)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if not A[k][k]:
            p = next((i for i in range(k + 1, n) if A[i][k]), None)
            if p is None:
                return 0 * A[0][0]
            A[k], A[p] = A[p], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) / prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def integer_row_scale(rows: Sequence[Sequence[Fraction]]) -> tuple[list[list[int]], int]:
    """Scale rational rows by a common denominator ``D``; returns (integer rows, D)."""
    den = 1
    for row in rows:
        for x in row:
            den = den * Fraction(x).denominator // gcd(den, Fraction(x).denominator)
    return [[int(Fraction(x) * den) for x in row] for row in rows], den


def primitive_integer_rows(rows: Sequence[Sequence[Fraction]]) -> list[list[int]]:
    """Scale each rational row separately to a primitive integer row (same Q-span)."""
    out = []
    for row in rows:
        den = 1
        for x in row:
            d = Fraction(x).denominator
            den = den * d // gcd(den, d)
        ints = [int(Fraction(x) * den) for x in row]
        g = 0
        for x in ints:
            g = gcd(g, x)
        out.append([x // g for x in ints] if g > 1 else ints)
    return out


def left_kernel_lattice(M: Sequence[Sequence[int]]) -> ZLattice:
    """Z-basis (HNF) of {y in Z^n : y M = 0} for an integer n x k matrix."""
    n = len(M)
    if n == 0:
        return ZLattice((), 0)
    if not M[0]:
        return hnf(identity(n), n)
    _, U, pivots = hnf_with_transform(M)
    return hnf(U[len(pivots):], n)


def lattice_intersect_subspace(L: ZLattice, equations: Sequence[Sequence[Fraction]]) -> ZLattice:
    """Sublattice ``L ∩ {x : E x = 0}`` in HNF, for a rational matrix ``E``.

    With ``B`` the basis of ``L``, ``x = y B`` lies in the subspace iff
    ``y (B E^T) = 0``; the integer left kernel of ``B E^T`` (scaled to integers)
    gives the coefficient lattice, which is mapped back through ``B``.
    """
    if not equations or not L.basis:
        return L
    B = [list(row) for row in L.basis]
    M = [[sum((b * Fraction(e) for b, e in zip(brow, erow)), Fraction(0)) for erow in equations] for brow in B]
    Mi, _ = integer_row_scale(M)
    Y = left_kernel_lattice(Mi)
    if not Y.basis:
        return ZLattice((), L.ambient)
    rows = [[sum(y * b for y, b in zip(yrow, col)) for col in zip(*B)] for yrow in Y.basis]
    return hnf(rows, L.ambient)


def unimodular_completion(D: Sequence[Sequence[int]], n: int) -> list[list[int]]:
    """Rows completing a saturated sublattice basis ``D`` of Z^n to a basis of Z^n.

    Raises ValueError when ``D`` is not saturated (no completion exists).
    """
    if not D:
        return identity(n)
    Dm, _, V = snf(D)
    k = len(D)
    if any(abs(Dm[i][i]) != 1 for i in range(k)):
        raise ValueError("sublattice is not saturated")
    # U D V = [I 0]  =>  rows of V^{-1} beyond the first k complete the basis
    Vinv = integer_inverse(V)
    return [list(row) for row in Vinv[k:]]


def integer_inverse(M: Sequence[Sequence[int]]) -> list[list[int]]:
    """Inverse of a unimodular integer matrix."""
    n = len(M)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    R, pivots, rk = rref(aug)
    if rk != n or pivots[: n] != list(range(n)):
        raise ValueError("matrix is singular")
    inv = [row[n:] for row in R]
    if any(x.denominator != 1 for row in inv for x in row):
        raise ValueError("matrix is not unimodular")
    return [[int(x) for x in row] for row in inv]


def integer_affine_solution(M: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> list[int] | None:
    """One integer solution of the rational system ``M x = b``, or None."""
    n = len(M[0]) if M else 0
    if not M:
        return [0] * n
    rows = [list(row) + [Fraction(bi)] for row, bi in zip(M, b)]
    ints, _ = integer_row_scale(rows)
    A = [row[:-1] for row in ints]
    rhs = [row[-1] for row in ints]
    D, U, V = snf(A)
    c = matvec(U, rhs)
    y = [0] * n
    for i in range(len(D)):
        d = D[i][i] if i < n else 0
        if d:
            if c[i] % d:
                return None
            y[i] = c[i] // d
        elif c[i]:
            return None
    return matvec(V, y)
