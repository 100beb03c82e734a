"""Integer points of a coefficient box inside a sup-norm ball.

Finds every ``x`` in ``[-K, K]^r`` with ``max_j |(A x - y)_j| < eps`` for a
rational matrix ``A``.  A maximal invertible block of ``A`` pins the pivot
variables to a small interval once the free variables are fixed, so only the
free variables are enumerated.  Pruning runs in int64 fixed point with an
explicit rounding margin; every survivor is re-checked with exact rationals,
so the result is exact.
"""

from __future__ import annotations

from fractions import Fraction
import itertools
from math import ceil, lcm
from typing import Sequence

import numpy as np

from .errors import BudgetExceeded
from .linalg import rref, solve, transpose

DEFAULT_CAP = 10**7


def _fixed(values, shift: int) -> np.ndarray:
    scale = 1 << shift
    return np.array([round(Fraction(v) * scale) for v in values], dtype=np.int64)


def _shift_for(bound: Fraction, terms: int) -> int:
    # keep |value| * 2^shift below 2^61 with room for `terms` additions
    need = max(1, int(ceil(bound)) + 1).bit_length() + max(1, terms).bit_length()
    return max(0, min(60, 61 - need))


def _pivot_block(A: list[list[Fraction]], r: int):
    """Row and column indices of a maximal invertible submatrix of A."""
    if not A or r == 0:
        return [], []
    _, cols, rk = rref(A)
    if rk == 0:
        return [], []
    sub = [[A[i][c] for c in cols] for i in range(len(A))]
    _, rows, _ = rref(transpose(sub, len(cols)))
    return rows, cols


def box_search(
    A: Sequence[Sequence[Fraction]],
    K: int,
    eps: Fraction,
    target: Sequence[Fraction] | None = None,
    cap: int = DEFAULT_CAP,
) -> list[tuple[int, ...]]:
    """All coefficient vectors in the box with ``||A x - target||_inf < eps``.

    ``A`` has one row per ambient coordinate and one column per basis vector.
    Results are sorted lexicographically.
    """
    A = [[Fraction(x) for x in row] for row in A]
    m = len(A)
    r = len(A[0]) if A else 0
    eps = Fraction(eps)
    y = [Fraction(t) for t in target] if target is not None else [Fraction(0)] * m
    if K < 0 or eps <= 0:
        return []
    if r == 0:
        return [()] if all(abs(t) < eps for t in y) else []

    rows, piv = _pivot_block(A, r)
    free = [c for c in range(r) if c not in piv]
    grid_size = (2 * K + 1) ** len(free)
    if grid_size > cap:
        raise BudgetExceeded(f"box search would visit {grid_size} points (cap {cap})", reached=K)

    rho = len(piv)
    if rho:
        block = [[A[i][c] for c in piv] for i in rows]
        inv_cols = [solve(block, [Fraction(int(i == j)) for i in range(rho)]) for j in range(rho)]
        Minv = transpose(inv_cols, rho)
        C = [[-sum((Minv[i][k] * A[rows[k]][f] for k in range(rho)), Fraction(0)) for f in free] for i in range(rho)]
        d = [sum((Minv[i][k] * y[rows[k]] for k in range(rho)), Fraction(0)) for i in range(rho)]
        rad = [eps * sum((abs(x) for x in Minv[i]), Fraction(0)) for i in range(rho)]
    else:
        C, d, rad = [], [], []

    if free:
        axes = [np.arange(-K, K + 1, dtype=np.int64)] * len(free)
        XF = np.stack([a.ravel() for a in np.meshgrid(*axes, indexing="ij")], axis=1)
    else:
        XF = np.zeros((1, 0), dtype=np.int64)

    if rho:
        bound = max(abs(d[i]) + rad[i] + K * sum((abs(x) for x in C[i]), Fraction(0)) for i in range(rho))
        S = _shift_for(bound, len(free) + 2)
        unit = 1 << S
        err = len(free) * K // 2 + 3
        lo_cols, cnt_cols = [], []
        for i in range(rho):
            Ci = _fixed(C[i], S)
            center = XF @ Ci if free else np.zeros(len(XF), dtype=np.int64)
            center = center + round(d[i] * unit)
            rfix = int(ceil(rad[i] * unit)) + err
            lo = -((-(center - rfix)) // unit)
            hi = (center + rfix) // unit
            lo = np.maximum(lo, -K)
            hi = np.minimum(hi, K)
            lo_cols.append(lo)
            cnt_cols.append(np.maximum(hi - lo + 1, 0))
        LO = np.stack(lo_cols, axis=1)
        CNT = np.stack(cnt_cols, axis=1)
        keep = np.all(CNT > 0, axis=1)
        XF, LO, CNT = XF[keep], LO[keep], CNT[keep]
        total = int(np.prod(CNT, axis=1, dtype=np.int64).sum()) if len(CNT) else 0
        if total > cap:
            raise BudgetExceeded(f"box search would check {total} candidates (cap {cap})", reached=K)
        # expand the product of pivot intervals one pivot at a time
        X = np.zeros((len(XF), r), dtype=np.int64)
        if free:
            X[:, free] = XF
        for i, c in enumerate(piv):
            reps = CNT[:, i]
            idx = np.repeat(np.arange(len(X)), reps)
            starts = np.cumsum(reps) - reps
            offs = np.arange(int(reps.sum()), dtype=np.int64) - np.repeat(starts, reps)
            X = X[idx]
            LO = LO[idx]
            CNT = CNT[idx]
            X[:, c] = LO[:, i] + offs
    else:
        X = np.zeros((len(XF), r), dtype=np.int64)
        X[:, free] = XF

    if len(X) == 0:
        return []

    # fixed-point prefilter on every coordinate, then exact confirmation
    bound = max(abs(y[j]) + K * sum((abs(a) for a in A[j]), Fraction(0)) for j in range(m)) if m else Fraction(0)
    S = _shift_for(bound + eps, r + 2)
    unit = 1 << S
    err = r * K // 2 + 3
    efix = int(ceil(eps * unit)) + err
    keep = np.ones(len(X), dtype=bool)
    for j in range(m):
        vals = X @ _fixed(A[j], S) - round(y[j] * unit)
        keep &= np.abs(vals) < efix
    # exact check in integers: scale each row by a common denominator
    Xk = X[keep].astype(object)
    ok = np.ones(len(Xk), dtype=bool)
    for j in range(m):
        D = lcm(eps.denominator, y[j].denominator, *(a.denominator for a in A[j]))
        col = np.array([int(a * D) for a in A[j]], dtype=object)
        vals = (Xk.dot(col) if len(Xk) else np.zeros(0, dtype=object)) - int(y[j] * D)
        lim = int(eps * D)
        ok &= np.array([abs(v) < lim for v in vals], dtype=bool)
    out = [tuple(int(v) for v in row) for row in X[keep][ok].tolist()]
    out.sort()
    return out


def integer_points_in_kernel(E: Sequence[Sequence[Fraction]], r: int, K: int, cap: int = DEFAULT_CAP) -> list[tuple[int, ...]]:
    """All x in ``[-K, K]^r`` with ``E x = 0`` for a rational matrix ``E``.

    Enumerates the free variables of the reduced system and solves for the
    pivot variables, keeping integral in-box solutions.
    """
    if not E:
        free, R, pivots = list(range(r)), [], []
    else:
        R, pivots, _ = rref([[Fraction(x) for x in row] for row in E])
        free = [c for c in range(r) if c not in pivots]
    if (2 * K + 1) ** len(free) > cap:
        raise BudgetExceeded(f"kernel enumeration would visit {(2 * K + 1) ** len(free)} points", reached=K)
    out = []
    axes = [range(-K, K + 1)] * len(free)
    for vals in itertools.product(*axes):
        x = [0] * r
        for f, v in zip(free, vals):
            x[f] = v
        ok = True
        for i, p in enumerate(pivots):
            v = -sum((R[i][f] * x[f] for f in free if x[f]), Fraction(0))
            if v.denominator != 1 or abs(v) > K:
                ok = False
                break
            x[p] = int(v)
        if ok:
            out.append(tuple(x))
    out.sort()
    return out

