"""Exact rational linear algebra used by the polytope instance.

Everything here works on lists of :class:`fractions.Fraction` (ints are
accepted and promoted). No floating point is involved anywhere.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Matrix = list[list[Fraction]]


def _as_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]


def rref(rows: Sequence[Sequence]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and the list of pivot columns."""
    m = _as_matrix(rows)
    if not m:
        return m, []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == len(m):
            break
        pr = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        piv = m[r][c]
        if piv != 1:
            m[r] = [x / piv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence], ncols: int | None = None) -> Matrix:
    """Basis of ``{x : A x = 0}``."""
    if not rows:
        if ncols is None:
            raise ValueError("ncols required for an empty matrix")
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    m, pivots = rref(rows)
    n = len(m[0])
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -m[i][f]
        basis.append(v)
    return basis


def solve_unique(A: Sequence[Sequence], b: Sequence) -> list[Fraction] | None:
    """The unique solution of ``A x = b``, or None if there is none or many."""
    if not A:
        return None
    n = len(A[0])
    aug = [list(row) + [rhs] for row, rhs in zip(A, b)]
    m, pivots = rref(aug)
    if n in pivots:
        return None  # inconsistent
    if len(pivots) < n:
        return None  # underdetermined
    x = [Fraction(0)] * n
    for i, p in enumerate(pivots):
        x[p] = m[i][n]
    return x


def dot(u: Sequence, v: Sequence) -> Fraction:
    return sum((Fraction(a) * b for a, b in zip(u, v)), Fraction(0))


def feasible_nonneg(A: Sequence[Sequence], b: Sequence) -> list[Fraction] | None:
    """Find ``x >= 0`` with ``A x = b`` by phase-one simplex, or None.

    Bland's rule keeps the exact tableau from cycling.
    """
    A = _as_matrix(A)
    b = [Fraction(x) for x in b]
    m = len(A)
    if m == 0:
        return []
    n = len(A[0])
    for i in range(m):
        if b[i] < 0:
            A[i] = [-x for x in A[i]]
            b[i] = -b[i]
    # columns: n originals, m artificials
    T = [A[i] + [Fraction(int(i == j)) for j in range(m)] + [b[i]] for i in range(m)]
    basis = [n + i for i in range(m)]
    width = n + m
    # cost row for sum of artificials, expressed in non-basic terms
    cost = [Fraction(0)] * (width + 1)
    for i in range(m):
        for j in range(n):
            cost[j] -= T[i][j]
        cost[width] -= T[i][width]
    while True:
        enter = next((j for j in range(width) if cost[j] < 0), None)
        if enter is None:
            break
        best = None
        for i in range(m):
            if T[i][enter] > 0:
                ratio = T[i][width] / T[i][enter]
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            break  # unbounded; cannot happen for phase one
        r = best[1]
        piv = T[r][enter]
        T[r] = [x / piv for x in T[r]]
        for i in range(m):
            if i != r and T[i][enter] != 0:
                f = T[i][enter]
                T[i] = [a - f * c for a, c in zip(T[i], T[r])]
        f = cost[enter]
        cost = [a - f * c for a, c in zip(cost, T[r])]
        basis[r] = enter
    if cost[width] != 0:
        return None
    x = [Fraction(0)] * n
    for i, j in enumerate(basis):
        if j < n:
            x[j] = T[i][width]
        elif T[i][width] != 0:
            return None
    return x


def in_convex_hull(p: Sequence, points: Sequence[Sequence]) -> bool:
    """Whether ``p`` is a convex combination of ``points``."""
    if not points:
        return False
    d = len(p)
    A = [[Fraction(q[i]) for q in points] for i in range(d)]
    A.append([Fraction(1)] * len(points))
    b = [Fraction(x) for x in p] + [Fraction(1)]
    return feasible_nonneg(A, b) is not None
