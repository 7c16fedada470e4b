"""Exact Gaussian elimination over any field-like scalar (Fraction, CycNum)."""

from __future__ import annotations

from typing import Sequence, TypeVar

S = TypeVar("S")


def rref(rows: Sequence[Sequence[S]], zero: S) -> tuple[list[list[S]], list[int]]:
    """Reduced row echelon form and pivot columns."""
    a = [list(r) for r in rows]
    if not a:
        return a, []
    m, n = len(a), len(a[0])
    pivots: list[int] = []
    i = 0
    for j in range(n):
        p = next((r for r in range(i, m) if a[r][j]), None)
        if p is None:
            continue
        a[i], a[p] = a[p], a[i]
        inv = 1 / a[i][j] if not hasattr(a[i][j], "inverse") else a[i][j].inverse()
        a[i] = [x * inv for x in a[i]]
        for r in range(m):
            if r != i and a[r][j]:
                f = a[r][j]
                a[r] = [x - f * y for x, y in zip(a[r], a[i])]
        pivots.append(j)
        i += 1
        if i == m:
            break
    return a, pivots


def nullspace(rows: Sequence[Sequence[S]], ncols: int, zero: S, one: S) -> list[list[S]]:
    """Kernel basis; vector k has a 1 in the k-th free column and 0 in the others."""
    if not rows:
        return [[one if c == f else zero for c in range(ncols)] for f in range(ncols)]
    r, pivots = rref(rows, zero)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [zero] * ncols
        v[f] = one
        for i, p in enumerate(pivots):
            v[p] = -r[i][f]
        basis.append(v)
    return basis


def det(mat: Sequence[Sequence[S]], zero: S, one: S) -> S:
    a = [list(r) for r in mat]
    n = len(a)
    out = one
    for j in range(n):
        p = next((r for r in range(j, n) if a[r][j]), None)
        if p is None:
            return zero
        if p != j:
            a[j], a[p] = a[p], a[j]
            out = -out
        out = out * a[j][j]
        inv = 1 / a[j][j] if not hasattr(a[j][j], "inverse") else a[j][j].inverse()
        for r in range(j + 1, n):
            if a[r][j]:
                f = a[r][j] * inv
                a[r] = [x - f * y for x, y in zip(a[r], a[j])]
    return out
