"""Exact integer matrix routines on unbounded Python ints.

numpy is the interchange format but all arithmetic here is fraction-free
integer arithmetic, so definiteness tests and invariant factors are exact.
"""

from __future__ import annotations

import numpy as np


def _as_rows(matrix) -> list[list[int]]:
    arr = np.asarray(matrix)
    if arr.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    return [[int(v) for v in row] for row in arr.tolist()]


def det(matrix) -> int:
    """Determinant by fraction-free (Bareiss) elimination."""
    rows = _as_rows(matrix)
    n = len(rows)
    if n == 0:
        return 1
    if any(len(r) != n for r in rows):
        raise ValueError("determinant of a non-square matrix")
    sign = 1
    prev = 1
    for k in range(n - 1):
        if rows[k][k] == 0:
            for i in range(k + 1, n):
                if rows[i][k] != 0:
                    rows[k], rows[i] = rows[i], rows[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = rows[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                rows[i][j] = (rows[i][j] * pivot - rows[i][k] * rows[k][j]) // prev
            rows[i][k] = 0
        prev = pivot
    return sign * rows[n - 1][n - 1]


def leading_principal_minors(matrix) -> list[int]:
    rows = _as_rows(matrix)
    n = len(rows)
    return [det([r[: k + 1] for r in rows[: k + 1]]) for k in range(1, n + 1)]


def is_negative_definite(matrix) -> bool:
    """Exact test via alternating signs of leading principal minors."""
    minors = leading_principal_minors(matrix)
    return all(m * (-1) ** (k + 1) > 0 for k, m in enumerate(minors))


def smith_invariant_factors(matrix) -> list[int]:
    """Nonzero invariant factors d1 | d2 | ... of an integer matrix.

    Classic pivot-and-reduce Smith normal form; entries stay exact.
    Returns the positive diagonal entries (rank many of them).
    """
    rows = _as_rows(matrix)
    if not rows or not rows[0]:
        return []
    m, n = len(rows), len(rows[0])
    a = rows
    factors = []
    top = 0
    while True:
        pivot = None
        best = None
        for i in range(top, m):
            for j in range(top, n):
                v = abs(a[i][j])
                if v and (best is None or v < best):
                    best = v
                    pivot = (i, j)
        if pivot is None:
            break
        pi, pj = pivot
        a[top], a[pi] = a[pi], a[top]
        for row in a:
            row[top], row[pj] = row[pj], row[top]
        while True:
            p = a[top][top]
            dirty = False
            for i in range(top + 1, m):
                q = a[i][top] // p
                if q:
                    for j in range(top, n):
                        a[i][j] -= q * a[top][j]
                if a[i][top]:
                    a[top], a[i] = a[i], a[top]
                    dirty = True
                    break
            if dirty:
                continue
            for j in range(top + 1, n):
                q = a[top][j] // p
                if q:
                    for i in range(top, m):
                        a[i][j] -= q * a[i][top]
                if a[top][j]:
                    for row in a:
                        row[top], row[j] = row[j], row[top]
                    dirty = True
                    break
            if not dirty:
                break
        # pivot now divides nothing in its row/column; enforce divisibility
        # against the remaining block so factors come out in divisor order.
        p = abs(a[top][top])
        fixed = False
        for i in range(top + 1, m):
            for j in range(top + 1, n):
                if a[i][j] % p:
                    for jj in range(top, n):
                        a[top][jj] += a[i][jj]
                    fixed = True
                    break
            if fixed:
                break
        if fixed:
            continue
        factors.append(p)
        top += 1
        if top == m or top == n:
            break
    return factors
