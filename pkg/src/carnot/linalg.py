"""Exact rational linear algebra on dense list-of-lists matrices.

Entries are ``int`` or :class:`fractions.Fraction`. Rank and echelon forms use
fraction-free (Bareiss) elimination on integer rows obtained by clearing
denominators row by row, which leaves row spaces unchanged.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Sequence

Matrix = list[list[Fraction]]
Vector = list[Fraction]


def zeros(rows: int, cols: int) -> Matrix:
    return [[Fraction(0)] * cols for _ in range(rows)]


def identity(size: int) -> Matrix:
    m = zeros(size, size)
    for i in range(size):
        m[i][i] = Fraction(1)
    return m


def to_fractions(m: Sequence[Sequence]) -> Matrix:
    return [[Fraction(x) for x in row] for row in m]


def transpose(m: Sequence[Sequence], cols: int | None = None) -> Matrix:
    if not m:
        return [[] for _ in range(cols or 0)]
    return [list(col) for col in zip(*m)]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence], inner: int | None = None,
           cols: int | None = None) -> Matrix:
    """Product skipping zero entries; ``inner``/``cols`` disambiguate empty shapes."""
    if cols is None:
        cols = len(b[0]) if b else 0
    out = zeros(len(a), cols)
    b_rows = [[(j, x) for j, x in enumerate(row) if x] for row in b]
    for i, row in enumerate(a):
        acc = out[i]
        for k, x in enumerate(row):
            if not x:
                continue
            for j, y in b_rows[k]:
                acc[j] += x * y
    return out


def matvec(m: Sequence[Sequence], v: Sequence) -> Vector:
    return [sum((x * y for x, y in zip(row, v) if x and y), Fraction(0)) for row in m]


def sub(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def add(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def is_zero(m: Sequence[Sequence]) -> bool:
    return all(not x for row in m for x in row)


def _integer_row(row: Sequence) -> list[int]:
    fr = [Fraction(x) for x in row]
    den = lcm(*(x.denominator for x in fr)) if fr else 1
    return [int(x * den) for x in fr]


def bareiss_echelon(m: Sequence[Sequence]) -> tuple[list[list[int]], list[int]]:
    """Fraction-free row echelon form.

    Returns the integer echelon rows (only the first ``rank`` are meaningful)
    and the pivot column of each of them.
    """
    a = [_integer_row(row) for row in m]
    rows = len(a)
    cols = len(a[0]) if a else 0
    pivots: list[int] = []
    prev = 1
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = next((i for i in range(r, rows) if a[i][c]), None)
        if p is None:
            continue
        if p != r:
            a[r], a[p] = a[p], a[r]
        piv = a[r][c]
        for i in range(r + 1, rows):
            ai = a[i]
            f = ai[c]
            ar = a[r]
            for j in range(c + 1, cols):
                # exact division is guaranteed by Sylvester's identity
                ai[j] = (piv * ai[j] - f * ar[j]) // prev
            ai[c] = 0
        prev = piv
        pivots.append(c)
        r += 1
    return a[:r], pivots


def rank(m: Sequence[Sequence]) -> int:
    if not m or not m[0]:
        return 0
    return len(bareiss_echelon(m)[1])


def rref(m: Sequence[Sequence]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form (nonzero rows only) and pivot columns."""
    ech, pivots = bareiss_echelon(m)
    rows = [[Fraction(x) for x in row] for row in ech]
    for r, c in enumerate(pivots):
        piv = rows[r][c]
        rows[r] = [x / piv for x in rows[r]]
    for r in range(len(pivots) - 1, -1, -1):
        c = pivots[r]
        pr = rows[r]
        for i in range(r):
            f = rows[i][c]
            if f:
                rows[i] = [x - f * y for x, y in zip(rows[i], pr)]
    return rows, pivots


def nullspace(m: Sequence[Sequence], cols: int) -> list[Vector]:
    """Basis of ``{v : m v = 0}``, one vector per free column."""
    if not m:
        return [[Fraction(int(i == j)) for j in range(cols)] for i in range(cols)]
    rows, pivots = rref(m)
    pivot_set = set(pivots)
    basis = []
    for free in range(cols):
        if free in pivot_set:
            continue
        v = [Fraction(0)] * cols
        v[free] = Fraction(1)
        for r, c in enumerate(pivots):
            v[c] = -rows[r][free]
        basis.append(v)
    return basis


def canonical_basis(vectors: Sequence[Sequence], dim: int) -> list[Vector]:
    """Canonical basis of a span: reduced echelon rows, pivot-first order."""
    if not vectors:
        return []
    rows, _ = rref(vectors)
    return rows


def column_basis(m: Sequence[Sequence], cols: int) -> list[Vector]:
    """Pivot columns of ``m`` (as vectors): a basis of its image."""
    if not m or not cols:
        return []
    _, pivots = bareiss_echelon(m)
    return [[row[c] for row in m] for c in pivots]


def columns_to_matrix(vectors: Sequence[Sequence], dim: int) -> Matrix:
    """Matrix whose columns are the given vectors."""
    return [[Fraction(v[i]) for v in vectors] for i in range(dim)]


def inverse(m: Sequence[Sequence]) -> Matrix:
    size = len(m)
    aug = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(size)]
           for i, row in enumerate(m)]
    rows, pivots = rref(aug)
    if pivots[:size] != list(range(size)) or len(pivots) < size:
        raise ZeroDivisionError("matrix is singular")
    return [row[size:] for row in rows[:size]]


def pseudo_inverse(m: Sequence[Sequence], cols: int) -> Matrix:
    """Moore-Penrose inverse from a full-rank factorization ``m = C R``."""
    rows_n = len(m)
    if not rows_n or not cols:
        return zeros(cols, rows_n)
    red, pivots = rref(m)
    if not pivots:
        return zeros(cols, rows_n)
    c = [[Fraction(m[i][p]) for p in pivots] for i in range(rows_n)]
    r = red
    ct = transpose(c)
    rt = transpose(r)
    ctc_inv = inverse(matmul(ct, c))
    rrt_inv = inverse(matmul(r, rt))
    return matmul(matmul(rt, rrt_inv), matmul(ctc_inv, ct))


def same_span(u: Sequence[Sequence], v: Sequence[Sequence]) -> bool:
    ru = rank(u) if u else 0
    rv = rank(v) if v else 0
    if ru != rv:
        return False
    if not ru:
        return True
    return rank(list(u) + list(v)) == ru
