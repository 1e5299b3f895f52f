"""Exact linear algebra over Q on plain list-of-list matrices.

Matrices are lists of rows of ``Fraction``.  Everything is deterministic:
pivots are chosen as the first nonzero entry in column order, so repeated
runs on equal input produce identical output.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

Q = Fraction
Matrix = List[List[Fraction]]
Vector = List[Fraction]


def zeros(rows: int, cols: int) -> Matrix:
    return [[Q(0)] * cols for _ in range(rows)]


def identity(n: int) -> Matrix:
    m = zeros(n, n)
    for i in range(n):
        m[i][i] = Q(1)
    return m


def mat_vec(m: Matrix, v: Sequence[Fraction]) -> Vector:
    return [sum((row[j] * v[j] for j in range(len(v))), Q(0)) for row in m]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    if a and b and len(a[0]) != len(b):
        raise ValueError("inner dimensions differ")
    cols = len(b[0]) if b else 0
    out = zeros(len(a), cols)
    for i, row in enumerate(a):
        for k, aik in enumerate(row):
            if aik == 0:
                continue
            brow = b[k]
            orow = out[i]
            for j in range(cols):
                if brow[j] != 0:
                    orow[j] += aik * brow[j]
    return out


def transpose(m: Matrix) -> Matrix:
    if not m:
        return []
    return [list(col) for col in zip(*m)]


def rref(m: Matrix) -> Tuple[Matrix, List[int]]:
    """Reduced row echelon form (copy) and its pivot column indices."""
    a = [list(row) for row in m]
    pivots: List[int] = []
    r = 0
    rows = len(a)
    cols = len(a[0]) if rows else 0
    for c in range(cols):
        pivot_row = None
        for i in range(r, rows):
            if a[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        a[r], a[pivot_row] = a[pivot_row], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return a, pivots


def rank(m: Matrix) -> int:
    """Exact rank by fraction-free integer elimination.

    Rows are scaled to integers first; the Bareiss update keeps every
    intermediate entry an exact minor, so all divisions are exact and no
    Fraction normalization happens in the inner loop.
    """
    if not m or not m[0]:
        return 0
    rows = []
    for row in m:
        den = math.lcm(*(Fraction(x).denominator for x in row))
        rows.append([int(x * den) for x in row])
    nr, nc = len(rows), len(rows[0])
    r = 0
    prev = 1
    for c in range(nc):
        if r == nr:
            break
        piv = next((i for i in range(r, nr) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pv = rows[r][c]
        top = rows[r]
        for i in range(r + 1, nr):
            cur = rows[i]
            f = cur[c]
            for k in range(c, nc):
                cur[k] = (pv * cur[k] - f * top[k]) // prev
        prev = pv
        r += 1
    return r


def nullspace(m: Matrix, cols: Optional[int] = None) -> List[Vector]:
    """Basis of the right kernel, one vector per free column, in column order.

    Each basis vector has a 1 in its free column and zeros in the other
    free columns; this is the canonical rref-based basis.
    """
    if cols is None:
        cols = len(m[0]) if m else 0
    if not m or cols == 0:
        return [] if cols == 0 else [
            [Q(1) if j == i else Q(0) for j in range(cols)] for i in range(cols)
        ]
    a, pivots = rref(m)
    pivot_set = set(pivots)
    basis = []
    for free in range(cols):
        if free in pivot_set:
            continue
        v = [Q(0)] * cols
        v[free] = Q(1)
        for r, pc in enumerate(pivots):
            v[pc] = -a[r][free]
        basis.append(v)
    return basis


def solve(m: Matrix, b: Sequence[Fraction]) -> Optional[Vector]:
    """One solution of m x = b, or None when inconsistent.

    Free variables are set to zero, so the answer is deterministic.
    """
    res = solve_or_refute(m, b)
    return res[0]


def solve_or_refute(
    m: Matrix, b: Sequence[Fraction]
) -> Tuple[Optional[Vector], Optional[Vector]]:
    """Solve m x = b exactly, or produce a left-kernel refutation.

    Returns ``(x, None)`` on success.  On inconsistency returns
    ``(None, y)`` with y^T m = 0 and y^T b != 0, a checkable certificate
    that no solution exists.  Eliminates on [m | I | b] so the witness
    falls out of the same pass.
    """
    rows = len(m)
    cols = len(m[0]) if rows else 0
    if len(b) != rows:
        raise ValueError("right-hand side length mismatch")
    if rows == 0:
        return [Q(0)] * cols, None
    aug = [list(m[i]) + [Q(1) if j == i else Q(0) for j in range(rows)] + [Q(b[i])]
           for i in range(rows)]
    r = 0
    pivots: List[int] = []
    for c in range(cols):
        pivot_row = None
        for i in range(r, rows):
            if aug[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        aug[r], aug[pivot_row] = aug[pivot_row], aug[r]
        inv = 1 / aug[r][c]
        aug[r] = [x * inv for x in aug[r]]
        for i in range(rows):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    for i in range(r, rows):
        if aug[i][-1] != 0:
            y = aug[i][cols:cols + rows]
            return None, y
    x = [Q(0)] * cols
    for row_idx, pc in enumerate(pivots):
        x[pc] = aug[row_idx][-1]
    return x, None


class EchelonBasis:
    """Incrementally maintained echelon basis for span membership tests.

    ``add`` reduces a vector against the current basis; a nonzero residue
    extends the basis.  ``contains`` and ``reduce`` never mutate state.
    """

    def __init__(self, dimension: int):
        self.dimension = dimension
        self.rows: List[Vector] = []
        self.pivot_cols: List[int] = []

    def __len__(self) -> int:
        return len(self.rows)

    def _reduce(self, v: Sequence[Fraction]) -> Vector:
        w = list(v)
        for row, pc in zip(self.rows, self.pivot_cols):
            if w[pc] != 0:
                f = w[pc]
                w = [x - f * y for x, y in zip(w, row)]
        return w

    def reduce(self, v: Sequence[Fraction]) -> Vector:
        if len(v) != self.dimension:
            raise ValueError("vector dimension mismatch")
        return self._reduce(v)

    def contains(self, v: Sequence[Fraction]) -> bool:
        return all(x == 0 for x in self.reduce(v))

    def add(self, v: Sequence[Fraction]) -> bool:
        """Insert v; True when it enlarged the span."""
        w = self.reduce(v)
        for c, x in enumerate(w):
            if x != 0:
                w = [y / x for y in w]
                # keep rows ordered by pivot column for readable dumps
                idx = 0
                while idx < len(self.pivot_cols) and self.pivot_cols[idx] < c:
                    idx += 1
                self.rows.insert(idx, w)
                self.pivot_cols.insert(idx, c)
                return True
        return False
