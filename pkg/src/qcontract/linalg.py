"""Exact dense linear algebra over a field of Python scalars.

Works with anything that supports ``+ - * /`` and truthiness for zero,
in practice :class:`~qcontract.coeffring.CoeffExpr`.
"""

from __future__ import annotations

from typing import Callable, Sequence


class SingularMatrix(ArithmeticError):
    pass


def rref(rows: list[list], ncols: int | None = None):
    """Reduced row echelon form in place on the first ``ncols`` columns.

    Returns the list of pivot columns.  Pivoting is on the first nonzero
    entry, which is exact and therefore enough.
    """
    if not rows:
        return []
    ncols = len(rows[0]) if ncols is None else ncols
    pivots = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        piv = rows[r][c]
        rows[r] = [x / piv if x else x for x in rows[r]]
        prow = rows[r]
        for i in range(len(rows)):
            if i != r:
                f = rows[i][c]
                if f:
                    rows[i] = [a - f * b if b else a for a, b in zip(rows[i], prow)]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return pivots


def determinant(mat: Sequence[Sequence], one) -> object:
    """Determinant by fraction-field Gaussian elimination."""
    a = [list(row) for row in mat]
    n = len(a)
    det = one
    for c in range(n):
        pr = next((i for i in range(c, n) if a[i][c]), None)
        if pr is None:
            return one - one
        if pr != c:
            a[c], a[pr] = a[pr], a[c]
            det = -det
        piv = a[c][c]
        det = det * piv
        for i in range(c + 1, n):
            f = a[i][c]
            if f:
                f = f / piv
                a[i] = [x - f * y if y else x for x, y in zip(a[i], a[c])]
    return det


def inverse(mat: Sequence[Sequence], one) -> list[list]:
    n = len(mat)
    zero = one - one
    rows = [list(mat[i]) + [one if i == j else zero for j in range(n)] for i in range(n)]
    pivots = rref(rows, n)
    if len(pivots) < n:
        raise SingularMatrix("matrix is singular")
    return [row[n:] for row in rows]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence], zero) -> list[list]:
    out = []
    for row in a:
        res = [zero] * len(b[0])
        for k, x in enumerate(row):
            if x:
                res = [r + x * y if y else r for r, y in zip(res, b[k])]
        out.append(res)
    return out


def matvec(a: Sequence[Sequence], v: Sequence, zero) -> list:
    out = []
    for row in a:
        acc = zero
        for x, y in zip(row, v):
            if x and y:
                acc = acc + x * y
        out.append(acc)
    return out


def mapmat(fn: Callable, mat):
    return [[fn(x) for x in row] for row in mat]
