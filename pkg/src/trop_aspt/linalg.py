"""Exact linear algebra over the rationals.

Rows are kept integral throughout elimination (each row is rescaled by the
gcd of its entries after every update), so no ``Fraction`` arithmetic is
needed until solutions are read off.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterable, Sequence

Number = int | Fraction


def integral_row(row: Iterable[Number]) -> list[int]:
    """Scale a rational row to a primitive integer row with the same span."""
    row = [Fraction(x) for x in row]
    den = reduce(lcm, (x.denominator for x in row), 1)
    ints = [int(x * den) for x in row]
    g = reduce(gcd, ints, 0)
    if g > 1:
        ints = [x // g for x in ints]
    return ints


def _primitive(row: list[int]) -> list[int]:
    g = reduce(gcd, row, 0)
    if g > 1:
        return [x // g for x in row]
    return row


def echelon(rows: Sequence[Sequence[Number]]) -> tuple[list[list[int]], list[int]]:
    """Reduced row echelon form, up to positive scaling of each row.

    Returns ``(reduced_rows, pivot_columns)``; only the nonzero rows are kept.
    Every pivot column is zero outside its own row.
    """
    mat = [integral_row(r) for r in rows]
    if not mat:
        return [], []
    ncols = len(mat[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if pr is None:
            continue
        mat[r], mat[pr] = mat[pr], mat[r]
        if mat[r][c] < 0:
            mat[r] = [-x for x in mat[r]]
        prow = mat[r]
        a = prow[c]
        for i in range(len(mat)):
            if i == r:
                continue
            b = mat[i][c]
            if b == 0:
                continue
            mat[i] = _primitive([a * x - b * y for x, y in zip(mat[i], prow)])
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return mat[:r], pivots


def rank(rows: Sequence[Sequence[Number]]) -> int:
    return len(echelon(rows)[1])


def nullspace(rows: Sequence[Sequence[Number]], ncols: int | None = None) -> list[list[int]]:
    """Primitive integer basis of ``{x : rows @ x = 0}``."""
    if ncols is None:
        if not rows:
            raise ValueError("ncols required for an empty matrix")
        ncols = len(rows[0])
    red, pivots = echelon(rows) if rows else ([], [])
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, c in zip(red, pivots):
            x[c] = Fraction(-row[f], row[c])
        basis.append(integral_row(x))
    return basis


def solve(columns: Sequence[Sequence[Number]], target: Sequence[Number]) -> list[Fraction] | None:
    """Coefficients ``c`` with ``sum(c[k] * columns[k]) == target``, or ``None``.

    When the columns are dependent one particular solution (free
    coefficients zero) is returned.
    """
    m = len(target)
    k = len(columns)
    aug = [[columns[j][i] for j in range(k)] + [target[i]] for i in range(m)]
    red, pivots = echelon(aug)
    if pivots and pivots[-1] == k:
        return None
    coef = [Fraction(0)] * k
    for row, c in zip(red, pivots):
        coef[c] = Fraction(row[k], row[c])
    return coef


def in_span(columns: Sequence[Sequence[Number]], target: Sequence[Number]) -> bool:
    return solve(columns, target) is not None


class LeftInverse:
    """Exact left inverse of a full-column-rank matrix given by its columns.

    ``apply(w)`` returns the unique coefficients expressing ``w`` in the
    columns, or ``None`` if ``w`` is outside their span.  Built once per
    cone and reused for every membership query.
    """

    def __init__(self, columns: Sequence[Sequence[Number]]):
        self.columns = [[Fraction(x) for x in col] for col in columns]
        k = len(columns)
        m = len(columns[0]) if columns else 0
        rows_t = [[self.columns[j][i] for j in range(k)] for i in range(m)]
        # choose k independent coordinates, then invert that square block
        chosen: list[int] = []
        basis_rows: list[list[Number]] = []
        for i, row in enumerate(rows_t):
            if rank(basis_rows + [row]) > len(basis_rows):
                basis_rows.append(row)
                chosen.append(i)
            if len(chosen) == k:
                break
        if len(chosen) != k:
            raise ValueError("columns are not linearly independent")
        self.rows = chosen
        self._inv = _inverse([[self.columns[j][i] for j in range(k)] for i in chosen])

    def apply(self, w: Sequence[Number]) -> list[Fraction] | None:
        sub = [Fraction(w[i]) for i in self.rows]
        coef = [sum((a * b for a, b in zip(row, sub)), Fraction(0)) for row in self._inv]
        for i in range(len(w)):
            if sum((c * col[i] for c, col in zip(coef, self.columns)), Fraction(0)) != w[i]:
                return None
        return coef


def _inverse(square: list[list[Number]]) -> list[list[Fraction]]:
    k = len(square)
    aug = [list(square[i]) + [1 if j == i else 0 for j in range(k)] for i in range(k)]
    red, pivots = echelon(aug)
    if pivots != list(range(k)):
        raise ValueError("singular matrix")
    return [[Fraction(red[i][k + j], red[i][i]) for j in range(k)] for i in range(k)]
