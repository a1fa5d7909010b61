"""Exact linear algebra over ``Fraction``."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


class SingularSystemError(ArithmeticError):
    pass


def solve(a: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> list[Fraction]:
    """Solve ``a x = b`` by Gauss-Jordan elimination in exact arithmetic."""
    n = len(b)
    m = [[Fraction(x) for x in row] + [Fraction(rhs)] for row, rhs in zip(a, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            raise SingularSystemError(f"singular system (column {col})")
        m[col], m[piv] = m[piv], m[col]
        prow = m[col]
        inv = 1 / prow[col]
        if inv != 1:
            for j in range(col, n + 1):
                prow[j] *= inv
        for r in range(n):
            if r == col:
                continue
            f = m[r][col]
            if f == 0:
                continue
            row = m[r]
            for j in range(col, n + 1):
                if prow[j] != 0:
                    row[j] -= f * prow[j]
    return [m[i][n] for i in range(n)]


def solve_sparse(n: int, rows: list[dict[int, Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Same as :func:`solve` with rows given as ``{column: coefficient}``."""
    dense = [[row.get(j, Fraction(0)) for j in range(n)] for row in rows]
    return solve(dense, rhs)
