"""Exact feasibility for linear programs over the rationals.

Phase one of the simplex method on a dense ``Fraction`` tableau, with
Bland's rule so that degenerate pivots cannot cycle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

Row = tuple[dict, Fraction]


@dataclass
class LinearProgram:
    """``x >= 0`` with rows ``coeffs . x == rhs`` and ``coeffs . x >= rhs``.

    Coefficients are sparse ``{variable index: value}`` maps.
    """

    n_vars: int
    equalities: list[Row] = field(default_factory=list)
    inequalities: list[Row] = field(default_factory=list)

    def add_eq(self, coeffs: Mapping[int, object], rhs) -> None:
        self.equalities.append(self._row(coeffs, rhs))

    def add_ge(self, coeffs: Mapping[int, object], rhs) -> None:
        self.inequalities.append(self._row(coeffs, rhs))

    def _row(self, coeffs, rhs) -> Row:
        for j in coeffs:
            if not 0 <= j < self.n_vars:
                raise ValueError(f"variable index {j} outside 0..{self.n_vars - 1}")
        return {j: Fraction(c) for j, c in coeffs.items() if c != 0}, Fraction(rhs)

    def satisfied_by(self, x) -> bool:
        if len(x) != self.n_vars or any(v < 0 for v in x):
            return False
        dot = lambda c: sum((v * x[j] for j, v in c.items()), Fraction(0))  # noqa: E731
        return (all(dot(c) == b for c, b in self.equalities)
                and all(dot(c) >= b for c, b in self.inequalities))


def lp_feasible(lp: LinearProgram) -> list[Fraction] | None:
    """An exact feasible point, or ``None`` when the program is infeasible."""
    n = lp.n_vars
    rows: list[tuple[dict, Fraction]] = list(lp.equalities)
    n_slack = len(lp.inequalities)
    for k, (c, b) in enumerate(lp.inequalities):
        c = dict(c)
        c[n + k] = Fraction(-1)  # surplus
        rows.append((c, b))
    width = n + n_slack
    m = len(rows)
    if m == 0:
        return [Fraction(0)] * n

    # tableau columns: structural + surplus, then one artificial per row
    total = width + m
    tab: list[list[Fraction]] = []
    for i, (c, b) in enumerate(rows):
        sign = -1 if b < 0 else 1
        row = [Fraction(0)] * (total + 1)
        for j, v in c.items():
            row[j] = sign * v
        row[width + i] = Fraction(1)
        row[total] = sign * b
        tab.append(row)
    basis = [width + i for i in range(m)]

    # reduced costs of "minimize the sum of artificials"
    cost = [Fraction(0)] * (total + 1)
    for row in tab:
        for j in range(width):
            cost[j] -= row[j]
        cost[total] -= row[total]

    while True:
        enter = next((j for j in range(total) if cost[j] < 0), None)
        if enter is None:
            break
        best = None
        for i in range(m):
            a = tab[i][enter]
            if a > 0:
                ratio = tab[i][total] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:  # cannot happen: the phase-one objective is bounded below
            raise ArithmeticError("unbounded phase-one program")
        _pivot(tab, cost, best[1], enter)
        basis[best[1]] = enter

    if cost[total] != 0:
        return None
    x = [Fraction(0)] * total
    for i, j in enumerate(basis):
        x[j] = tab[i][total]
    point = x[:n]
    assert lp.satisfied_by(point)
    return point


def _pivot(tab, cost, r, c):
    prow = tab[r]
    inv = 1 / prow[c]
    nz = [j for j, v in enumerate(prow) if v != 0]
    for j in nz:
        prow[j] *= inv
    for row in tab + [cost]:
        if row is prow:
            continue
        f = row[c]
        if f != 0:
            for j in nz:
                row[j] -= f * prow[j]
