from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from sspgames.linalg import SingularSystemError, solve, solve_sparse
from sspgames.lp import LinearProgram, lp_feasible


def test_solve_small():
    a = [[Fraction(2), Fraction(1)], [Fraction(1), Fraction(3)]]
    assert solve(a, [Fraction(3), Fraction(5)]) == [Fraction(4, 5), Fraction(7, 5)]


def test_singular():
    with pytest.raises(SingularSystemError):
        solve([[Fraction(1), Fraction(2)], [Fraction(2), Fraction(4)]], [Fraction(1), Fraction(2)])


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 6))
def test_solve_sparse_exact(seed, n):
    rng = np.random.default_rng(seed)
    a = rng.integers(-4, 5, size=(n, n)) + np.eye(n, dtype=int) * 20
    b = rng.integers(-9, 10, size=n)
    rows = [{j: Fraction(int(a[i, j])) for j in range(n) if a[i, j]} for i in range(n)]
    x = solve_sparse(n, rows, [Fraction(int(v)) for v in b])
    for i in range(n):
        assert sum(Fraction(int(a[i, j])) * x[j] for j in range(n)) == b[i]
    assert np.allclose([float(v) for v in x], np.linalg.solve(a, b))


def test_empty_program():
    assert lp_feasible(LinearProgram(3)) == [0, 0, 0]


def test_simple_feasible():
    lp = LinearProgram(2)
    lp.add_eq({0: 1, 1: 1}, 1)
    lp.add_ge({0: 1}, Fraction(1, 3))
    x = lp_feasible(lp)
    assert lp.satisfied_by(x) and x[0] >= Fraction(1, 3)


def test_simple_infeasible():
    lp = LinearProgram(2)
    lp.add_eq({0: 1, 1: 1}, 1)
    lp.add_ge({0: 1}, Fraction(2, 3))
    lp.add_ge({1: 1}, Fraction(2, 3))
    assert lp_feasible(lp) is None


def test_negative_rhs():
    lp = LinearProgram(1)
    lp.add_eq({0: -1}, -2)
    assert lp_feasible(lp) == [2]


def test_bad_index():
    with pytest.raises(ValueError):
        LinearProgram(1).add_eq({3: 1}, 0)


def test_degenerate_does_not_cycle():
    # a classic cycling example for largest-coefficient pivoting, cast as feasibility
    lp = LinearProgram(4)
    lp.add_ge({0: Fraction(-1, 2), 1: Fraction(11, 2), 2: Fraction(5, 2), 3: -9}, 0)
    lp.add_ge({0: Fraction(-1, 2), 1: Fraction(3, 2), 2: Fraction(1, 2), 3: -1}, 0)
    lp.add_ge({0: -1}, -1)
    lp.add_ge({0: 10, 1: -57, 2: -9, 3: -24}, 1)
    x = lp_feasible(lp)
    assert x is None or lp.satisfied_by(x)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 5), st.integers(0, 3), st.integers(0, 3))
def test_against_scipy(seed, n, n_eq, n_ge):
    rng = np.random.default_rng(seed)
    a_eq = rng.integers(-3, 4, size=(n_eq, n))
    b_eq = rng.integers(-3, 6, size=n_eq)
    a_ge = rng.integers(-3, 4, size=(n_ge, n))
    b_ge = rng.integers(-3, 6, size=n_ge)
    lp = LinearProgram(n)
    for row, b in zip(a_eq, b_eq):
        lp.add_eq({j: int(v) for j, v in enumerate(row)}, int(b))
    for row, b in zip(a_ge, b_ge):
        lp.add_ge({j: int(v) for j, v in enumerate(row)}, int(b))
    x = lp_feasible(lp)
    ref = linprog(np.zeros(n), A_ub=-a_ge if n_ge else None, b_ub=-b_ge if n_ge else None,
                  A_eq=a_eq if n_eq else None, b_eq=b_eq if n_eq else None,
                  bounds=[(0, None)] * n, method="highs")
    assert (x is not None) == (ref.status == 0)
    if x is not None:
        assert lp.satisfied_by(x)
