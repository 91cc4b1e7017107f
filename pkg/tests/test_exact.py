from fractions import Fraction

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from gaudin_oper import exact

small = st.integers(-4, 4).map(Fraction)


def mat(rows, cols):
    return st.lists(st.lists(small, min_size=cols, max_size=cols), min_size=rows, max_size=rows).map(exact.frac_array)


def test_rref_identity_and_rank():
    m = exact.frac_array([[1, 2], [2, 4]])
    red, piv = exact.rref(m)
    assert piv == [0]
    assert exact.rank(m) == 1
    assert exact.rank(exact.eye(3)) == 3


def test_nullspace_of_rank_one():
    m = exact.frac_array([[1, 2, 3]])
    ker = exact.nullspace(m)
    assert len(ker) == 2
    for v in ker:
        assert exact.is_zero(m @ v)


def test_nullspace_of_empty_rows():
    ker = exact.nullspace(exact.zeros((0, 3)), ncols=3)
    assert len(ker) == 3


def test_solve_tall_system():
    a = exact.frac_array([[1, 0], [0, 2], [1, 1]])
    x = exact.frac_array([[Fraction(1, 3)], [Fraction(-5, 2)]])
    assert (exact.solve(a, a @ x) == x).all()


def test_independent_rows_greedy():
    rows = [[1, 0], [2, 0], [0, 1], [1, 1]]
    assert exact.independent_rows([[Fraction(c) for c in r] for r in rows]) == [0, 2]


@given(mat(3, 5))
def test_rank_nullity(m):
    assert exact.rank(m) + len(exact.nullspace(m)) == 5
    for v in exact.nullspace(m):
        assert exact.is_zero(m @ v)


@given(mat(4, 4))
def test_rank_matches_float_rank(m):
    assert exact.rank(m) == np.linalg.matrix_rank(exact.to_complex(m))
