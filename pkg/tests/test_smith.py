from fractions import Fraction
from itertools import product

from hypothesis import given, settings
from hypothesis import strategies as st

from crystdual import smith

small = st.integers(min_value=-4, max_value=4)
matrices = st.integers(min_value=1, max_value=3).flatmap(
    lambda r: st.integers(min_value=1, max_value=3).flatmap(
        lambda c: st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r)
    )
)


@settings(max_examples=150, deadline=None)
@given(matrices)
def test_decomposition_identity(M):
    dec = smith.snf(M)
    D = smith.matmul(smith.matmul(dec.U, M), dec.V)
    for i, row in enumerate(D):
        for j, x in enumerate(row):
            expected = dec.diagonal[i] if i == j and i < len(dec.diagonal) else 0
            assert x == expected
    assert all(d >= 0 for d in dec.diagonal)
    nz = [d for d in dec.diagonal if d]
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    assert abs(smith.det(dec.U)) == 1 and abs(smith.det(dec.V)) == 1


@settings(max_examples=80, deadline=None)
@given(matrices, st.lists(small, min_size=3, max_size=3))
def test_solve_integer_against_search(M, rhs):
    rhs = rhs[: len(M)]
    sol = smith.solve_integer(M, rhs)
    box = range(-6, 7)
    found = any(smith.matvec(M, m) == tuple(rhs) for m in product(box, repeat=len(M[0])))
    if sol is not None:
        assert smith.matvec(M, sol) == tuple(rhs)
    else:
        assert not found


def test_solve_rational_rhs():
    assert smith.solve_integer([[2, 0], [0, 2]], [Fraction(1, 2), 0]) is None
    assert smith.solve_integer([[2, 0], [0, 2]], [Fraction(4), 2]) == (2, 1)


def test_kernel_is_saturated():
    K = smith.kernel_basis([[2, 4, 6]])
    assert len(K) == 2
    for v in K:
        assert sum(a * b for a, b in zip((2, 4, 6), v)) == 0
    assert smith.snf(smith.transpose(K)).diagonal == (1, 1)


def test_inverse_unimodular():
    A = ((2, 1), (1, 1))
    assert smith.matmul(A, smith.inverse_unimodular(A)) == smith.identity(2)
