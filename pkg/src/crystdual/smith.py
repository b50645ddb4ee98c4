"""Exact integer linear algebra on top of sympy's Smith normal form.

Matrices are plain tuples of int rows; rational vectors are tuples of
``Fraction``.  Everything here is exact.
"""

from __future__ import annotations

from fractions import Fraction
from typing import NamedTuple, Optional, Sequence

from sympy import Matrix, ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import smith_normal_decomp

IntMatrix = tuple[tuple[int, ...], ...]


class SmithDecomposition(NamedTuple):
    """``D == U @ M @ V`` with ``U`` and ``V`` unimodular."""

    diagonal: tuple[int, ...]
    U: IntMatrix
    V: IntMatrix
    rank: int


def _as_int_matrix(rows) -> IntMatrix:
    return tuple(tuple(int(x) for x in row) for row in rows)


def snf(M: Sequence[Sequence[int]]) -> SmithDecomposition:
    rows = len(M)
    cols = len(M[0]) if rows else 0
    if rows == 0 or cols == 0:
        raise ValueError("snf needs a non-empty matrix")
    dm = DomainMatrix([[ZZ(int(x)) for x in row] for row in M], (rows, cols), ZZ)
    D, U, V = smith_normal_decomp(dm)
    D = D.to_list()
    diag = tuple(abs(int(D[i][i])) for i in range(min(rows, cols)))
    U = _as_int_matrix(U.to_list())
    V = _as_int_matrix(V.to_list())
    # sympy may leave negative diagonal entries; absorb the signs into U
    signs = [1 if int(D[i][i]) >= 0 else -1 for i in range(len(diag))]
    if any(s < 0 for s in signs):
        U = tuple(
            tuple(x * signs[i] for x in row) if i < len(signs) else row
            for i, row in enumerate(U)
        )
    rank = sum(1 for d in diag if d != 0)
    return SmithDecomposition(diag, U, V, rank)


def matmul(A: Sequence[Sequence], B: Sequence[Sequence]) -> tuple:
    return tuple(
        tuple(sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0])))
        for i in range(len(A))
    )


def matvec(A: Sequence[Sequence], v: Sequence) -> tuple:
    # skipping zero entries matters: most holonomy matrices are signed permutations
    return tuple(sum((a * x for a, x in zip(row, v) if a), 0) for row in A)


def identity(n: int) -> IntMatrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def transpose(A: Sequence[Sequence]) -> tuple:
    return tuple(zip(*A))


def det(A: Sequence[Sequence[int]]) -> int:
    return int(Matrix(A).det())


def inverse_unimodular(A: Sequence[Sequence[int]]) -> IntMatrix:
    inv = Matrix(A).inv()
    out = tuple(tuple(int(inv[i, j]) for j in range(inv.cols)) for i in range(inv.rows))
    if matmul(A, out) != identity(len(A)):
        raise ValueError("matrix is not unimodular")
    return out


def solve_integer(S: Sequence[Sequence[int]], rhs: Sequence[Fraction]) -> Optional[tuple[int, ...]]:
    """An integer vector ``m`` with ``S m = rhs``, or None if none exists.

    ``rhs`` may be rational; a non-integral ``U rhs`` simply has no solution.
    """
    dec = snf(S)
    Ur = matvec(dec.U, [Fraction(x) for x in rhs])
    y = []
    for i in range(len(dec.V)):
        if i < dec.rank:
            q = Ur[i] / dec.diagonal[i]
            if q.denominator != 1:
                return None
            y.append(int(q))
        else:
            y.append(0)
    for i in range(dec.rank, len(Ur)):
        if Ur[i] != 0:
            return None
    return tuple(int(x) for x in matvec(dec.V, y))


def kernel_basis(S: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    """A basis (as a tuple of vectors) of the integer kernel of ``S``.

    The basis spans a saturated sublattice: it is the tail of the columns
    of a unimodular matrix.
    """
    dec = snf(S)
    cols = transpose(dec.V)
    return tuple(tuple(c) for c in cols[dec.rank:])
