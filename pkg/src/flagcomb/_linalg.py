"""Small exact integer/rational matrix helpers.

Matrices are tuples of row tuples so they can be hashed and compared.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import sympy

Vec = tuple[int, ...]
Mat = tuple[tuple[int, ...], ...]


def identity(m: int) -> Mat:
    return tuple(tuple(int(i == j) for j in range(m)) for i in range(m))


def matmul(a: Mat, b: Mat) -> Mat:
    cols = tuple(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in cols) for row in a)


def matvec(a: Mat, v: Sequence[int]) -> Vec:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def transpose(a: Mat) -> Mat:
    return tuple(zip(*a))


def dot(x: Sequence, y: Sequence):
    return sum(a * b for a, b in zip(x, y))


def from_columns(cols: Sequence[Sequence[int]]) -> Mat:
    return tuple(tuple(int(c[i]) for c in cols) for i in range(len(cols[0])))


def rational_inverse(a: Sequence[Sequence]) -> tuple[tuple[Fraction, ...], ...]:
    inv = sympy.Matrix(a).inv()
    return tuple(
        tuple(Fraction(int(sympy.fraction(x)[0]), int(sympy.fraction(x)[1])) for x in inv.row(i))
        for i in range(inv.rows)
    )


@lru_cache(maxsize=4096)
def integer_inverse(a: Mat) -> Mat:
    """Inverse of a unimodular integer matrix; ValueError otherwise."""
    inv = rational_inverse(a)
    if any(x.denominator != 1 for row in inv for x in row):
        raise ValueError("matrix is not invertible over the integers")
    return tuple(tuple(int(x) for x in row) for row in inv)


def det(a: Mat) -> int:
    return int(sympy.Matrix(a).det())


def rank(vectors: Sequence[Sequence[int]]) -> int:
    if not vectors:
        return 0
    return sympy.Matrix(vectors).rank()


def invariant_factors(cols: Sequence[Sequence[int]]) -> list[int]:
    """Nonzero invariant factors of the integer matrix with the given columns."""
    if not cols:
        return []
    from sympy.matrices.normalforms import smith_normal_form
    from sympy.polys.domains import ZZ

    snf = smith_normal_form(sympy.Matrix(from_columns(cols)), domain=ZZ)
    k = min(snf.shape)
    return [abs(int(snf[i, i])) for i in range(k) if snf[i, i] != 0]


def null_space(rows: Sequence[Sequence[int]], m: int) -> list[tuple[Fraction, ...]]:
    """Rational basis of {x in Q^m : <row, x> = 0 for every row}."""
    if not rows:
        return [tuple(Fraction(int(i == j)) for j in range(m)) for i in range(m)]
    basis = sympy.Matrix(rows).nullspace()
    out = []
    for v in basis:
        out.append(tuple(Fraction(int(sympy.fraction(x)[0]), int(sympy.fraction(x)[1])) for x in v))
    return out
