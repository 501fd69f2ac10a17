import math
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from otw.linalg import (
    Echelon,
    RationalMatrix,
    ShapeError,
    as_rational,
    dot,
    entrywise_product,
    format_rational,
    gram_schmidt,
    inverse,
    kernel_basis,
    matmul,
    parse_rational,
    primitive,
    rank,
)

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)


def dense_matrices(max_rows=6, max_cols=6, values=st.integers(-3, 3)):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(values, min_size=c, max_size=c), min_size=r, max_size=r)))


@given(rationals)
def test_rational_text_round_trip(q):
    s = format_rational(q)
    assert parse_rational(s) == q
    if q.denominator == 1:
        assert "/" not in s
    assert format_rational(as_rational(q)) == s


def test_rational_text_examples():
    assert format_rational(Fraction(-6, 4)) == "-3/2"
    assert format_rational(0) == "0"
    assert format_rational(Fraction(10, 5)) == "2"
    assert isinstance(as_rational(Fraction(4, 2)), int)


@given(dense_matrices())
@settings(max_examples=60)
def test_rank_matches_sympy(rows):
    assert rank(RationalMatrix.from_dense(rows)) == sympy.Matrix(rows).rank()


@given(dense_matrices())
@settings(max_examples=60)
def test_kernel_basis(rows):
    a = RationalMatrix.from_dense(rows)
    ker = kernel_basis(a)
    assert len(ker) == a.cols - sympy.Matrix(rows).rank()
    for v in ker:
        assert not any(a.apply(v))
        assert all(isinstance(x, int) for x in v)
    if ker:
        assert rank(RationalMatrix.from_dense(ker)) == len(ker)


@given(dense_matrices(4, 4), dense_matrices(4, 4))
def test_matmul_matches_sympy(a, b):
    if len(a[0]) != len(b):
        with pytest.raises(ShapeError):
            RationalMatrix.from_dense(a) @ RationalMatrix.from_dense(b)
        return
    got = matmul(RationalMatrix.from_dense(a), RationalMatrix.from_dense(b))
    assert got.to_dense() == (sympy.Matrix(a) * sympy.Matrix(b)).tolist()


@given(st.integers(1, 5).flatmap(lambda n: st.lists(st.lists(rationals, min_size=n, max_size=n), min_size=n, max_size=n)))
@settings(max_examples=60)
def test_inverse(rows):
    a = RationalMatrix.from_dense(rows)
    n = a.rows
    if rank(a) < n:
        with pytest.raises(ZeroDivisionError):
            inverse(a)
        return
    assert a @ inverse(a) == RationalMatrix.identity(n)


@given(st.lists(st.lists(st.integers(-4, 4), min_size=5, max_size=5), max_size=6))
def test_gram_schmidt_orthogonal(vs):
    out = gram_schmidt(vs)
    assert len(out) == (sympy.Matrix(vs).rank() if vs else 0)
    for k, (u, nu) in enumerate(out):
        assert dot(u, u) == nu != 0
        for w, _ in out[:k]:
            assert dot(u, w) == 0


@given(st.lists(rationals, min_size=1, max_size=8))
def test_primitive(v):
    p = primitive(v)
    assert all(isinstance(x, int) for x in p)
    nz = [(a, b) for a, b in zip(v, p) if a]
    if nz:
        ratio = Fraction(nz[0][1]) / nz[0][0]
        assert ratio > 0
        assert all(Fraction(b) == ratio * a for a, b in zip(v, p))
        assert math.gcd(*p) == 1


@given(dense_matrices(7, 5))
def test_echelon_rank(rows):
    ech = Echelon(len(rows[0]))
    added = [ech.add(r) for r in rows]
    assert ech.rank == sum(added) == sympy.Matrix(rows).rank()


def test_sparse_storage_drops_zeros():
    a = RationalMatrix(3, 3, [(0, 0, 1), (0, 0, -1), (1, 2, Fraction(1, 2))])
    assert a.nnz == 1
    assert a[1, 2] == Fraction(1, 2)
    assert a.items() == [(1, 2, Fraction(1, 2))]
    with pytest.raises(ShapeError):
        RationalMatrix(2, 2, [(2, 0, 1)])


def test_transpose_and_hadamard():
    a = RationalMatrix.from_dense([[1, 2], [3, 0]])
    assert a.T.to_dense() == [[1, 3], [2, 0]]
    assert entrywise_product(a, a.T).to_dense() == [[1, 6], [6, 0]]
    assert (a - a).is_zero()
