from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from deraz.scalars import (GF, QQ, FieldMismatch, Matrix, ShapeError, kernel_basis, parse_field, rank,
                           rank_of_columns, rref, solve)


def test_prime_field_arithmetic():
    F = GF(7)
    a, b = F(3), F(5)
    assert a + b == F(1)
    assert a * b == F(1)
    assert (1 / a) * a == F.one
    assert F(-1) == F(6)
    assert GF(7) is F


def test_fields_do_not_mix():
    with pytest.raises(FieldMismatch):
        GF(3)(1) + GF(5)(1)


def test_parse_field():
    assert parse_field("Q") is QQ
    assert parse_field("F5") is GF(5)
    assert parse_field("Fp(3)") is GF(3)
    with pytest.raises(ValueError):
        parse_field("R")


def test_matrix_product_and_shape_errors():
    A = Matrix(QQ, [[1, 2], [3, 4]])
    B = Matrix(QQ, [[0, 1], [1, 0]])
    assert (A @ B).tolist() == [[2, 1], [4, 3]]
    with pytest.raises(ShapeError):
        A @ Matrix(QQ, [[1, 2, 3]])


def test_rref_and_solve():
    M = Matrix(QQ, [[1, 2, 3], [2, 4, 6], [1, 0, 1]])
    rows, piv = rref(M)
    assert piv == [0, 1]
    x = solve(M, [6, 12, 2])
    assert M.apply(x) == [Fraction(6), Fraction(12), Fraction(2)]
    assert solve(M, [1, 0, 0]) is None


small = st.integers(min_value=-3, max_value=3)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.data())
def test_rank_nullity(n, m, data):
    rows = [[data.draw(small) for _ in range(m)] for _ in range(n)]
    M = Matrix(QQ, rows, m)
    K = kernel_basis(M)
    assert rank(M) + K.ncols == m
    assert (M @ K).is_zero() if K.ncols else True


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.integers(1, 4), st.data())
def test_kernel_dimension_matches_enumeration_over_f3(n, m, data):
    """Count kernel vectors of a random F_3 matrix by brute force."""
    F = GF(3)
    rows = [[data.draw(st.integers(0, 2)) for _ in range(m)] for _ in range(n)]
    M = Matrix(F, rows, m)
    count = sum(1 for v in product(range(3), repeat=m) if not any(M.apply([F(x) for x in v])))
    assert count == 3 ** kernel_basis(M).ncols


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5), st.data())
def test_sparse_rank_agrees_with_dense(n, m, data):
    F = GF(5)
    rows = [[data.draw(st.sampled_from([0, 0, 0, 1, 2, 4])) for _ in range(m)] for _ in range(n)]
    M = Matrix(F, rows, m)
    cols = [{i: M[i, j] for i in range(n)} for j in range(m)]
    assert rank_of_columns(F, cols) == rank(M)
