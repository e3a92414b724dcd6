import pytest

from deraz.complexes import direct_sum, koszul, unit_complex
from deraz.cring import PolyAlgebra, enumerate_points
from deraz.dgalg import (DGAlgebra, NotADGAlgebra, azumaya_structure_map, dual_numbers, end_dga,
                         enveloping_algebra, matrix_algebra, opposite, product_algebra, quaternion_algebra,
                         structure_map_ranks, tensor_dga, transpose_map, unit_algebra)
from deraz.scalars import Matrix, rank


def _mat_mul(F, X, Y):
    n = len(X)
    return [[sum((X[i][k] * Y[k][j] for k in range(n)), F.zero) for j in range(n)] for i in range(n)]


def test_quaternions_over_f3_match_explicit_matrices():
    # (-1, -1) over F3 is M_2(F3): i, j below square to -1 and anticommute
    k = PolyAlgebra("F3", ())
    F = k.field
    Q = quaternion_algebra(k, -1, -1)
    one = [[F(1), F(0)], [F(0), F(1)]]
    i = [[F(0), F(-1)], [F(1), F(0)]]
    j = [[F(1), F(1)], [F(1), F(-1)]]
    basis = [one, i, j, _mat_mul(F, i, j)]

    def image(v):
        out = [[F.zero, F.zero], [F.zero, F.zero]]
        for c, B in zip(v, basis):
            c = c.constant_value()
            out = [[out[r][s] + c * B[r][s] for s in range(2)] for r in range(2)]
        return out

    for p in range(4):
        for q in range(4):
            prod = Q.mul(Q.basis_vector(p), Q.basis_vector(q))
            assert image(prod) == _mat_mul(F, basis[p], basis[q])


def test_matrix_units_multiply():
    A = PolyAlgebra("Q", ["x"])
    M = matrix_algebra(A, 3)
    e = M.basis_vector
    assert M.mul(e(0 * 3 + 1), e(1 * 3 + 2)) == e(0 * 3 + 2)
    assert M.mul(e(0 * 3 + 1), e(0 * 3 + 2)) == [A.zero] * 9
    assert M.mul(list(M.unit), e(5)) == e(5)


def test_bad_table_rejected():
    k = PolyAlgebra("Q", ())
    C = unit_complex(k, 0, 2)
    # e0 is declared the unit but e0 e0 = e1
    with pytest.raises(NotADGAlgebra):
        DGAlgebra(C, {(0, 0): {1: 1}}, [1, 0])


def test_end_dga_of_koszul_satisfies_leibniz():
    A = PolyAlgebra("Q", ["x", "y"])
    x, y = A.gens
    E = end_dga(koszul(A, [x, y]))
    assert E.dim == 16
    E.check()
    assert not E.has_zero_differential()


def test_end_of_graded_unit_is_graded_matrix_algebra():
    k = PolyAlgebra("Q", ())
    E = end_dga(direct_sum(unit_complex(k), unit_complex(k, 1)))
    assert sorted(E.degrees) == [-1, 0, 0, 1]
    assert E.has_zero_differential()


def test_opposite_twice_is_identity():
    A = PolyAlgebra("F5", ())
    Q = quaternion_algebra(A, 2, 3)
    assert opposite(opposite(Q)).table == Q.table
    assert not Q.is_commutative()
    assert product_algebra(A, 3).is_commutative()


def test_opposite_of_graded_algebra_has_signs():
    k = PolyAlgebra("Q", ())
    E = end_dga(direct_sum(unit_complex(k), unit_complex(k, 1)))
    Eop = opposite(E)
    Eop.check()
    odd = [p for p, d in enumerate(E.degrees) if d]
    p, q = odd
    # odd times odd picks up a sign
    assert Eop.mul(Eop.basis_vector(p), Eop.basis_vector(q)) == [-c for c in E.mul(E.basis_vector(q), E.basis_vector(p))]


def test_tensor_dimensions_and_unit():
    A = PolyAlgebra("Q", ())
    M2 = matrix_algebra(A, 2)
    Q = quaternion_algebra(A, -1, -1)
    T = tensor_dga(M2, Q)
    assert T.dim == 16
    for p in range(T.dim):
        assert T.mul(list(T.unit), T.basis_vector(p)) == T.basis_vector(p)


def test_transpose_is_iso():
    A = PolyAlgebra("Q", ["t"])
    f = transpose_map(2, A)
    assert f.is_isomorphism()


def test_structure_map_sparse_ranks_match_dense():
    k = PolyAlgebra("F3", ())
    for B in (matrix_algebra(k, 2), quaternion_algebra(k, 1, -1), product_algebra(k, 2), dual_numbers(k),
              end_dga(direct_sum(unit_complex(k), unit_complex(k, 1)))):
        phi = azumaya_structure_map(B)
        sparse = structure_map_ranks(B)
        for n in phi.source.degrees:
            M = phi[n]
            dense = rank(Matrix(k.field, [[a.constant_value() for a in r] for r in M.rows()], M.ncols)) \
                if M.nrows and M.ncols else 0
            assert sparse.get(n, 0) == dense


def test_base_change_at_point():
    A = PolyAlgebra("F5", ["t"], ["t^5 - t"])
    t = A.gen("t")
    Q = quaternion_algebra(A, t, 2)
    pt = next(p for p in enumerate_points(A) if p.values[0] == A.field(3))
    Qp = Q.at_point(pt)
    i = Qp.basis_vector(1)
    assert Qp.mul(i, i)[0].constant_value() == 3


def test_enveloping_algebra_of_unit():
    A = PolyAlgebra("Q", ["x"])
    Be = enveloping_algebra(unit_algebra(A))
    assert Be.dim == 1
