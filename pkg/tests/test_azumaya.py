import pytest

from deraz.azumaya import (Unsupported, find_acyclic_fiber, is_compact_generator, is_smooth, right_ideal_witness,
                           structure_map_verdict, support_ideal, trivialization_search, verify_azumaya,
                           verify_morita_witness)
from deraz.complexes import cone, direct_sum, homology, koszul, unit_complex
from deraz.cring import PolyAlgebra, enumerate_points, localize
from deraz.dgalg import (algebra_from_quotient, azumaya_structure_map, dual_numbers, end_dga, matrix_algebra,
                         product_algebra, quaternion_algebra, tensor_dga, unit_algebra, zero_algebra)

from conftest import fiber_acyclic_everywhere, finite_model, random_complex


def _dense_az2(B):
    rep = homology(cone(azumaya_structure_map(B)))
    return rep.is_acyclic(), rep.dimensions()


def test_sparse_and_dense_az2_agree():
    for F in ("Q", "F3", "F5"):
        k = PolyAlgebra(F, ())
        corpus = [unit_algebra(k), matrix_algebra(k, 2), quaternion_algebra(k, -1, -1), quaternion_algebra(k, 2, 3),
                  product_algebra(k, 2), dual_numbers(k), zero_algebra(k),
                  end_dga(direct_sum(unit_complex(k), unit_complex(k, 1)))]
        for B in corpus:
            v = structure_map_verdict(B)
            ok, dims = _dense_az2(B)
            assert v.holds == ok
            nz = {i: d for i, d in (dims or {}).items() if d}
            assert {i: d for i, d in (v.cone_dimensions or {}).items() if d} == nz


def test_product_algebra_cone_homology():
    k = PolyAlgebra("Q", ())
    v = verify_azumaya(product_algebra(k, 2))
    assert v.az1.holds and not v.az2.holds
    assert {i: d for i, d in v.az2.cone_dimensions.items() if d} == {-1: 2, 0: 2}


def test_zero_algebra_fails_generation():
    A = PolyAlgebra("F3", ["x"])
    v = verify_azumaya(zero_algebra(A))
    assert not v.az1.holds
    assert v.az1.witness_point is not None


def test_quaternions_over_a_line_degenerate_at_zero():
    A = PolyAlgebra("Q", ["x"])
    x = A.gen("x")
    assert not verify_azumaya(quaternion_algebra(A, x, 1))
    assert verify_azumaya(quaternion_algebra(A, 1, -1))
    # over the localization away from x the algebra becomes Azumaya
    B = quaternion_algebra(A, x, 1)
    L = localize(A, x)
    assert verify_azumaya(B.base_change(L.map))


def test_fiberwise_az2_matches_global_on_finite_model():
    A = finite_model(5, 1)
    x = A.gen("x")
    B = quaternion_algebra(A, x, 2)
    glob = structure_map_verdict(B).holds
    fibers = [structure_map_verdict(B.at_point(pt)).holds for pt in enumerate_points(A)]
    assert fibers.count(False) == 1  # only x = 0
    assert glob == all(fibers)


def test_tensor_of_azumaya_is_azumaya():
    k = PolyAlgebra("F5", ())
    B = tensor_dga(quaternion_algebra(k, 2, 3), matrix_algebra(k, 2))
    assert verify_azumaya(B)


def test_generator_on_nonreduced_ring():
    A = PolyAlgebra("F3", ["x"], ["x^2"])
    x = A.gen("x")
    v = is_compact_generator(koszul(A, [x]))
    assert v.holds and v.method == "support"


def test_koszul_not_a_generator_over_line():
    A = PolyAlgebra("Q", ["x"])
    x = A.gen("x")
    K = koszul(A, [x])
    v = is_compact_generator(K)
    assert not v.holds
    assert v.witness_point is not None and v.witness_point.values[0] != 0
    assert homology(K.at_point(v.witness_point)).is_acyclic()


def test_support_ideal_cuts_out_roots():
    A = PolyAlgebra("F5", ["x"])
    x = A.gen("x")
    K = koszul(A, [x * x - 1])
    J = support_ideal(K)
    for pt in enumerate_points(A):
        on_support = not homology(K.at_point(pt)).is_acyclic()
        assert on_support == all(not pt(g) for g in J.gens)
    assert find_acyclic_fiber(K, J) is not None


def test_generator_matches_fiber_oracle(rng):
    for p, n in [(2, 2), (3, 1), (5, 1)]:
        A = finite_model(p, n)
        for _ in range(10):
            E = random_complex(A, rng)
            _, some_acyclic = fiber_acyclic_everywhere(E)
            assert is_compact_generator(E).holds == (not some_acyclic)


def test_smoothness():
    k = PolyAlgebra("Q", ())
    assert is_smooth(matrix_algebra(k, 2)).smooth
    assert is_smooth(product_algebra(k, 3)).smooth
    assert not is_smooth(dual_numbers(k), depth_bound=3).smooth
    R = PolyAlgebra("F3", ["x"], ["x^2 - 1"])  # separable: F3 x F3
    assert is_smooth(algebra_from_quotient(R)).smooth
    with pytest.raises(Unsupported):
        is_smooth(matrix_algebra(PolyAlgebra("Q", ["x"]), 2))


def test_matrix_corner_is_morita_witness():
    k = PolyAlgebra("Q", ())
    M = matrix_algebra(k, 2)
    e = [1, 0, 0, 0]  # E_11
    w = right_ideal_witness(M, e, unit_algebra(k))
    assert w.module.total_rank == 2
    assert verify_morita_witness(w)


def test_product_corner_is_not_morita():
    k = PolyAlgebra("F3", ())
    P = product_algebra(k, 2)
    w = right_ideal_witness(P, [1, 0], unit_algebra(k))
    v = verify_morita_witness(w)
    assert not v.holds
    assert v.witness_element is not None
    z = [k(c) for c in v.witness_element]
    # it acts by zero on E = eP and, being a nonzero idempotent, is not nilpotent
    m = w.module.total_rank
    for r in range(m):
        for c in range(m):
            assert sum((zq * w.action[q][r, c] for q, zq in enumerate(z)), k.zero) == k.zero
    zz = P.mul(z, z)
    assert zz == z and any(zz)


def test_trivialization_over_f3_and_f5():
    for F in ("F3", "F5"):
        k = PolyAlgebra(F, ())
        H = quaternion_algebra(k, -1, -1)
        res = trivialization_search(H)
        assert res
        assert verify_morita_witness(res.witness).holds
        e = [k(c) for c in res.idempotent]
        assert H.mul(e, e) == e


def test_trivialization_needs_finite_field():
    with pytest.raises(Unsupported):
        trivialization_search(quaternion_algebra(PolyAlgebra("Q", ()), -1, -1))
