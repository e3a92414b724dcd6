import random

import pytest
from hypothesis import given, settings, strategies as st

from deraz.complexes import (ChainMap, FreeComplex, NotAChainMap, NotAComplex, RingMismatch, cone, direct_sum,
                             hom_complex, homology, identity_map, is_acyclic, is_quasi_iso, koszul,
                             multiplication_map, shift, tensor, tensor_braiding, unit_complex)
from deraz.cring import PolyAlgebra, enumerate_points
from deraz.cring.points import evaluate_matrix
from deraz.scalars import Matrix, rank

from conftest import fiber_acyclic_everywhere, finite_model, random_complex, random_matrix


def _field_complex(k, rng, lo=-1, length=3, max_rank=3):
    """A random complex over a field built as a sum of shifted two-term pieces and units."""
    parts = []
    for _ in range(rng.randint(1, 3)):
        r = rng.randint(1, max_rank)
        deg = rng.randint(lo, lo + length)
        if rng.random() < 0.5:
            parts.append(unit_complex(k, deg, r))
        else:
            M = Matrix(k, [[rng.randint(-2, 2) for _ in range(r)] for _ in range(r)], r)
            parts.append(FreeComplex(k, deg, [r, r], [M]))
    return direct_sum(*parts)


def _dims(C):
    d = homology(C).dimensions()
    return {i: v for i, v in d.items() if v}


def test_d_squared_checked():
    A = PolyAlgebra("Q", ["x"])
    x = A.gen("x")
    with pytest.raises(NotAComplex):
        FreeComplex(A, 0, [1, 1, 1], [Matrix(A, [[x]]), Matrix(A, [[x]])])
    with pytest.raises(NotAComplex):
        FreeComplex(A, 0, [1, 2], [Matrix(A, [[x]])])


def test_constructions_are_complexes(rng):
    for p, n in [(2, 2), (3, 1), (5, 1)]:
        A = finite_model(p, n)
        for _ in range(5):
            C = random_complex(A, rng)
            D = random_complex(A, rng, max_rank=4)
            for E in (direct_sum(C, D), shift(C, 3), tensor(C, D), hom_complex(C, D)):
                E.check()
            f = identity_map(C)
            cone(f).check()


def test_cone_of_identity_is_acyclic(rng):
    A = PolyAlgebra("Q", ["x", "y"])
    x, y = A.gens
    K = koszul(A, [x, y * y - 1])
    assert is_acyclic(cone(identity_map(K)))
    ok, _ = is_quasi_iso(identity_map(K))
    assert ok


def test_koszul_ranks_and_homology():
    A = PolyAlgebra("Q", ["x", "y"])
    x, y = A.gens
    K = koszul(A, [x, y])
    assert (K.lo, K.ranks) == (-2, (1, 2, 1))
    rep = homology(K)
    # regular sequence: only H^0 = A/(x, y) survives
    assert rep.nonzero_degrees() == [0]
    # unit element makes it acyclic
    assert is_acyclic(koszul(A, [x, 1 + x * 0]))
    # repeated element: H^{-1} appears
    assert homology(koszul(A, [x, x])).nonzero_degrees() == [-1, 0]


def test_koszul_over_a_field_is_kunneth():
    k = PolyAlgebra("F3", ())
    assert _dims(koszul(k, [0, 0])) == {-2: 1, -1: 2, 0: 1}
    assert _dims(koszul(k, [0, 1])) == {}


def test_shift_moves_homology():
    k = PolyAlgebra("Q", ())
    U = unit_complex(k, 0, 2)
    assert _dims(shift(U, 3)) == {-3: 2}


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["Q", "F2", "F3"]))
def test_tensor_and_hom_satisfy_kunneth(seed, F):
    rng = random.Random(seed)
    k = PolyAlgebra(F, ())
    C = _field_complex(k, rng)
    D = _field_complex(k, rng)
    hc, hd = _dims(C), _dims(D)
    want_t, want_h = {}, {}
    for i, a in hc.items():
        for j, b in hd.items():
            want_t[i + j] = want_t.get(i + j, 0) + a * b
            want_h[j - i] = want_h.get(j - i, 0) + a * b
    assert _dims(tensor(C, D)) == want_t
    assert _dims(hom_complex(C, D)) == want_h


def test_braiding_is_a_chain_isomorphism():
    A = PolyAlgebra("Q", ["x"])
    x = A.gen("x")
    C = koszul(A, [x])
    D = shift(koszul(A, [x - 1]), 1)
    b = tensor_braiding(C, D)
    b.check()
    assert is_quasi_iso(b)[0]


def test_chain_map_checked():
    A = PolyAlgebra("Q", ["x"])
    x = A.gen("x")
    K = koszul(A, [x])
    with pytest.raises(NotAChainMap):
        ChainMap(K, K, {0: Matrix(A, [[1]])})


def test_multiplication_by_unit_is_quasi_iso():
    A = PolyAlgebra("Q", ["x"], ["x^2 - 1"])
    x = A.gen("x")
    K = koszul(A, [x - 1])
    assert is_quasi_iso(multiplication_map(K, 2))[0]
    # x - 1 kills H^0 = A/(x-1), so multiplication by it is not a quasi-iso
    assert not is_quasi_iso(multiplication_map(K, x - 1))[0]


def test_ring_mismatch():
    A = PolyAlgebra("Q", ["x"])
    B = PolyAlgebra("Q", ["y"])
    with pytest.raises(RingMismatch):
        direct_sum(unit_complex(A), unit_complex(B))


def test_acyclicity_matches_fiber_oracle_on_finite_models(rng):
    # over F_p[x]/(x^p - x) = product of copies of F_p a complex is acyclic
    # exactly when every fiber is
    for p, n in [(2, 1), (2, 2), (3, 1), (3, 2), (5, 1), (2, 3)]:
        A = finite_model(p, n)
        for _ in range(8):
            C = random_complex(A, rng)
            assert is_acyclic(C) == fiber_acyclic_everywhere(C)[0], C.describe()


def test_random_matrix_two_term_over_local_ring(rng):
    # over F3[x]/(x^2) multiplication by x is not a quasi-iso and K(x) is not acyclic
    A = PolyAlgebra("F3", ["x"], ["x^2"])
    x = A.gen("x")
    assert not is_acyclic(koszul(A, [x]))
    M = random_matrix(A, rng, 2, 2)
    C = FreeComplex(A, 0, [2, 2], [M])
    pt = next(enumerate_points(A))
    # acyclic iff the reduction mod x is invertible
    assert is_acyclic(C) == (rank(evaluate_matrix(M, pt)) == 2)
