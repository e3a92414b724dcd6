from itertools import permutations

import pytest

from deraz.complexes import CapExceeded, homology, is_quasi_iso, koszul
from deraz.cring import PolyAlgebra, RingMap, enumerate_points
from deraz.descent import (BasisError, FiniteFreeExtension, NotMonic, sigma_orbit_covering_check, splitting_algebra,
                           standard_etale)


def test_quadratic_relations_match_vieta():
    A = PolyAlgebra("Q", ["b", "c"])
    S = splitting_algebra(A, "X^2 + b*X + c")
    C = S.algebra
    x1, x2 = S.roots
    b, c = C.gen("b"), C.gen("c")
    assert x1 + x2 + b == C.zero
    assert x1 * x2 - c == C.zero
    assert S.rank == 2


@pytest.mark.parametrize("F", ["Q", "F5"])
@pytest.mark.parametrize("poly,d", [("X - 2", 1), ("X^2 - 3", 2), ("X^3 + X + 1", 3), ("X^3 - 2*X^2 + 4", 3)])
def test_splitting_rank_and_factorization(F, poly, d):
    k = PolyAlgebra(F, ())
    S = splitting_algebra(k, poly)
    assert S.rank == [1, 1, 2, 6][d]
    assert all(not r for r in S.factorization_residues())


def test_rank_over_field_is_dimension():
    # over a field the rank is the vector-space dimension of the quotient
    k = PolyAlgebra("Q", ())
    S = splitting_algebra(k, "X^3 - 5")
    assert len(S.algebra.monomial_basis()) == 6


def test_split_polynomial_gives_ordered_roots():
    # X^3 - X over F5 has roots 0, 1, 4: the points are the 3! orderings
    k = PolyAlgebra("F5", ())
    S = splitting_algebra(k, "X^3 - X")
    pts = list(enumerate_points(S.algebra))
    assert len(pts) == 6
    assert {tuple(int(v) for v in p.values) for p in pts} == set(permutations((0, 1, 4)))


def test_symmetric_group_acts():
    A = PolyAlgebra("Q", ["a"])
    S = splitting_algebra(A, "X^3 - a")
    x = S.roots
    for perm in S.permutations():
        s = S.sigma(perm)
        assert isinstance(s, RingMap)
        assert [s(r) for r in x] == [x[perm[i]] for i in range(3)]
        assert s(S.inclusion(A.gen("a"))) == S.inclusion(A.gen("a"))


def test_caps_and_monic():
    k = PolyAlgebra("Q", ())
    with pytest.raises(CapExceeded):
        splitting_algebra(k, "X^5 - 1")
    with pytest.raises(NotMonic):
        splitting_algebra(k, "2*X^2 - 1")
    with pytest.raises(NotMonic):
        splitting_algebra(k, "X^2 - 1", d=3)


def test_standard_etale_default_derivative():
    A = PolyAlgebra("Q", ["t"])
    D = standard_etale(A, "X^2 - t")
    X = D.C.gen("X")
    assert D.c == 2 * X
    assert D.degree == 2


def test_covering_check():
    k = PolyAlgebra("F5", ())
    S = splitting_algebra(k, "X^2 - 1")
    assert sigma_orbit_covering_check(S, "1")
    assert sigma_orbit_covering_check(S, "2*X")
    bad = sigma_orbit_covering_check(S, "0")
    assert not bad and bad.witness is not None
    # X - 1 vanishes at one root of every ordering but not at the other
    assert sigma_orbit_covering_check(S, "X - 1")


def _ext(field, rel, base_vars=(), base_rels=()):
    A = PolyAlgebra(field, list(base_vars), list(base_rels))
    B = A.extend(["y"], [rel], "lex")
    return A, B, FiniteFreeExtension(A, B)


def test_regular_representation_is_multiplicative():
    A, B, ext = _ext("F5", "y^3 - t*y - 1", ["t"])
    y, t = B.gen("y"), B.gen("t")
    assert ext.rank == 3
    for a in (y, y * y + t, 2 * y - 1):
        for b in (y + t, y * y):
            assert ext.regular_matrix(a * b) == ext.regular_matrix(a) @ ext.regular_matrix(b)
    assert ext.trace(B.one) == A(3)
    # trace of y for y^3 - t y - 1 is minus the y^2 coefficient
    assert ext.trace(y) == A.zero


def test_not_free_rejected():
    A = PolyAlgebra("Q", ["t"])
    B = A.extend(["y"], ["t*y"], "lex")
    with pytest.raises(BasisError):
        FiniteFreeExtension(A, B)


def test_pushforward_homology_over_field():
    # B = Q[y]/(y^2 - 1) = Q x Q; y - 1 is a zero divisor with annihilator (y + 1),
    # so K(y - 1) has H^-1 = (y + 1)B and H^0 = B/(y - 1), each one-dimensional
    A, B, ext = _ext("Q", "y^2 - 1")
    y = B.gen("y")
    E = koszul(B, [y - 1])
    P = ext.pushforward(E)
    assert P.ranks == (2, 2)
    assert homology(P).dimensions() == {-1: 1, 0: 1}
    assert homology(ext.pushforward(koszul(B, [y - 2]))).is_acyclic()


def test_pushforward_of_chain_complex_d_squared(rng):
    A, B, ext = _ext("F3", "y^2 - x", ["x"])
    y, x = B.gen("y"), B.gen("x")
    E = koszul(B, [y, x + 1])
    P = ext.pushforward(E)
    P.check()
    assert P.total_rank == 2 * E.total_rank


def test_duality_isomorphism():
    A, B, ext = _ext("F5", "y^2 - 2", ["x"])
    M = koszul(A, [A.gen("x")])
    phi = ext.duality_isomorphism(M)
    phi.check()
    assert is_quasi_iso(phi)[0]
