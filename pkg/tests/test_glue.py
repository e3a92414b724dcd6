import pytest

from deraz.complexes import koszul, unit_complex
from deraz.cring import PolyAlgebra
from deraz.dgalg import matrix_algebra
from deraz.glue import (CocycleError, DegenerateInput, GluedComplex, GluedScheme, WindowError, affine_scheme,
                        cech_global_sections, extension_by_zero, glue_generator_two_patch, glued_direct_sum,
                        global_sections_dg_algebra, hypercohomology, koszul_complement_generator, line_bundle,
                        orthogonality_check, projective_line, structure_sheaf, verify_local_generator)

from laurent_oracle import line_bundle_cohomology


def _nonzero(d):
    return {k: v for k, v in d.items() if v}


@pytest.mark.parametrize("n", [-4, -3, -2, -1, 0, 1, 2, 3])
def test_line_bundles_match_laurent_oracle(n):
    X = projective_line("Q")
    h0, h1 = line_bundle_cohomology(n)
    assert _nonzero(hypercohomology(X, line_bundle(X, n))) == _nonzero({0: h0, 1: h1})


def test_cech_global_sections_is_a_complex_over_k():
    X = projective_line("F5")
    G = cech_global_sections(X, line_bundle(X, 2))
    assert G.base.nvars == 0
    assert sum(G.ranks) >= 3


def test_direct_sum_is_additive():
    X = projective_line("Q")
    E = glued_direct_sum(structure_sheaf(X), line_bundle(X, -2))
    assert _nonzero(hypercohomology(X, E)) == {0: 1, 1: 1}


def test_bad_gluing_rejected():
    U = PolyAlgebra("Q", ["t"])
    V = PolyAlgebra("Q", ["s"])
    with pytest.raises(CocycleError):
        GluedScheme({"U": U, "V": V}, {"f": ("t", "s"), "map": ["1/s"], "inverse": ["2/t"]})
    with pytest.raises(DegenerateInput):
        GluedScheme({"U": U, "V": V}, {"f": ("0", "s"), "map": ["1/s"], "inverse": ["1/t"]})


def test_comparison_must_be_quasi_iso():
    X = projective_line("Q")
    E = line_bundle(X, 1)
    bad = E.comparison.scale(0)
    with pytest.raises(CocycleError):
        GluedComplex(X, E.parts, bad)


def test_extension_by_zero_lives_on_one_patch():
    X = projective_line("Q")
    s = X.patches["V"].gen("s")
    F = extension_by_zero(X, koszul(X.patches["V"], [s]))
    assert F.parts["U"].total_rank == 0
    v = verify_local_generator(X, F)
    assert not v.holds and not v.per_patch["U"].holds
    # supported at the point s = 0: one dimension of global sections
    assert _nonzero(hypercohomology(X, F)) == {0: 1}


def test_p1_generator():
    X = projective_line("Q")
    E = glue_generator_two_patch(X, unit_complex(X.patches["U"]))
    assert verify_local_generator(X, E)
    gs = global_sections_dg_algebra(X, E)
    assert gs.proper
    assert _nonzero(gs.dimensions) == {-1: 1, 0: 5, 1: 4}
    gs.algebra.check()


def test_end_of_o_plus_o1_is_beilinson_algebra():
    X = projective_line("Q")
    E = glued_direct_sum(structure_sheaf(X), line_bundle(X, 1))
    gs = global_sections_dg_algebra(X, E)
    # Hom(O, O) + Hom(O(1), O(1)) + Hom(O, O(1)) = 1 + 1 + 2
    assert _nonzero(gs.dimensions) == {0: 4}
    assert not gs.algebra.is_commutative()


def test_affine_line_is_not_window_finite():
    A = PolyAlgebra("Q", ["t"])
    X = affine_scheme(A, "U", [1])
    with pytest.raises(WindowError):
        hypercohomology(X, structure_sheaf(X))


def test_affine_patch_global_sections():
    k = PolyAlgebra("Q", ())
    X = affine_scheme(k, "U")
    gs = global_sections_dg_algebra(X, matrix_algebra(k, 2))
    assert gs.proper and gs.dimensions == {0: 4}


def test_koszul_complement_and_orthogonality():
    A = PolyAlgebra("F3", ["x", "y"])
    x, y = A.gens
    K = koszul_complement_generator(A, [x, y])
    assert orthogonality_check(K, [x, y])
    v = orthogonality_check(K, [0])
    assert not v and v.degenerate


def test_complement_generator_tensored_with_algebra():
    A = PolyAlgebra("Q", ["x"])
    K = koszul_complement_generator(A, [A.gen("x")], matrix_algebra(A, 2))
    assert K.ranks == (4, 4)
