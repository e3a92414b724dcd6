import random

import pytest

from deraz.cring import PolyAlgebra

VARS = ("x", "y", "z")


def finite_model(p: int, n: int) -> PolyAlgebra:
    """``F_p[x..]/(x^p - x)``: the ring of all functions on ``F_p^n``."""
    names = VARS[:n]
    return PolyAlgebra(f"F{p}", names, [f"{v}^{p} - {v}" for v in names])


def random_element(A: PolyAlgebra, rng: random.Random, terms: int = 3, degree: int = 2):
    F = A.field
    out = A.zero
    for _ in range(rng.randint(0, terms)):
        e = tuple(rng.randint(0, degree) for _ in range(A.nvars))
        c = rng.randint(-2, 2)
        if c:
            out = out + A.monomial(e, F(c))
    return out


@pytest.fixture
def rng():
    return random.Random(20261016)


def random_matrix(A: PolyAlgebra, rng: random.Random, r: int, c: int, density: float = 0.6):
    from deraz.scalars import Matrix
    return Matrix(A, [[random_element(A, rng) if rng.random() < density else A.zero for _ in range(c)]
                      for _ in range(r)], c)


def random_complex(A: PolyAlgebra, rng: random.Random, max_rank: int = 8):
    """A random bounded free complex of total rank at most ``max_rank``.

    Built from two-term pieces, Koszul complexes, tensor products and sums so
    that ``d^2 = 0`` holds by construction.
    """
    from deraz.complexes import FreeComplex, direct_sum, koszul, shift, tensor

    def two_term(budget):
        r = rng.randint(1, max(1, budget // 2))
        s = rng.randint(0, budget - r) if rng.random() < 0.3 else r
        s = min(s, budget - r)
        M = random_matrix(A, rng, s, r)
        return FreeComplex(A, rng.randint(-2, 1), [r, s], [M])

    kind = rng.choice(["two", "two", "koszul", "tensor", "sum"])
    if kind == "koszul":
        n = rng.randint(1, min(3, (max_rank).bit_length() - 1))
        return shift(koszul(A, [random_element(A, rng) for _ in range(n)]), rng.randint(-1, 1))
    if kind == "tensor":
        C = two_term(2)
        D = two_term(max(2, max_rank // C.total_rank))
        T = tensor(C, D)
        return T if T.total_rank <= max_rank else C
    if kind == "sum":
        C = two_term(max_rank // 2)
        D = two_term(max_rank - C.total_rank) if max_rank - C.total_rank >= 1 else C
        S = direct_sum(C, D)
        return S if S.total_rank <= max_rank else C
    return two_term(max_rank)


def fiber_acyclic_everywhere(C) -> tuple[bool, bool]:
    """(all fibers acyclic, some fiber acyclic) by plain rank counting at every point."""
    from deraz.cring import enumerate_points
    from deraz.cring.points import evaluate_matrix
    from deraz.scalars import rank
    flags = []
    for pt in enumerate_points(C.base):
        ok = True
        for i in C.degrees:
            din = evaluate_matrix(C.d(i - 1), pt)
            dout = evaluate_matrix(C.d(i), pt)
            ri = rank(din) if din.nrows and din.ncols else 0
            ro = rank(dout) if dout.nrows and dout.ncols else 0
            if C.rank(i) - ri - ro:
                ok = False
                break
        flags.append(ok)
    return all(flags), any(flags)
