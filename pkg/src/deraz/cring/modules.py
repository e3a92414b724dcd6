"""Submodules of free modules over a :class:`PolyAlgebra`.

Everything is computed in the free cover ``k[x]^r`` with the relations of
the algebra added as ``I * e_i``.  Syzygies and lifts come from one Groebner
basis of the augmented vectors ``(g_j, e_j)`` in a position-over-term order
that eliminates the ambient block.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from ..scalars import Matrix
from .groebner import entries_from, groebner_vectors, reduce_vector
from .poly import Element, PolyAlgebra


def _vec_terms(v: Sequence[Element], offset: int = 0) -> dict:
    out = {}
    for i, x in enumerate(v):
        for e, c in x.terms.items():
            out[(i + offset, e)] = c
    return out


class SubmoduleBasis:
    """Groebner basis of the submodule of ``A^rank`` generated by ``gens``.

    With ``track=True`` the basis also records how each element is built from
    the generators, which enables :meth:`lift` and :meth:`syzygies`.
    """

    def __init__(self, alg: PolyAlgebra, rank: int, gens: Sequence[Sequence[Element]], track: bool = False):
        self.alg = alg
        self.rank = rank
        self.gens = [tuple(alg(x) for x in g) for g in gens]
        for g in self.gens:
            if len(g) != rank:
                raise ValueError(f"generator of length {len(g)} in a module of rank {rank}")
        self.track = track
        m = len(self.gens)
        vecs = []
        for j, g in enumerate(self.gens):
            v = _vec_terms(g)
            if track:
                v[(rank + j, alg._zero_exp)] = alg.field.one
            if v:
                vecs.append(v)
        npos = rank + (m if track else 0)
        for q in alg.groebner:
            for i in range(npos):
                vecs.append({(i, e): c for e, c in q.items()})
        self.basis = groebner_vectors(vecs, alg.order)
        self._entries = entries_from(self.basis, alg.order)

    def _reduce(self, v: Sequence[Element]) -> dict:
        return reduce_vector(_vec_terms([self.alg(x) for x in v]), self._entries, self.alg.order)

    def contains(self, v: Sequence[Element]) -> bool:
        r = self._reduce(v)
        return not any(t[0] < self.rank for t in r)

    def lift(self, v: Sequence[Element]) -> list[Element] | None:
        """Coefficients ``c`` with ``sum c_j g_j = v``, or ``None``."""
        if not self.track:
            raise ValueError("lift needs a tracked basis")
        r = self._reduce(v)
        if any(t[0] < self.rank for t in r):
            return None
        coeffs = [dict() for _ in self.gens]
        for (p, e), c in r.items():
            coeffs[p - self.rank][e] = -c
        return [self.alg.element(c) for c in coeffs]

    def syzygies(self) -> list[tuple[Element, ...]]:
        """Generators of ``{c : sum c_j g_j = 0}`` in ``A^m``."""
        if not self.track:
            raise ValueError("syzygies need a tracked basis")
        m = len(self.gens)
        out = []
        seen = set()
        for v in self.basis:
            if all(t[0] >= self.rank for t in v):
                comps = [dict() for _ in range(m)]
                for (p, e), c in v.items():
                    comps[p - self.rank][e] = c
                s = tuple(self.alg.element(c) for c in comps)
                if any(s) and s not in seen:
                    seen.add(s)
                    out.append(s)
        return out


@dataclass(frozen=True)
class SubmodulePresentation:
    """Submodule of ``A^ambient_rank`` given by generators."""

    alg: PolyAlgebra
    ambient_rank: int
    generators: tuple

    def __post_init__(self):
        gens = tuple(tuple(self.alg(x) for x in g) for g in self.generators)
        for g in gens:
            if len(g) != self.ambient_rank:
                raise ValueError("every generator must have length ambient_rank")
        object.__setattr__(self, "generators", gens)

    @classmethod
    def from_matrix(cls, M: Matrix) -> "SubmodulePresentation":
        return cls(M.ring, M.nrows, tuple(M.columns()))

    def matrix(self) -> Matrix:
        if not self.generators:
            return Matrix(self.alg, [[] for _ in range(self.ambient_rank)], 0)
        return Matrix.from_columns(self.alg, self.ambient_rank, self.generators)

    def contains(self, v) -> bool:
        return SubmoduleBasis(self.alg, self.ambient_rank, self.generators).contains(v)


def module_syzygies(M: SubmodulePresentation) -> SubmodulePresentation:
    """Kernel of ``A^m -> A^r`` sending ``e_j`` to the ``j``-th generator."""
    m = len(M.generators)
    if m == 0:
        return SubmodulePresentation(M.alg, 0, ())
    sb = SubmoduleBasis(M.alg, M.ambient_rank, M.generators, track=True)
    return SubmodulePresentation(M.alg, m, tuple(sb.syzygies()))


def prune_presentation(P: Matrix) -> Matrix:
    """Drop unit pivots from a presentation matrix (cokernel and Fitting ideals unchanged)."""
    alg = P.ring
    rows = [list(r) for r in P.rows()]
    ncols = P.ncols
    while True:
        piv = None
        for i, r in enumerate(rows):
            for j, x in enumerate(r):
                if x and x.is_constant():
                    piv = (i, j)
                    break
            if piv:
                break
        if piv is None:
            break
        i, j = piv
        inv = 1 / rows[i][j].constant_value()
        prow = rows[i]
        new = []
        for a, r in enumerate(rows):
            if a == i:
                continue
            f = r[j]
            if f:
                f = f * inv
                r = [x - f * y for x, y in zip(r, prow)]
            new.append(r[:j] + r[j + 1:])
        rows = new
        ncols -= 1
    rows = [[x for x in r] for r in rows]
    keep = [j for j in range(ncols) if any(r[j] for r in rows)]
    return Matrix(alg, [[r[j] for j in keep] for r in rows], len(keep), check=False)


def determinant(M: Matrix) -> Element:
    """Determinant over a commutative ring by memoised Laplace expansion."""
    n = M.nrows
    if n != M.ncols:
        raise ValueError("determinant of a non-square matrix")
    alg = M.ring
    rows = M.rows()
    memo: dict = {}

    def det(r: int, cols: tuple) -> Element:
        if r == n:
            return alg.one
        key = (r, cols)
        if key in memo:
            return memo[key]
        total = alg.zero
        sign = 1
        for idx, c in enumerate(cols):
            a = rows[r][c]
            if a:
                sub = det(r + 1, cols[:idx] + cols[idx + 1:])
                if sub:
                    total = total + a * sub if sign > 0 else total - a * sub
            sign = -sign
        memo[key] = total
        return total

    return det(0, tuple(range(n)))


class TooManyMinors(RuntimeError):
    pass


def maximal_minors(M: Matrix, max_minors: int = 20000):
    """All ``s x s`` minors of an ``s x t`` matrix, in column-combination order.

    Laplace expansion along the rows with one memo shared by every minor, so a
    sub-minor on a given column set is computed once.
    """
    s, t = M.nrows, M.ncols
    alg = M.ring
    rows = M.rows()
    memo: dict = {}

    def det(cols: tuple) -> Element:
        r = s - len(cols)
        if r == s:
            return alg.one
        got = memo.get(cols)
        if got is not None:
            return got
        total = alg.zero
        sign = 1
        for idx, c in enumerate(cols):
            a = rows[r][c]
            if a:
                sub = det(cols[:idx] + cols[idx + 1:])
                if sub:
                    total = total + a * sub if sign > 0 else total - a * sub
            sign = -sign
        memo[cols] = total
        return total

    count = 0
    for cols in combinations(range(t), s):
        count += 1
        if count > max_minors:
            raise TooManyMinors(f"more than {max_minors} maximal minors")
        yield det(cols)


def fitting0(P: Matrix, max_minors: int = 20000):
    """Zeroth Fitting ideal of ``coker(P: A^t -> A^s)``: the ideal of ``s x s`` minors."""
    from .ideals import Ideal

    alg = P.ring
    Q = prune_presentation(P)
    s = Q.nrows
    if s == 0:
        return Ideal(alg, [alg.one])
    if Q.ncols < s:
        return Ideal(alg, [])
    gens = []
    seen = set()
    for d in maximal_minors(Q, max_minors):
        if not d:
            continue
        if d.is_constant():
            return Ideal(alg, [alg.one])
        if d in seen or -d in seen:
            continue
        seen.add(d)
        gens.append(d)
    return Ideal(alg, gens)
