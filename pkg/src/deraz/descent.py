"""Standard etale data, splitting algebras and finite free pushforward."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations, product as iproduct
from typing import Sequence

from .complexes import CapExceeded, ChainMap, FreeComplex, hom_complex, tensor, unit_complex
from .cring import Element, Localization, PolyAlgebra, RingMap, enumerate_points, localize
from .cring.points import PointSpec
from .scalars import Matrix


class NotMonic(ValueError):
    pass


class BasisError(ValueError):
    """The extension is not free on the expected monomial basis."""


MAX_SPLITTING_DEGREE = 4


def polynomial_coefficients(A: PolyAlgebra, p, var: str = "X") -> list[Element]:
    """Coefficients ``a_0, .., a_d`` in ``A`` of a polynomial in ``var`` over ``A``."""
    big = PolyAlgebra(A.field, (var,) + A.variables, (), [(1, "lex")] + list(A.order.blocks))
    if isinstance(p, str):
        f = big.parse(p)
    elif isinstance(p, (list, tuple)):
        return [A(c) for c in p]
    else:
        f = big(p)
    coeffs: dict[int, dict] = {}
    for e, c in f.terms.items():
        coeffs.setdefault(e[0], {})[e[1:]] = c
    d = max(coeffs) if coeffs else 0
    return [A.element(coeffs.get(k, {})) for k in range(d + 1)]


def _check_monic(coeffs: Sequence[Element]) -> int:
    d = len(coeffs) - 1
    if d < 1 or coeffs[-1] != 1:
        raise NotMonic("the polynomial must be monic of degree at least 1")
    return d


@dataclass
class StandardEtaleData:
    """``A -> C = A[X]/(p) -> B = C[1/c]``."""

    base: PolyAlgebra
    coefficients: list
    C: PolyAlgebra
    c: Element
    B: Localization

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1


def standard_etale(A: PolyAlgebra, p, c=None, var: str = "X") -> StandardEtaleData:
    """``c`` defaults to the derivative ``p'(X)``."""
    coeffs = polynomial_coefficients(A, p, var)
    d = _check_monic(coeffs)
    C = A.extend([var], [_poly_from(coeffs)], "lex")
    X = C.gen(var)
    inc = A.include(C)
    if c is None:
        c = sum((inc(coeffs[k]) * k * X ** (k - 1) for k in range(1, d + 1)), C.zero)
    else:
        c = C.parse(c) if isinstance(c, str) else C(c)
    return StandardEtaleData(A, coeffs, C, c, localize(C, c))


def _poly_from(coeffs: Sequence[Element]) -> dict:
    out = {}
    for k, a in enumerate(coeffs):
        for e, v in a.terms.items():
            out[(k,) + e] = v
    return out


# splitting algebra ----------------------------------------------------------------

def elementary_symmetric(xs: Sequence[Element], i: int, zero: Element) -> Element:
    """``e_i(x_1, .., x_d)`` by the usual recursion."""
    e = [zero + 1] + [zero] * i
    for x in xs:
        for k in range(i, 0, -1):
            e[k] = e[k] + e[k - 1] * x
    return e[i]


@dataclass
class SplittingAlgebra:
    base: PolyAlgebra
    degree: int
    coefficients: list
    algebra: PolyAlgebra
    roots: tuple
    inclusion: RingMap
    rank: int

    def sigma(self, perm: Sequence[int]) -> RingMap:
        """``x_i -> x_{perm[i]}``, identity on the base."""
        C = self.algebra
        d = self.degree
        images = [self.roots[perm[i]] for i in range(d)] + [C.gen(v) for v in self.base.variables]
        return RingMap(C, C, images)

    def permutations(self):
        return list(permutations(range(self.degree)))

    def factorization_residues(self) -> list[Element]:
        """Coefficients of ``p(X) - prod (X - x_i)``; all zero when the identity holds."""
        C = self.algebra
        inc = self.inclusion
        prod = [C.one]  # coefficients of prod (X - x_i), low degree first
        for x in self.roots:
            new = [C.zero] * (len(prod) + 1)
            for k, a in enumerate(prod):
                new[k + 1] = new[k + 1] + a
                new[k] = new[k] - a * x
            prod = new
        return [inc(a) - b for a, b in zip(self.coefficients, prod)]


def _x_standard_count(C: PolyAlgebra, nx: int, limit: int = 10000) -> int:
    """Number of standard monomials in the first ``nx`` variables, checking freeness over the rest."""
    lead = C.leading_exponents()
    pure = []
    for l in lead:
        xs, ys = l[:nx], l[nx:]
        if any(xs) and any(ys):
            raise BasisError("a leading term mixes new and old variables")
        if any(xs):
            pure.append(xs)
    bounds = []
    for i in range(nx):
        b = [x[i] for x in pure if x[i] and sum(x) == x[i]]
        if not b:
            raise BasisError("the extension is not finite")
        bounds.append(min(b))
    count = 0
    for e in iproduct(*[range(b) for b in bounds]):
        if not any(all(a <= b for a, b in zip(l, e)) for l in pure):
            count += 1
            if count > limit:
                raise CapExceeded("too many standard monomials")
    return count


def splitting_algebra(A: PolyAlgebra, p, d: int | None = None, var: str = "X") -> SplittingAlgebra:
    """``A[x_1..x_d]/(e_i(x) - (-1)^i a_{d-i})`` for monic ``p = sum a_j X^j``."""
    coeffs = polynomial_coefficients(A, p, var)
    deg = _check_monic(coeffs)
    if d is not None and d != deg:
        raise NotMonic(f"polynomial has degree {deg}, not {d}")
    d = deg
    if d > MAX_SPLITTING_DEGREE:
        raise CapExceeded(f"splitting algebras are limited to degree {MAX_SPLITTING_DEGREE}")
    names = [f"x{i + 1}" for i in range(d)]
    while any(n in A.variables for n in names):
        names = ["_" + n for n in names]
    free = A.extend(names, [], "lex")
    xs = [free.gen(n) for n in names]
    inc0 = A.include(free)
    rels = []
    for i in range(1, d + 1):
        e = elementary_symmetric(xs, i, free.zero)
        a = inc0(coeffs[d - i])
        rels.append(e - (a if i % 2 == 0 else -a))
    C = A.extend(names, [dict(r.terms) for r in rels], "lex")
    inc = A.include(C)
    rank = _x_standard_count(C, d)
    roots = tuple(C.gen(n) for n in names)
    return SplittingAlgebra(A, d, coeffs, C, roots, inc, rank)


@dataclass
class CoveringResult:
    holds: bool
    checked: int
    witness: PointSpec | None = None
    note: str = "point-sampled: only the listed points were checked"

    def __bool__(self):
        return self.holds


def sigma_orbit_covering_check(S: SplittingAlgebra, c, points: Sequence[PointSpec] | None = None,
                               var: str = "X") -> CoveringResult:
    """Every point of ``C'`` has some root ``x_i`` with ``c(x_i)`` invertible there.

    ``c`` is an element of ``A[X]`` (or ``A[X]/(p)``), given as a polynomial in ``var``.
    """
    C = S.algebra
    coeffs = polynomial_coefficients(S.base, c, var)
    vals = []
    for x in S.roots:
        v = C.zero
        for k, a in enumerate(coeffs):
            v = v + S.inclusion(a) * x ** k
        vals.append(v)
    pts = list(points) if points is not None else list(enumerate_points(C))
    for pt in pts:
        if pt.alg is not C:
            raise ValueError("points must be points of the splitting algebra")
        if not any(pt(v) for v in vals):
            return CoveringResult(False, len(pts), pt)
    return CoveringResult(True, len(pts))


# finite free extensions ------------------------------------------------------------------

class FiniteFreeExtension:
    """``A -> B`` where ``B`` was built by :meth:`PolyAlgebra.extend` and is free on its
    standard monomials in the new variables."""

    def __init__(self, A: PolyAlgebra, B: PolyAlgebra):
        nx = B.nvars - A.nvars
        if B.variables[nx:] != A.variables or B.field is not A.field:
            raise BasisError("B must be built from A by adjoining variables in front")
        self.A, self.B, self.nx = A, B, nx
        lead = B.leading_exponents()
        for l in lead:
            if any(l[:nx]) and any(l[nx:]):
                raise BasisError("a leading term mixes new and old variables")
        inc = A.include(B)
        self.inclusion = inc
        for l, g in B._gb:
            if not any(l[:nx]):
                # relations purely in the base must already hold in A
                if A.element({e[nx:]: c for e, c in g.items()}):
                    raise BasisError("B is not faithful over A")
        pure = [l[:nx] for l in lead if any(l[:nx])]
        bounds = []
        for i in range(nx):
            b = [x[i] for x in pure if x[i] and sum(x) == x[i]]
            if not b:
                raise BasisError("B is not finite over A")
            bounds.append(min(b))
        basis = [e for e in iproduct(*[range(b) for b in bounds])
                 if not any(all(a <= b for a, b in zip(l, e)) for l in pure)]
        basis.sort(key=lambda e: (sum(e), e))
        self.basis_exponents = basis
        self.rank = len(basis)
        self._index = {e: i for i, e in enumerate(basis)}
        self.basis = [B.monomial(e + (0,) * A.nvars) for e in basis]

    def coordinates(self, b) -> list[Element]:
        b = self.B(b)
        A = self.A
        coords: list[dict] = [dict() for _ in self.basis]
        for e, c in b.terms.items():
            k = self._index.get(e[:self.nx])
            if k is None:
                raise BasisError(f"{b} is not in the span of the basis")
            coords[k][e[self.nx:]] = c
        return [A.element(t) for t in coords]

    def regular_matrix(self, b) -> Matrix:
        """Matrix of ``x -> b x`` on the basis."""
        b = self.B(b)
        cols = [self.coordinates(b * v) for v in self.basis]
        return Matrix.from_columns(self.A, self.rank, cols)

    def trace(self, b) -> Element:
        M = self.regular_matrix(b)
        t = self.A.zero
        for i in range(self.rank):
            t = t + M[i, i]
        return t

    def dual_action(self, b) -> Matrix:
        """Action of ``b`` on ``B^v = Hom_A(B, A)`` in the dual basis: ``(b f)(x) = f(x b)``."""
        return self.regular_matrix(b).T

    def dual_module(self) -> FreeComplex:
        """``B^v`` as an ``A``-complex (free of rank ``m`` in degree 0)."""
        return unit_complex(self.A, 0, self.rank)

    def pushforward(self, E: FreeComplex) -> FreeComplex:
        if E.base is not self.B:
            raise BasisError("complex does not live over B")
        m = self.rank
        A = self.A
        diffs = {}
        for i in range(E.lo, E.hi):
            d = E.d(i)
            rows = [[A.zero] * (d.ncols * m) for _ in range(d.nrows * m)]
            for a in range(d.nrows):
                for b in range(d.ncols):
                    if d[a, b]:
                        R = self.regular_matrix(d[a, b])
                        for u in range(m):
                            for v in range(m):
                                rows[a * m + u][b * m + v] = R[u, v]
            diffs[i] = Matrix(A, rows, d.ncols * m, check=False)
        return FreeComplex(A, E.lo, [r * m for r in E.ranks], diffs)

    def pushforward_of_upper_shriek(self, M: FreeComplex) -> FreeComplex:
        """``p_* p^! M = Hom_A(B, M)`` as an ``A``-complex."""
        return hom_complex(unit_complex(self.A, 0, self.rank), M)

    def duality_isomorphism(self, M: FreeComplex) -> ChainMap:
        """The canonical isomorphism ``Hom_A(B, M) -> B^v (x)_A M`` (a permutation)."""
        H = self.pushforward_of_upper_shriek(M)
        T = tensor(self.dual_module(), M)
        A = self.A
        m = self.rank
        comps = {}
        for n in H.degrees:
            r = M.rank(n)
            entries = {}
            for row in range(r):
                for c in range(m):
                    entries[(c * r + row, row * m + c)] = A.one
            comps[n] = Matrix.from_dict(A, T.rank(n), H.rank(n), entries)
        return ChainMap(H, T, comps)


def finite_flat_pushforward(ext: FiniteFreeExtension, E: FreeComplex) -> FreeComplex:
    return ext.pushforward(E)
