"""Bounded complexes of finite free modules over a :class:`PolyAlgebra`.

Indexing is cohomological: ``d^i : C^i -> C^{i+1}``.  Matrices act on
column vectors, so ``d^i`` has shape ``rank(i+1) x rank(i)``.

Sign conventions used throughout the package:

* shift ``C[n]^i = C^{i+n}`` with differential ``(-1)^n d``;
* cone of ``f: C -> D`` is ``C^{n+1} + D^n`` with ``d = [[-d_C, 0], [f, d_D]]``;
* tensor ``d(x (x) y) = dx (x) y + (-1)^|x| x (x) dy``;
* ``Hom^n = prod_i Hom(C^i, D^{i+n})`` with ``delta f = d f - (-1)^n f d``.

Basis orders: the tensor piece ``(C (x) D)^n`` lists ``C^i (x) D^{n-i}`` for
increasing ``i``, each block row-major (``a * rank D^j + b``).  ``Hom^n``
lists ``Hom(C^i, D^{i+n})`` for increasing ``i``, each block as matrix units
row-major (``r * rank C^i + c``).
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .cring import (Ideal, PolyAlgebra, RingMap, SubmoduleBasis, fitting0, localize, module_syzygies,
                    SubmodulePresentation)
from .cring.points import PointSpec, point_map
from .scalars import Matrix, block_matrix, rank as field_rank


class RingMismatch(ValueError):
    """Objects over different base algebras were combined."""


class CapExceeded(RuntimeError):
    """A configured size bound was exceeded."""


class NotAComplex(ValueError):
    """``d^2 != 0`` or the matrix shapes do not fit."""


class NotAChainMap(ValueError):
    """Components do not commute with the differentials."""


@dataclass
class Limits:
    rank_cap: int = 512
    threads: int = 1


LIMITS = Limits()


def _sign(n: int) -> int:
    return -1 if n % 2 else 1


def _zero(A: PolyAlgebra, r: int, c: int) -> Matrix:
    return Matrix.zeros(A, r, c)


class FreeComplex:
    """``0 -> A^{r_lo} -> ... -> A^{r_hi} -> 0`` with explicit differentials.

    ``diffs[k]`` is the differential leaving degree ``lo + k``; missing
    entries mean zero maps.
    """

    def __init__(self, base: PolyAlgebra, lo: int, ranks: Sequence[int], diffs: Sequence[Matrix] | dict = (),
                 check: bool = True, cap: int | None = None):
        self.base = base
        ranks = list(ranks)
        if isinstance(diffs, dict):
            dd = dict(diffs)
        else:
            dd = {lo + k: m for k, m in enumerate(diffs)}
        # trim zero ranks at both ends so equal complexes compare equal
        while ranks and ranks[0] == 0:
            ranks.pop(0)
            lo += 1
        while ranks and ranks[-1] == 0:
            ranks.pop()
        if not ranks:
            lo = 0
        self.lo = lo
        self.ranks = tuple(ranks)
        cap = LIMITS.rank_cap if cap is None else cap
        if cap and sum(self.ranks) > cap:
            raise CapExceeded(f"total rank {sum(self.ranks)} exceeds the cap {cap}")
        self._d = {}
        for i in range(self.lo, self.hi):
            m = dd.get(i)
            shape = (self.rank(i + 1), self.rank(i))
            if m is None:
                m = _zero(base, *shape)
            else:
                if not isinstance(m, Matrix) or m.ring is not base:
                    m = Matrix(base, m.rows() if isinstance(m, Matrix) else m, shape[1])
                if m.shape != shape:
                    raise NotAComplex(f"d^{i} has shape {m.shape}, expected {shape}")
            self._d[i] = m
        for i, m in dd.items():
            if i not in self._d and isinstance(m, Matrix) and not m.is_zero():
                raise NotAComplex(f"nonzero d^{i} outside the degree range")
        if check:
            self.check()

    # basic data ---------------------------------------------------------
    @property
    def hi(self) -> int:
        return self.lo + len(self.ranks) - 1

    @property
    def degrees(self) -> range:
        return range(self.lo, self.hi + 1)

    def rank(self, i: int) -> int:
        k = i - self.lo
        return self.ranks[k] if 0 <= k < len(self.ranks) else 0

    def d(self, i: int) -> Matrix:
        m = self._d.get(i)
        if m is None:
            return _zero(self.base, self.rank(i + 1), self.rank(i))
        return m

    @property
    def total_rank(self) -> int:
        return sum(self.ranks)

    def euler_characteristic(self) -> int:
        return sum(_sign(i) * self.rank(i) for i in self.degrees)

    def is_zero(self) -> bool:
        return self.total_rank == 0

    def check(self):
        for i in range(self.lo, self.hi - 1):
            if not (self.d(i + 1) @ self.d(i)).is_zero():
                raise NotAComplex(f"d^{i + 1} d^{i} != 0")

    def offsets(self) -> dict[int, int]:
        """Position of the first basis element of each degree in the total basis."""
        out = {}
        s = 0
        for i in self.degrees:
            out[i] = s
            s += self.rank(i)
        return out

    def basis_degrees(self) -> list[int]:
        return [i for i in self.degrees for _ in range(self.rank(i))]

    def __eq__(self, other):
        if not isinstance(other, FreeComplex):
            return NotImplemented
        return (self.base is other.base and self.lo == other.lo and self.ranks == other.ranks
                and all(self.d(i) == other.d(i) for i in self.degrees))

    def __hash__(self):
        return hash((self.lo, self.ranks))

    def __repr__(self):
        if not self.ranks:
            return f"FreeComplex(0 over {self.base})"
        return f"FreeComplex({self.base}, degrees [{self.lo},{self.hi}], ranks {list(self.ranks)})"

    def describe(self) -> str:
        lines = [f"complex over {self.base}: degrees [{self.lo}, {self.hi}], ranks {list(self.ranks)}"]
        for i in range(self.lo, self.hi):
            m = self.d(i)
            if m.nrows and m.ncols:
                body = "; ".join("[" + ", ".join(str(a) for a in r) + "]" for r in m.rows())
                lines.append(f"  d[{i}] = [{body}]")
        return "\n".join(lines)

    # constructions ---------------------------------------------------------
    def base_change(self, phi: RingMap) -> "FreeComplex":
        if phi.domain is not self.base:
            raise RingMismatch("ring map does not start at the base of the complex")
        B = phi.codomain
        diffs = {i: self.d(i).map(phi, B) for i in range(self.lo, self.hi)}
        return FreeComplex(B, self.lo, self.ranks, diffs, check=False, cap=0)

    def localize(self, f) -> "FreeComplex":
        return self.base_change(localize(self.base, f).map)

    def at_point(self, pt: PointSpec) -> "FreeComplex":
        return self.base_change(point_map(pt))


def unit_complex(A: PolyAlgebra, degree: int = 0, rank: int = 1) -> FreeComplex:
    """``A^rank`` concentrated in one degree."""
    return FreeComplex(A, degree, [rank])


def zero_complex(A: PolyAlgebra) -> FreeComplex:
    return FreeComplex(A, 0, [])


def complex_from_lists(A: PolyAlgebra, lo: int, ranks: Sequence[int], diffs: dict | Sequence) -> FreeComplex:
    """Build a complex from nested lists of entries (strings, ints or elements)."""
    if isinstance(diffs, dict):
        items = diffs.items()
    else:
        items = ((lo + k, m) for k, m in enumerate(diffs))
    ranks = list(ranks)
    out = {}
    for i, m in items:
        r = ranks[i + 1 - lo] if 0 <= i + 1 - lo < len(ranks) else 0
        c = ranks[i - lo] if 0 <= i - lo < len(ranks) else 0
        out[i] = Matrix(A, m, c) if r else Matrix(A, [], c)
        if out[i].shape != (r, c):
            raise NotAComplex(f"d[{i}] has shape {out[i].shape}, expected {(r, c)}")
    return FreeComplex(A, lo, ranks, out)


class ChainMap:
    """Degreewise matrices ``f^i : C^i -> D^i`` commuting with the differentials."""

    def __init__(self, source: FreeComplex, target: FreeComplex, components: dict | None = None,
                 check: bool = True):
        if source.base is not target.base:
            raise RingMismatch("chain map between complexes over different bases")
        self.source = source
        self.target = target
        A = source.base
        comps = {}
        components = components or {}
        for i in sorted(set(source.degrees) | set(target.degrees)):
            shape = (target.rank(i), source.rank(i))
            m = components.get(i)
            if m is None:
                m = _zero(A, *shape)
            elif not isinstance(m, Matrix) or m.ring is not A:
                m = Matrix(A, m.rows() if isinstance(m, Matrix) else m, shape[1])
            if m.shape != shape:
                raise NotAChainMap(f"component {i} has shape {m.shape}, expected {shape}")
            comps[i] = m
        self._c = comps
        if check:
            self.check()

    @property
    def base(self) -> PolyAlgebra:
        return self.source.base

    def __getitem__(self, i: int) -> Matrix:
        m = self._c.get(i)
        if m is None:
            return _zero(self.base, self.target.rank(i), self.source.rank(i))
        return m

    def check(self):
        for i in sorted(self._c):
            lhs = self.target.d(i) @ self[i]
            rhs = self[i + 1] @ self.source.d(i)
            if lhs != rhs:
                raise NotAChainMap(f"maps do not commute with d in degree {i}")

    def compose(self, other: "ChainMap") -> "ChainMap":
        """``self`` after ``other``."""
        comps = {i: self[i] @ other[i] for i in other.source.degrees}
        return ChainMap(other.source, self.target, comps, check=False)

    def __matmul__(self, other: "ChainMap") -> "ChainMap":
        return self.compose(other)

    def __add__(self, other: "ChainMap") -> "ChainMap":
        comps = {i: self[i] + other[i] for i in self.source.degrees}
        return ChainMap(self.source, self.target, comps, check=False)

    def scale(self, a) -> "ChainMap":
        a = self.base(a)
        return ChainMap(self.source, self.target, {i: m.scale(a) for i, m in self._c.items()}, check=False)

    def __eq__(self, other):
        if not isinstance(other, ChainMap):
            return NotImplemented
        degs = set(self.source.degrees) | set(self.target.degrees)
        return (self.source == other.source and self.target == other.target
                and all(self[i] == other[i] for i in degs))

    __hash__ = None

    def base_change(self, phi: RingMap) -> "ChainMap":
        S, T = self.source.base_change(phi), self.target.base_change(phi)
        return ChainMap(S, T, {i: m.map(phi, phi.codomain) for i, m in self._c.items()}, check=False)

    def __repr__(self):
        return f"ChainMap({self.source!r} -> {self.target!r})"


def identity_map(C: FreeComplex) -> ChainMap:
    return ChainMap(C, C, {i: Matrix.identity(C.base, C.rank(i)) for i in C.degrees}, check=False)


def zero_map(C: FreeComplex, D: FreeComplex) -> ChainMap:
    return ChainMap(C, D, {}, check=False)


def multiplication_map(C: FreeComplex, a) -> ChainMap:
    """``x -> a x`` on ``C``."""
    return identity_map(C).scale(a)


# shift, sums, cones -----------------------------------------------------------

def shift(C: FreeComplex, n: int) -> FreeComplex:
    s = _sign(n)
    diffs = {i - n: (C.d(i) if s == 1 else -C.d(i)) for i in range(C.lo, C.hi)}
    return FreeComplex(C.base, C.lo - n, C.ranks, diffs, check=False, cap=0)


def shift_map(f: ChainMap, n: int) -> ChainMap:
    return ChainMap(shift(f.source, n), shift(f.target, n), {i - n: f[i] for i in f.source.degrees},
                    check=False)


def direct_sum(*Cs: FreeComplex) -> FreeComplex:
    if not Cs:
        raise ValueError("direct_sum needs at least one complex")
    A = Cs[0].base
    for C in Cs:
        if C.base is not A:
            raise RingMismatch("direct sum of complexes over different bases")
    nonempty = [C for C in Cs if C.ranks]
    if not nonempty:
        return zero_complex(A)
    lo = min(C.lo for C in nonempty)
    hi = max(C.hi for C in nonempty)
    ranks = [sum(C.rank(i) for C in Cs) for i in range(lo, hi + 1)]
    diffs = {}
    for i in range(lo, hi):
        blocks = [[C.d(i) if C is D else None for C in Cs] for D in Cs]
        diffs[i] = block_matrix(A, blocks, [C.rank(i + 1) for C in Cs], [C.rank(i) for C in Cs])
    return FreeComplex(A, lo, ranks, diffs, check=False)


def direct_sum_map(*fs: ChainMap) -> ChainMap:
    S = direct_sum(*[f.source for f in fs])
    T = direct_sum(*[f.target for f in fs])
    comps = {}
    for i in S.degrees:
        blocks = [[f[i] if f is g else None for f in fs] for g in fs]
        comps[i] = block_matrix(S.base, blocks, [f.target.rank(i) for f in fs], [f.source.rank(i) for f in fs])
    return ChainMap(S, T, comps, check=False)


def cone(f: ChainMap) -> FreeComplex:
    """Mapping cone ``C[1] + D`` of ``f: C -> D``."""
    C, D, A = f.source, f.target, f.base
    degs = [n for n in range(min(C.lo - 1, D.lo), max(C.hi - 1, D.hi) + 1)]
    if not C.ranks and not D.ranks:
        return zero_complex(A)
    ranks = [C.rank(n + 1) + D.rank(n) for n in degs]
    diffs = {}
    for n in degs[:-1]:
        rows = [C.rank(n + 2), D.rank(n + 1)]
        cols = [C.rank(n + 1), D.rank(n)]
        diffs[n] = block_matrix(A, [[-C.d(n + 1), None], [f[n + 1], D.d(n)]], rows, cols)
    return FreeComplex(A, degs[0], ranks, diffs, check=False)


def cone_inclusion(f: ChainMap) -> ChainMap:
    """``D -> cone(f)``."""
    Z = cone(f)
    C, D, A = f.source, f.target, f.base
    comps = {n: block_matrix(A, [[None], [Matrix.identity(A, D.rank(n))]], [C.rank(n + 1), D.rank(n)], [D.rank(n)])
             for n in D.degrees}
    return ChainMap(D, Z, comps, check=False)


def cone_projection(f: ChainMap) -> ChainMap:
    """``cone(f) -> C[1]``."""
    Z = cone(f)
    C, D, A = f.source, f.target, f.base
    C1 = shift(C, 1)
    comps = {n: block_matrix(A, [[Matrix.identity(A, C.rank(n + 1)), None]], [C.rank(n + 1)],
                             [C.rank(n + 1), D.rank(n)]) for n in Z.degrees}
    return ChainMap(Z, C1, comps, check=False)


# tensor products ----------------------------------------------------------------

class TensorLayout:
    """Index bookkeeping for ``(C (x) D)^n``."""

    def __init__(self, C: FreeComplex, D: FreeComplex):
        self.C, self.D = C, D
        self.blocks: dict[int, list[tuple[int, int, int]]] = {}
        self.ranks: dict[int, int] = {}
        if not C.ranks or not D.ranks:
            return
        for n in range(C.lo + D.lo, C.hi + D.hi + 1):
            off = 0
            bl = []
            for i in C.degrees:
                j = n - i
                if D.rank(j) and C.rank(i):
                    bl.append((i, j, off))
                    off += C.rank(i) * D.rank(j)
            self.blocks[n] = bl
            self.ranks[n] = off

    def index(self, i: int, a: int, j: int, b: int) -> int:
        """Position of ``e_a (x) e_b`` (``e_a`` in ``C^i``, ``e_b`` in ``D^j``) in degree ``i + j``."""
        for ii, jj, off in self.blocks[i + j]:
            if ii == i:
                return off + a * self.D.rank(j) + b
        raise KeyError((i, j))

    def pairs(self, n: int):
        """``(pos, i, a, j, b)`` for every basis element of degree ``n``."""
        for i, j, off in self.blocks.get(n, ()):
            rd = self.D.rank(j)
            for a in range(self.C.rank(i)):
                for b in range(rd):
                    yield off + a * rd + b, i, a, j, b


def tensor(C: FreeComplex, D: FreeComplex) -> FreeComplex:
    """Total complex of ``C (x)_A D`` with the Koszul sign on the second factor."""
    if C.base is not D.base:
        raise RingMismatch("tensor product of complexes over different bases")
    A = C.base
    L = TensorLayout(C, D)
    if not L.ranks:
        return zero_complex(A)
    degs = sorted(L.ranks)
    diffs = {}
    for n in degs[:-1]:
        entries = {}
        for pos, i, a, j, b in L.pairs(n):
            dC = C.d(i)
            for a2 in range(C.rank(i + 1)):
                v = dC[a2, a]
                if v:
                    q = L.index(i + 1, a2, j, b)
                    entries[(q, pos)] = entries.get((q, pos), A.zero) + v
            dD = D.d(j)
            s = _sign(i)
            for b2 in range(D.rank(j + 1)):
                v = dD[b2, b]
                if v:
                    q = L.index(i, a, j + 1, b2)
                    entries[(q, pos)] = entries.get((q, pos), A.zero) + (v if s == 1 else -v)
        diffs[n] = Matrix.from_dict(A, L.ranks[n + 1], L.ranks[n], entries)
    return FreeComplex(A, degs[0], [L.ranks[n] for n in degs], diffs, check=False)


def tensor_maps(f: ChainMap, g: ChainMap) -> ChainMap:
    """``f (x) g`` for degree-0 chain maps (no signs arise)."""
    S = tensor(f.source, g.source)
    T = tensor(f.target, g.target)
    LS = TensorLayout(f.source, g.source)
    LT = TensorLayout(f.target, g.target)
    A = f.base
    comps = {}
    for n in S.degrees:
        entries = {}
        for pos, i, a, j, b in LS.pairs(n):
            fi, gj = f[i], g[j]
            for a2 in range(f.target.rank(i)):
                x = fi[a2, a]
                if not x:
                    continue
                for b2 in range(g.target.rank(j)):
                    y = gj[b2, b]
                    if y:
                        q = LT.index(i, a2, j, b2)
                        entries[(q, pos)] = entries.get((q, pos), A.zero) + x * y
        comps[n] = Matrix.from_dict(A, T.rank(n), S.rank(n), entries)
    return ChainMap(S, T, comps, check=False)


def tensor_associator(C: FreeComplex, D: FreeComplex, E: FreeComplex) -> ChainMap:
    """Canonical isomorphism ``(C (x) D) (x) E -> C (x) (D (x) E)`` (a permutation, no signs)."""
    CD, DE = tensor(C, D), tensor(D, E)
    L1, L2 = TensorLayout(C, D), TensorLayout(CD, E)
    R1, R2 = TensorLayout(D, E), TensorLayout(C, DE)
    S, T = tensor(CD, E), tensor(C, DE)
    A = C.base
    comps = {}
    for n in S.degrees:
        entries = {}
        for pos, m, ab, k, c in L2.pairs(n):
            for p1, i, a, j, b in L1.pairs(m):
                if p1 == ab:
                    q = R2.index(i, a, j + k, R1.index(j, b, k, c))
                    entries[(q, pos)] = A.one
                    break
        comps[n] = Matrix.from_dict(A, T.rank(n), S.rank(n), entries)
    return ChainMap(S, T, comps)


def tensor_braiding(C: FreeComplex, D: FreeComplex) -> ChainMap:
    """``x (x) y -> (-1)^{|x||y|} y (x) x``."""
    S, T = tensor(C, D), tensor(D, C)
    LS, LT = TensorLayout(C, D), TensorLayout(D, C)
    A = C.base
    comps = {}
    for n in S.degrees:
        entries = {}
        for pos, i, a, j, b in LS.pairs(n):
            entries[(LT.index(j, b, i, a), pos)] = A.one if _sign(i * j) == 1 else -A.one
        comps[n] = Matrix.from_dict(A, T.rank(n), S.rank(n), entries)
    return ChainMap(S, T, comps)


def left_unitor(C: FreeComplex) -> ChainMap:
    """``A (x) C -> C``."""
    U = unit_complex(C.base)
    S = tensor(U, C)
    return ChainMap(S, C, {i: Matrix.identity(C.base, C.rank(i)) for i in C.degrees})


# Hom complexes --------------------------------------------------------------------

class HomLayout:
    """Index bookkeeping for ``Hom^n(C, D)``."""

    def __init__(self, C: FreeComplex, D: FreeComplex):
        self.C, self.D = C, D
        self.blocks: dict[int, list[tuple[int, int]]] = {}
        self.ranks: dict[int, int] = {}
        if not C.ranks or not D.ranks:
            return
        for n in range(D.lo - C.hi, D.hi - C.lo + 1):
            off = 0
            bl = []
            for i in C.degrees:
                if C.rank(i) and D.rank(i + n):
                    bl.append((i, off))
                    off += C.rank(i) * D.rank(i + n)
            self.blocks[n] = bl
            self.ranks[n] = off

    def index(self, n: int, i: int, r: int, c: int) -> int:
        """Position of the matrix unit ``E_{rc}: C^i -> D^{i+n}`` in ``Hom^n``."""
        for ii, off in self.blocks[n]:
            if ii == i:
                return off + r * self.C.rank(i) + c
        raise KeyError((n, i))

    def units(self, n: int):
        """``(pos, i, r, c)`` for every matrix unit of degree ``n``."""
        for i, off in self.blocks.get(n, ()):
            rc = self.C.rank(i)
            for r in range(self.D.rank(i + n)):
                for c in range(rc):
                    yield off + r * rc + c, i, r, c

    def to_matrices(self, n: int, vec: Sequence) -> dict[int, Matrix]:
        """Split a vector of ``Hom^n`` into its components ``C^i -> D^{i+n}``."""
        A = self.C.base
        out = {}
        for i, off in self.blocks.get(n, ()):
            rc, rd = self.C.rank(i), self.D.rank(i + n)
            out[i] = Matrix(A, [[vec[off + r * rc + c] for c in range(rc)] for r in range(rd)], rc, check=False)
        return out

    def from_matrices(self, n: int, mats: dict[int, Matrix]) -> list:
        A = self.C.base
        vec = [A.zero] * self.ranks.get(n, 0)
        for i, off in self.blocks.get(n, ()):
            m = mats.get(i)
            if m is None:
                continue
            rc = self.C.rank(i)
            for r in range(m.nrows):
                for c in range(m.ncols):
                    vec[off + r * rc + c] = m[r, c]
        return vec


def hom_complex(C: FreeComplex, D: FreeComplex) -> FreeComplex:
    if C.base is not D.base:
        raise RingMismatch("Hom between complexes over different bases")
    A = C.base
    L = HomLayout(C, D)
    if not L.ranks:
        return zero_complex(A)
    degs = sorted(L.ranks)
    diffs = {}
    for n in degs[:-1]:
        entries = {}
        s = _sign(n)
        for pos, i, r, c in L.units(n):
            # d_D o E_rc : C^i -> D^{i+n+1}
            dD = D.d(i + n)
            for r2 in range(D.rank(i + n + 1)):
                v = dD[r2, r]
                if v:
                    q = L.index(n + 1, i, r2, c)
                    entries[(q, pos)] = entries.get((q, pos), A.zero) + v
            # -(-1)^n E_rc o d_C : C^{i-1} -> D^{i+n}
            dC = C.d(i - 1)
            for c2 in range(C.rank(i - 1)):
                v = dC[c, c2]
                if v:
                    q = L.index(n + 1, i - 1, r, c2)
                    entries[(q, pos)] = entries.get((q, pos), A.zero) + (-v if s == 1 else v)
        diffs[n] = Matrix.from_dict(A, L.ranks[n + 1], L.ranks[n], entries)
    return FreeComplex(A, degs[0], [L.ranks[n] for n in degs], diffs, check=False)


def koszul(A: PolyAlgebra, fs: Sequence) -> FreeComplex:
    """``K(f_1) (x) ... (x) K(f_n)`` with ``K(f) = cone(x f : A -> A)``, ranks in degrees ``-n..0``."""
    fs = [A(f) for f in fs]
    if not fs:
        raise ValueError("koszul needs at least one element")
    U = unit_complex(A)
    K = None
    for f in fs:
        Kf = cone(multiplication_map(U, f))
        K = Kf if K is None else tensor(K, Kf)
    return K


# homology ---------------------------------------------------------------------------

def _to_field(M: Matrix):
    F = M.ring.field
    return Matrix(F, [[a.constant_value() for a in r] for r in M.rows()], M.ncols, check=False)


def _field_base(A: PolyAlgebra) -> bool:
    return A.nvars == 0


@dataclass
class DegreeHomology:
    """``H^i = ker d^i / im d^{i-1}`` for one degree."""

    degree: int
    complex: FreeComplex = field(repr=False)
    is_zero: bool
    dimension: int | None = None  # over a field base
    kernel: list = field(default_factory=list, repr=False)
    image: list = field(default_factory=list, repr=False)
    _presentation: Matrix | None = field(default=None, repr=False)
    _fitting: Ideal | None = field(default=None, repr=False)

    def presentation(self) -> Matrix:
        """Matrix ``P`` with ``H^i = coker P`` (columns are relations among the kernel generators)."""
        if self._presentation is None:
            A = self.complex.base
            r = self.complex.rank(self.degree)
            gens = self.kernel
            rels = []
            if gens:
                sb = SubmoduleBasis(A, r, gens, track=True)
                for v in self.image:
                    c = sb.lift(v)
                    if c is None:
                        raise ArithmeticError("image is not contained in the kernel")
                    rels.append(tuple(c))
                rels.extend(sb.syzygies())
            k = len(gens)
            self._presentation = Matrix.from_columns(A, k, rels) if rels else Matrix(A, [[] for _ in range(k)], 0)
        return self._presentation

    def fitting0(self) -> Ideal:
        if self._fitting is None:
            self._fitting = fitting0(self.presentation())
        return self._fitting


@dataclass
class HomologyReport:
    complex: FreeComplex = field(repr=False)
    degrees: dict[int, DegreeHomology]

    def is_acyclic(self) -> bool:
        return all(h.is_zero for h in self.degrees.values())

    def nonzero_degrees(self) -> list[int]:
        return [i for i, h in sorted(self.degrees.items()) if not h.is_zero]

    def dimensions(self) -> dict[int, int] | None:
        if any(h.dimension is None for h in self.degrees.values()):
            return None
        return {i: h.dimension for i, h in sorted(self.degrees.items())}

    def total_dimension(self) -> int | None:
        dims = self.dimensions()
        return None if dims is None else sum(dims.values())

    def __getitem__(self, i: int) -> DegreeHomology:
        return self.degrees[i]

    def summary(self) -> str:
        dims = self.dimensions()
        if dims is not None:
            return ", ".join(f"H^{i}={d}" for i, d in dims.items()) or "zero complex"
        return ", ".join(f"H^{i}={'0' if h.is_zero else 'nonzero'}" for i, h in sorted(self.degrees.items()))


def _degree_homology(C: FreeComplex, i: int) -> DegreeHomology:
    A = C.base
    r = C.rank(i)
    if A.is_zero_ring or r == 0:
        return DegreeHomology(i, C, True, 0 if _field_base(A) or A.is_zero_ring else None)
    din = C.d(i - 1)
    dout = C.d(i)
    if _field_base(A):
        rk_out = field_rank(_to_field(dout)) if dout.nrows else 0
        rk_in = field_rank(_to_field(din)) if din.ncols else 0
        dim = r - rk_out - rk_in
        return DegreeHomology(i, C, dim == 0, dim)
    image = [tuple(c) for c in din.columns() if any(c)]
    if dout.nrows == 0 or dout.is_zero():
        kernel = [tuple(A.one if k == j else A.zero for k in range(r)) for j in range(r)]
    else:
        kernel = list(module_syzygies(SubmodulePresentation(A, dout.nrows, tuple(dout.columns()))).generators)
    if not kernel:
        return DegreeHomology(i, C, True, None, kernel, image)
    if image:
        sb = SubmoduleBasis(A, r, image)
        zero = all(sb.contains(v) for v in kernel)
    else:
        zero = False
    return DegreeHomology(i, C, zero, None, kernel, image)


def _run(fn: Callable, items: Iterable, threads: int | None = None) -> list:
    items = list(items)
    threads = LIMITS.threads if threads is None else threads
    if threads and threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


def homology(C: FreeComplex, threads: int | None = None) -> HomologyReport:
    """Kernel/image presentation of every ``H^i``; exact zero test by submodule membership."""
    degs = list(C.degrees)
    res = _run(lambda i: _degree_homology(C, i), degs, threads)
    return HomologyReport(C, {h.degree: h for h in res})


def is_acyclic(C: FreeComplex) -> bool:
    return homology(C).is_acyclic()


def is_quasi_iso(f: ChainMap) -> tuple[bool, HomologyReport]:
    """Whether ``cone(f)`` is acyclic, together with its homology report."""
    rep = homology(cone(f))
    return rep.is_acyclic(), rep


def fiber_homology_dimensions(C: FreeComplex, pt: PointSpec) -> dict[int, int]:
    """``dim H^i(C (x) k(pt))`` by rank formulas."""
    return homology(C.at_point(pt)).dimensions()
