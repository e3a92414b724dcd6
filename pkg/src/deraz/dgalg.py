"""Strict dg-algebras whose underlying complex is a :class:`FreeComplex`.

The multiplication is stored as sparse structure constants on the total
basis of the underlying complex (degree by degree, in the order of
:meth:`FreeComplex.offsets`): ``e_p e_q = sum_r table[p, q][r] e_r``.  The
dense multiplication chain map ``C (x) C -> C`` is available on demand.
"""
from __future__ import annotations

from typing import Sequence

from .complexes import (ChainMap, FreeComplex, HomLayout, RingMismatch, TensorLayout, _sign, hom_complex,
                        tensor, unit_complex, zero_complex)
from .cring import PolyAlgebra, RingMap
from .cring.points import PointSpec, point_map, residue_algebra
from .scalars import Matrix, rank_of_columns


class NotADGAlgebra(ValueError):
    """Leibniz rule, associativity or the unit axiom failed."""


class DGAlgebra:
    """Associative unital dg-algebra on a bounded free complex."""

    def __init__(self, underlying: FreeComplex, table: dict, unit: Sequence, check: bool = True, name: str = ""):
        self.complex = underlying
        self.base = underlying.base
        A = self.base
        self.dim = underlying.total_rank
        self.degrees = underlying.basis_degrees()
        self.offsets = underlying.offsets()
        clean = {}
        for (p, q), row in table.items():
            r = {k: A(v) for k, v in row.items()}
            r = {k: v for k, v in r.items() if v}
            if r:
                clean[(p, q)] = r
        self.table = clean
        self.unit = tuple(A(x) for x in unit)
        if len(self.unit) != self.dim:
            raise NotADGAlgebra(f"unit has length {len(self.unit)}, expected {self.dim}")
        self.name = name
        self._dcols = None
        self._left = None
        if check:
            self.check()

    # elements ---------------------------------------------------------------
    def basis_vector(self, p: int) -> list:
        A = self.base
        return [A.one if k == p else A.zero for k in range(self.dim)]

    def mul(self, u: Sequence, v: Sequence) -> list:
        A = self.base
        out = [A.zero] * self.dim
        nu = [(p, a) for p, a in enumerate(u) if a]
        nv = [(q, b) for q, b in enumerate(v) if b]
        for p, a in nu:
            for q, b in nv:
                t = self.table.get((p, q))
                if t:
                    ab = a * b
                    for r, c in t.items():
                        out[r] = out[r] + ab * c
        return out

    def left_products(self, p: int) -> list[tuple[int, dict]]:
        """``(q, e_p e_q)`` for all ``q`` with a nonzero product."""
        if self._left is None:
            left: dict = {}
            for (a, b), row in sorted(self.table.items()):
                left.setdefault(a, []).append((b, row))
            self._left = left
        return self._left.get(p, [])

    def mul_basis(self, p: int, q: int) -> dict:
        return self.table.get((p, q), {})

    def differential_columns(self) -> list[dict]:
        """``d e_p`` for every basis element, as sparse vectors on the total basis."""
        if self._dcols is None:
            C = self.complex
            cols = []
            for i in C.degrees:
                d = C.d(i)
                off = self.offsets.get(i + 1, 0)
                for a in range(C.rank(i)):
                    cols.append({off + b: d[b, a] for b in range(C.rank(i + 1)) if d[b, a]})
            self._dcols = cols
        return self._dcols

    def has_zero_differential(self) -> bool:
        return not any(self.differential_columns())

    def apply_d(self, v: Sequence) -> list:
        A = self.base
        out = [A.zero] * self.dim
        cols = self.differential_columns()
        for p, a in enumerate(v):
            if a:
                for r, c in cols[p].items():
                    out[r] = out[r] + a * c
        return out

    # invariants -------------------------------------------------------------
    def check(self):
        A = self.base
        deg = self.degrees
        n = self.dim
        for (p, q), row in self.table.items():
            for r in row:
                if deg[r] != deg[p] + deg[q]:
                    raise NotADGAlgebra(f"e_{p} e_{q} has a component of the wrong degree")
        for r, u in enumerate(self.unit):
            if u and deg[r] != 0:
                raise NotADGAlgebra("unit is not of degree 0")
        for p in range(n):
            e = self.basis_vector(p)
            if self.mul(self.unit, e) != e or self.mul(e, self.unit) != e:
                raise NotADGAlgebra(f"unit axiom fails on e_{p}")
        if any(self.apply_d(self.unit)):
            raise NotADGAlgebra("d(1) != 0")
        # associativity: every triple with a nonzero partial product
        def assoc(p, q, r):
            lhs: dict = {}
            for s, c in self.table.get((p, q), {}).items():
                for t, c2 in self.table.get((s, r), {}).items():
                    lhs[t] = lhs.get(t, A.zero) + c * c2
            rhs: dict = {}
            for s, c in self.table.get((q, r), {}).items():
                for t, c2 in self.table.get((p, s), {}).items():
                    rhs[t] = rhs.get(t, A.zero) + c * c2
            if {k: v for k, v in lhs.items() if v} != {k: v for k, v in rhs.items() if v}:
                raise NotADGAlgebra(f"associativity fails on (e_{p}, e_{q}, e_{r})")

        for (p, q) in self.table:
            for r in range(n):
                assoc(p, q, r)
        for (q, r) in self.table:
            for p in range(n):
                if (p, q) not in self.table:
                    assoc(p, q, r)
        if not self.has_zero_differential():
            for p in range(n):
                for q in range(n):
                    ep, eq = self.basis_vector(p), self.basis_vector(q)
                    lhs = self.apply_d(self.mul(ep, eq))
                    a = self.mul(self.apply_d(ep), eq)
                    b = self.mul(ep, self.apply_d(eq))
                    s = _sign(deg[p])
                    rhs = [x + (y if s == 1 else -y) for x, y in zip(a, b)]
                    if lhs != rhs:
                        raise NotADGAlgebra(f"Leibniz rule fails on (e_{p}, e_{q})")

    # dense views ------------------------------------------------------------
    def mult_map(self) -> ChainMap:
        """The multiplication as a chain map ``C (x) C -> C``."""
        C = self.complex
        T = tensor(C, C)
        L = TensorLayout(C, C)
        A = self.base
        comps = {}
        for n in T.degrees:
            entries = {}
            for pos, i, a, j, b in L.pairs(n):
                p, q = self.offsets[i] + a, self.offsets[j] + b
                for r, c in self.mul_basis(p, q).items():
                    entries[(r - self.offsets[n], pos)] = c
            comps[n] = Matrix.from_dict(A, C.rank(n), T.rank(n), entries)
        return ChainMap(T, C, comps)

    def base_change(self, phi: RingMap) -> "DGAlgebra":
        C = self.complex.base_change(phi)
        table = {k: {r: phi(c) for r, c in row.items()} for k, row in self.table.items()}
        return DGAlgebra(C, table, [phi(u) for u in self.unit], check=False, name=self.name)

    def at_point(self, pt: PointSpec) -> "DGAlgebra":
        return self.base_change(point_map(pt))

    def is_concentrated_in_degree_zero(self) -> bool:
        return all(d == 0 for d in self.degrees)

    def is_commutative(self) -> bool:
        """Graded commutativity on basis elements."""
        for (p, q), row in self.table.items():
            s = _sign(self.degrees[p] * self.degrees[q])
            other = self.table.get((q, p), {})
            if {k: (v if s == 1 else -v) for k, v in other.items()} != row:
                return False
        return all((q, p) in self.table for (p, q) in self.table)

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return f"DGAlgebra{label}(dim {self.dim} over {self.base}, ranks {list(self.complex.ranks)} from degree {self.complex.lo})"


# constructors -----------------------------------------------------------------

def _degree_zero(A: PolyAlgebra, n: int) -> FreeComplex:
    return FreeComplex(A, 0, [n], cap=0)


def unit_algebra(A: PolyAlgebra) -> DGAlgebra:
    return DGAlgebra(unit_complex(A), {(0, 0): {0: A.one}}, [A.one], name="A")


def zero_algebra(A: PolyAlgebra) -> DGAlgebra:
    return DGAlgebra(zero_complex(A), {}, [], name="0")


def matrix_algebra(A: PolyAlgebra, n: int) -> DGAlgebra:
    """``M_n(A)`` with matrix units ``E_ij`` at index ``i n + j``."""
    table = {}
    for i in range(n):
        for j in range(n):
            for l in range(n):
                table[(i * n + j, j * n + l)] = {i * n + l: A.one}
    unit = [A.one if (k // n) == (k % n) else A.zero for k in range(n * n)]
    return DGAlgebra(_degree_zero(A, n * n), table, unit, name=f"M{n}")


def quaternion_algebra(A: PolyAlgebra, a, b) -> DGAlgebra:
    """``(a, b)``: basis ``1, i, j, k`` with ``i^2 = a, j^2 = b, ij = -ji = k``."""
    a, b = A(a), A(b)
    o = A.one
    ab = a * b
    t = {
        (0, 0): {0: o}, (0, 1): {1: o}, (0, 2): {2: o}, (0, 3): {3: o},
        (1, 0): {1: o}, (2, 0): {2: o}, (3, 0): {3: o},
        (1, 1): {0: a}, (2, 2): {0: b}, (3, 3): {0: -ab},
        (1, 2): {3: o}, (2, 1): {3: -o},
        (1, 3): {2: a}, (3, 1): {2: -a},
        (2, 3): {1: -b}, (3, 2): {1: b},
    }
    return DGAlgebra(_degree_zero(A, 4), t, [o, A.zero, A.zero, A.zero], name=f"({a},{b})")


def product_algebra(A: PolyAlgebra, n: int) -> DGAlgebra:
    """``A^n`` with orthogonal idempotents."""
    t = {(i, i): {i: A.one} for i in range(n)}
    return DGAlgebra(_degree_zero(A, n), t, [A.one] * n, name="x".join(["k"] * n))


def algebra_from_quotient(R: PolyAlgebra) -> DGAlgebra:
    """A finite-dimensional commutative ``k``-algebra ``R`` in degree 0, on its standard monomials."""
    basis = R.monomial_basis()
    if basis is None:
        raise ValueError(f"{R} is not finite-dimensional over its field")
    k = residue_algebra(R.field)
    idx = {e: i for i, e in enumerate(basis)}
    table = {}
    for p, e in enumerate(basis):
        for q, f in enumerate(basis):
            prod = R.monomial(e) * R.monomial(f)
            table[(p, q)] = {idx[m]: k.const(c) for m, c in prod.terms.items()}
    unit = [k.const(c) for c in _coords(R, R.one, idx, len(basis))]
    return DGAlgebra(_degree_zero(k, len(basis)), table, unit, name=repr(R))


def _coords(R, x, idx, n):
    out = [R.field.zero] * n
    for m, c in x.terms.items():
        out[idx[m]] = c
    return out


def dual_numbers(A: PolyAlgebra) -> DGAlgebra:
    """``A[x]/(x^2)`` with basis ``1, x``."""
    o = A.one
    t = {(0, 0): {0: o}, (0, 1): {1: o}, (1, 0): {1: o}}
    return DGAlgebra(_degree_zero(A, 2), t, [o, A.zero], name="k[x]/(x^2)")


def end_dga(E: FreeComplex) -> DGAlgebra:
    """``Hom(E, E)`` with composition and the identity as unit."""
    H = hom_complex(E, E)
    L = HomLayout(E, E)
    A = E.base
    offs = H.offsets()
    units = {}  # (n, i) -> list of (pos, r, c)
    for n in H.degrees:
        for pos, i, r, c in L.units(n):
            units.setdefault((i, n), []).append((offs[n] + pos, r, c))
    table = {}
    # (E_rc: C^i -> C^{i+n}) o (E_r'c': C^i' -> C^{i'+n'}) with i = i' + n' and c = r'
    for (i2, n2), lst2 in units.items():
        for (i1, n1), lst1 in units.items():
            if i1 != i2 + n2:
                continue
            for p, r1, c1 in lst1:
                for q, r2, c2 in lst2:
                    if c1 == r2:
                        target = offs[n1 + n2] + L.index(n1 + n2, i2, r1, c2)
                        table[(p, q)] = {target: A.one}
    unit = [A.zero] * H.total_rank
    for i in E.degrees:
        for r in range(E.rank(i)):
            unit[offs[0] + L.index(0, i, r, r)] = A.one
    return DGAlgebra(H, table, unit, name="End")


def opposite(B: DGAlgebra) -> DGAlgebra:
    deg = B.degrees
    table = {}
    for (q, p), row in B.table.items():
        s = _sign(deg[p] * deg[q])
        table[(p, q)] = row if s == 1 else {k: -v for k, v in row.items()}
    return DGAlgebra(B.complex, table, B.unit, check=False, name=f"{B.name}^op" if B.name else "")


def tensor_dga(B: DGAlgebra, B2: DGAlgebra, check: bool = True) -> DGAlgebra:
    """``(b (x) b')(c (x) c') = (-1)^{|b'||c|} bc (x) b'c'``."""
    if B.base is not B2.base:
        raise RingMismatch("tensor product of dg-algebras over different bases")
    C, D = B.complex, B2.complex
    T = tensor(C, D)
    L = TensorLayout(C, D)
    offs = T.offsets()
    index = {}  # (p, p') -> total index
    for n in T.degrees:
        for pos, i, a, j, b in L.pairs(n):
            index[(B.offsets[i] + a, B2.offsets[j] + b)] = offs[n] + pos
    degB, degD = B.degrees, B2.degrees
    table = {}
    for (p, q), row in B.table.items():
        for (p2, q2), row2 in B2.table.items():
            s = _sign(degD[p2] * degB[q])
            out = {}
            for r, c in row.items():
                for r2, c2 in row2.items():
                    v = c * c2
                    out[index[(r, r2)]] = v if s == 1 else -v
            table[(index[(p, p2)], index[(q, q2)])] = out
    A = B.base
    unit = [A.zero] * T.total_rank
    for p, u in enumerate(B.unit):
        if u:
            for p2, u2 in enumerate(B2.unit):
                if u2:
                    unit[index[(p, p2)]] = u * u2
    name = f"{B.name}(x){B2.name}" if B.name and B2.name else ""
    return DGAlgebra(T, table, unit, check=check, name=name)


def enveloping_algebra(B: DGAlgebra) -> DGAlgebra:
    return tensor_dga(B, opposite(B))


# the Azumaya structure map -----------------------------------------------------------

def _structure_image(B: DGAlgebra, p: int, q: int) -> dict[int, dict]:
    """``c -> (-1)^{|e_q||c|} e_p c e_q`` as ``{s: {r: coeff}}`` for basis elements ``c = e_s``."""
    deg = B.degrees
    out = {}
    for s, left in B.left_products(p):
        sign = _sign(deg[q] * deg[s])
        res: dict = {}
        for t, c in left.items():
            for r, c2 in B.table.get((t, q), {}).items():
                res[r] = res.get(r, B.base.zero) + c * c2
        res = {r: (v if sign == 1 else -v) for r, v in res.items() if v}
        if res:
            out[s] = res
    return out


def azumaya_structure_map(B: DGAlgebra) -> ChainMap:
    """``B (x) B^op -> Hom(B, B)``, ``b (x) b' -> (c -> (-1)^{|b'||c|} b c b')``."""
    C = B.complex
    S = tensor(C, C)
    T = hom_complex(C, C)
    LS = TensorLayout(C, C)
    LT = HomLayout(C, C)
    A = B.base
    comps = {}
    deg = B.degrees
    for n in S.degrees:
        entries = {}
        for pos, i, a, j, b in LS.pairs(n):
            p, q = B.offsets[i] + a, B.offsets[j] + b
            for s, vec in _structure_image(B, p, q).items():
                ds = deg[s]
                cs = s - B.offsets[ds]
                for r, c in vec.items():
                    rr = r - B.offsets[ds + n]
                    entries[(LT.index(n, ds, rr, cs), pos)] = c
        comps[n] = Matrix.from_dict(A, T.rank(n), S.rank(n), entries)
    return ChainMap(S, T, comps)


def structure_map_ranks(B: DGAlgebra) -> dict[int, int]:
    """Per-degree rank of the structure map over a field, from sparse columns.

    Columns are indexed by pairs ``(p, q)`` and rows by pairs ``(r, s)``
    standing for the matrix unit ``e_s -> e_r``.
    """
    A = B.base
    if A.nvars:
        raise ValueError("structure_map_ranks needs a field base")
    deg = B.degrees
    cols: dict[int, list] = {}
    n = B.dim
    for p in range(n):
        for q in range(n):
            img = _structure_image(B, p, q)
            col = {}
            for s, vec in img.items():
                for r, c in vec.items():
                    col[r * n + s] = c.constant_value()
            cols.setdefault(deg[p] + deg[q], []).append(col)
    F = A.field
    return {d: rank_of_columns(F, cs) for d, cs in sorted(cols.items())}


class DGBimoduleMap:
    """A chain map ``f: B -> B'`` of dg-algebras, checked to be unital and multiplicative.

    Such a map makes ``B'`` a ``B``-bimodule and intertwines the two actions.
    """

    def __init__(self, source: DGAlgebra, target: DGAlgebra, chain_map: ChainMap, check: bool = True):
        if chain_map.source != source.complex or chain_map.target != target.complex:
            raise ValueError("chain map does not go between the underlying complexes")
        self.source = source
        self.target = target
        self.chain_map = chain_map
        if check:
            self.check()

    def apply(self, v: Sequence) -> list:
        S, T = self.source, self.target
        A = S.base
        out = [A.zero] * T.dim
        for i in S.complex.degrees:
            m = self.chain_map[i]
            o_s, o_t = S.offsets[i], T.offsets.get(i, 0)
            for a in range(S.complex.rank(i)):
                x = v[o_s + a]
                if x:
                    for b in range(T.complex.rank(i)):
                        y = m[b, a]
                        if y:
                            out[o_t + b] = out[o_t + b] + x * y
        return out

    def check(self):
        S, T = self.source, self.target
        if self.apply(S.unit) != list(T.unit):
            raise ValueError("map is not unital")
        for p in range(S.dim):
            fp = self.apply(S.basis_vector(p))
            for q in range(S.dim):
                fq = self.apply(S.basis_vector(q))
                if self.apply(S.mul(S.basis_vector(p), S.basis_vector(q))) != T.mul(fp, fq):
                    raise ValueError(f"map is not multiplicative on (e_{p}, e_{q})")

    def is_isomorphism(self) -> bool:
        from .complexes import homology, cone

        return homology(cone(self.chain_map)).is_acyclic()


def transpose_map(n: int, A: PolyAlgebra) -> DGBimoduleMap:
    """``M_n(A)^op -> M_n(A)``, ``E_ij -> E_ji``."""
    M = matrix_algebra(A, n)
    Mop = opposite(M)
    entries = {}
    for i in range(n):
        for j in range(n):
            entries[(j * n + i, i * n + j)] = A.one
    comp = Matrix.from_dict(A, n * n, n * n, entries)
    f = ChainMap(Mop.complex, M.complex, {0: comp})
    return DGBimoduleMap(Mop, M, f)
