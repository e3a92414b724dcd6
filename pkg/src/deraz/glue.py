"""Schemes given by one or two affine patches, patchwise complexes and Cech sections.

A two-patch scheme ``X = U u V`` is recorded by the gluing elements
``f_UV in A_U`` and ``f_VU in A_V`` and mutually inverse isomorphisms
between ``A_U[1/f_UV]`` and ``A_V[1/f_VU]``.  The overlap ring is always
taken to be the ``V``-side localization ``L_V``.

Cech computations use an integer weight grading on the patch rings (one
weight per variable).  Every construction is homogeneous, so the Cech
complex splits into finite-dimensional weight pieces; these are computed
over a window of weights and the window is checked for stability.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .azumaya import GeneratorVerdict, is_compact_generator
from .complexes import (ChainMap, FreeComplex, HomLayout, direct_sum, direct_sum_map, hom_complex, homology,
                        is_acyclic, is_quasi_iso, koszul, shift, tensor, zero_complex, zero_map)
from .cring import Element, PolyAlgebra, RingMap, ZeroLocalization, localize
from .cring.points import residue_algebra
from .dgalg import DGAlgebra, end_dga
from .scalars import Matrix, kernel_basis, rank, solve


class DegenerateInput(ValueError):
    pass


class CocycleError(ValueError):
    pass


class LiftNotFound(RuntimeError):
    def __init__(self, message: str, record: dict | None = None):
        super().__init__(message)
        self.record = record or {}


class WindowError(RuntimeError):
    def __init__(self, message: str, suggested: int | None = None):
        super().__init__(message)
        self.suggested = suggested


class NotHomogeneous(ValueError):
    pass


# schemes ---------------------------------------------------------------------------------

class GluedScheme:
    """One affine patch, or two patches glued along principal opens.

    ``overlap`` has keys ``f`` (the pair ``(f_UV, f_VU)``), ``map`` (images
    of the generators of ``A_U`` in ``A_V[1/f_VU]``) and ``inverse`` (images
    of the generators of ``A_V`` in ``A_U[1/f_UV]``).  Expressions may be
    strings and may divide by units, e.g. ``"1/s"``.
    """

    def __init__(self, patches: Mapping[str, PolyAlgebra], overlap: Mapping | None = None,
                 weights: Mapping[str, Sequence[int]] | None = None):
        self.patches = dict(patches)
        self.names = list(self.patches)
        if len(self.names) not in (1, 2):
            raise ValueError("only one or two patches are supported")
        self.weights = {k: tuple(v) for k, v in (weights or {}).items()}
        for k, w in self.weights.items():
            if len(w) != self.patches[k].nvars:
                raise ValueError(f"patch {k} needs {self.patches[k].nvars} weights")
        if len(self.names) == 1:
            if overlap:
                raise ValueError("a single patch has no overlap")
            return
        if overlap is None:
            raise ValueError("two patches need overlap data")
        U, V = self.names
        AU, AV = self.patches[U], self.patches[V]
        fU, fV = overlap["f"]
        self.f_UV = AU.parse(fU) if isinstance(fU, str) else AU(fU)
        self.f_VU = AV.parse(fV) if isinstance(fV, str) else AV(fV)
        try:
            self.loc_U = localize(AU, self.f_UV)
            self.loc_V = localize(AV, self.f_VU)
        except ZeroLocalization:
            raise DegenerateInput("the overlap is empty")
        LU, LV = self.loc_U.algebra, self.loc_V.algebra
        fwd = [_parse_in(LV, x) for x in overlap["map"]]
        back = [_parse_in(LU, x) for x in overlap["inverse"]]
        if len(fwd) != AU.nvars or len(back) != AV.nvars:
            raise ValueError("one image per generator is required")
        # extend to the localizations: the inverse of f goes to the inverse of its image
        pre_U = RingMap(AU, LV, fwd)
        pre_V = RingMap(AV, LU, back)
        try:
            inv_fwd = LV.inverse(pre_U(self.f_UV))
            inv_back = LU.inverse(pre_V(self.f_VU))
        except Exception:
            raise CocycleError("the gluing map does not send the gluing element to a unit")
        self.tau = RingMap(LU, LV, [inv_fwd] + fwd)
        self.tau_inv = RingMap(LV, LU, [inv_back] + back)
        for g in LU.gens:
            if self.tau_inv(self.tau(g)) != g:
                raise CocycleError(f"the gluing maps are not inverse on {g}")
        for g in LV.gens:
            if self.tau(self.tau_inv(g)) != g:
                raise CocycleError(f"the gluing maps are not inverse on {g}")
        self.rho_U = self.tau.compose(self.loc_U.map)
        self.rho_V = self.loc_V.map

    @property
    def is_affine(self) -> bool:
        return len(self.names) == 1

    @property
    def overlap_ring(self) -> PolyAlgebra:
        return self.loc_V.algebra

    def restriction(self, name: str) -> RingMap:
        return self.rho_U if name == self.names[0] else self.rho_V

    def overlap_weights(self) -> tuple:
        U, V = self.names
        wV = self.weights[V]
        return (-_weight(self.patches[V], wV, self.f_VU),) + wV

    def describe(self) -> str:
        if self.is_affine:
            return f"affine scheme Spec {self.patches[self.names[0]]}"
        U, V = self.names
        return f"{U} u {V} glued along {self.f_UV} ~ {self.f_VU}"


def _parse_in(L: PolyAlgebra, x) -> Element:
    return L.parse(x) if isinstance(x, str) else L(x)


def projective_line(field="Q") -> GluedScheme:
    """``P^1 = Spec k[t] u Spec k[s]`` with ``t = 1/s`` on the overlap."""
    U = PolyAlgebra(field, ["t"])
    V = PolyAlgebra(U.field, ["s"])
    return GluedScheme({"U": U, "V": V}, {"f": ("t", "s"), "map": ["1/s"], "inverse": ["1/t"]},
                       weights={"U": (1,), "V": (-1,)})


def affine_scheme(A: PolyAlgebra, name: str = "U", weights: Sequence[int] | None = None) -> GluedScheme:
    return GluedScheme({name: A}, None, {name: tuple(weights)} if weights is not None else None)


# glued complexes ---------------------------------------------------------------------------

class GluedComplex:
    """Patch complexes with a quasi-isomorphism ``E_U|overlap -> E_V|overlap``."""

    def __init__(self, scheme: GluedScheme, parts: Mapping[str, FreeComplex], comparison: ChainMap | None = None,
                 check: bool = True):
        self.scheme = scheme
        self.parts = dict(parts)
        if set(self.parts) != set(scheme.names):
            raise ValueError("one complex per patch is required")
        for k, E in self.parts.items():
            if E.base is not scheme.patches[k]:
                raise ValueError(f"complex for {k} does not live over that patch")
        self.comparison = comparison
        if scheme.is_affine:
            return
        if comparison is None:
            raise ValueError("two patches need a comparison map")
        if check:
            U, V = scheme.names
            if comparison.source != self.restricted(U) or comparison.target != self.restricted(V):
                raise CocycleError("comparison map has the wrong source or target")
            ok, _ = is_quasi_iso(comparison)
            if not ok:
                raise CocycleError("comparison map is not a quasi-isomorphism")

    def restricted(self, name: str) -> FreeComplex:
        return self.parts[name].base_change(self.scheme.restriction(name))

    def __getitem__(self, name: str) -> FreeComplex:
        return self.parts[name]

    @property
    def total_rank(self) -> int:
        return sum(E.total_rank for E in self.parts.values())

    def describe(self) -> str:
        return "; ".join(f"{k}: ranks {E.ranks} from degree {E.lo}" for k, E in self.parts.items())


def glued_direct_sum(*Es: GluedComplex) -> GluedComplex:
    X = Es[0].scheme
    parts = {k: direct_sum(*[E.parts[k] for E in Es]) for k in X.names}
    if X.is_affine:
        return GluedComplex(X, parts)
    return GluedComplex(X, parts, direct_sum_map(*[E.comparison for E in Es]))


def structure_sheaf(X: GluedScheme) -> GluedComplex:
    return line_bundle(X, 0)


def line_bundle(X: GluedScheme, n: int = 0) -> GluedComplex:
    """Rank one patches glued by multiplication with ``f_VU^n``."""
    parts = {k: FreeComplex(A, 0, [1]) for k, A in X.patches.items()}
    if X.is_affine:
        return GluedComplex(X, parts)
    L = X.overlap_ring
    g = X.rho_V(X.f_VU)
    a = g ** n if n >= 0 else X.loc_V.inverse ** (-n)
    U, V = X.names
    src = parts[U].base_change(X.rho_U)
    tgt = parts[V].base_change(X.rho_V)
    return GluedComplex(X, parts, ChainMap(src, tgt, {0: Matrix(L, [[a]], 1)}))


def extension_by_zero(X: GluedScheme, K: FreeComplex, patch: str | None = None) -> GluedComplex:
    """A complex on one patch that is acyclic on the overlap, extended by zero."""
    U, V = X.names
    patch = patch or V
    other = U if patch == V else V
    parts = {patch: K, other: zero_complex(X.patches[other])}
    src = parts[U].base_change(X.rho_U)
    tgt = parts[V].base_change(X.rho_V)
    return GluedComplex(X, parts, zero_map(src, tgt))


# Koszul complement generators ---------------------------------------------------------------

def koszul_complement_generator(V: PolyAlgebra, fs: Sequence, B: DGAlgebra | None = None,
                                verify: bool = True) -> FreeComplex:
    """``B (x) K(V; fs)``; supported on the complement of the opens ``V[1/f_i]``."""
    K = koszul(V, fs)
    if B is not None:
        if B.base is not V:
            raise ValueError("the dg-algebra must live over V")
        K = tensor(B.complex, K)
    if verify:
        for f in fs:
            f = V(f)
            if not f:
                continue
            if not is_acyclic(K.localize(f)):
                raise AssertionError(f"complement generator is not acyclic after inverting {f}")
    return K


@dataclass
class OrthogonalityVerdict:
    holds: bool
    per_open: dict = field(default_factory=dict)
    degenerate: bool = False

    def __bool__(self):
        return self.holds

    def summary(self) -> str:
        if self.degenerate:
            return "degenerate input: some localization is the zero ring"
        bad = [k for k, v in self.per_open.items() if not v]
        return "orthogonal to every localization" if self.holds else f"not orthogonal to A[1/{bad[0]}]"


def orthogonality_check(K: FreeComplex, fs: Sequence) -> OrthogonalityVerdict:
    """``Hom(K, A[1/f_i])`` is acyclic for every ``i``."""
    A = K.base
    per = {}
    degenerate = False
    for f in fs:
        f = A(f)
        try:
            loc = localize(A, f)
        except ZeroLocalization:
            per[str(f)] = False
            degenerate = True
            continue
        if loc.algebra.is_zero_ring:
            per[str(f)] = False
            degenerate = True
            continue
        KL = K.base_change(loc.map)
        H = hom_complex(KL, FreeComplex(loc.algebra, 0, [1]))
        per[str(f)] = is_acyclic(H)
    return OrthogonalityVerdict(all(per.values()) and not degenerate, per, degenerate)


# local generators ---------------------------------------------------------------------------

@dataclass
class LocalGeneratorVerdict:
    holds: bool
    per_patch: dict

    def __bool__(self):
        return self.holds

    def summary(self) -> str:
        return "; ".join(f"{k}: {v.summary()}" for k, v in self.per_patch.items())


def verify_local_generator(X: GluedScheme, E: GluedComplex) -> LocalGeneratorVerdict:
    per: dict[str, GeneratorVerdict] = {k: is_compact_generator(E.parts[k]) for k in X.names}
    return LocalGeneratorVerdict(all(v.holds for v in per.values()), per)


# lifting to the second patch ------------------------------------------------------------------

MAX_DENOMINATOR_POWER = 16


def _clear_power(loc, g: Element, u: Element, limit: int) -> int | None:
    """Least ``e >= 0`` with ``f^e g`` in the image of the base ring."""
    f = loc.map(loc.f)
    h = g
    for e in range(limit + 1):
        if loc.in_image(h):
            return e
        h = h * f
    return None


def free_lift(X: GluedScheme, T: FreeComplex, budget: int = MAX_DENOMINATOR_POWER) -> tuple[FreeComplex, ChainMap]:
    """A complex on ``V`` with an isomorphism from ``T`` (a complex over the overlap).

    Each basis vector ``e`` is replaced by ``f^k e``; the exponents solve the
    difference constraints ``k_b - k_a >= need(a, b)`` by longest paths.
    """
    loc = X.loc_V
    L, AV = loc.algebra, X.patches[X.names[1]]
    u = loc.inverse
    nodes = [(n, j) for n in T.degrees for j in range(T.rank(n))]
    edges = []
    record = {}
    for n in range(T.lo, T.hi):
        d = T.d(n)
        for a in range(d.nrows):
            for b in range(d.ncols):
                if d[a, b]:
                    e = _clear_power(loc, d[a, b], u, budget)
                    if e is None:
                        record[(n, a, b)] = str(d[a, b])
                        raise LiftNotFound("a differential entry keeps its denominator", record)
                    edges.append(((n + 1, a), (n, b), e))
    k = {v: 0 for v in nodes}
    for _ in range(len(nodes) + 1):
        changed = False
        for a, b, e in edges:
            if k[b] < k[a] + e:
                k[b] = k[a] + e
                changed = True
        if not changed:
            break
    else:
        raise LiftNotFound("the rescaling constraints have a positive cycle", {"edges": len(edges)})
    f = loc.map(loc.f)
    diffs = {}
    for n in range(T.lo, T.hi):
        d = T.d(n)
        rows = []
        for a in range(d.nrows):
            row = []
            for b in range(d.ncols):
                x = d[a, b]
                if x:
                    x = x * f ** (k[(n, b)] - k[(n + 1, a)])
                    x = loc.preimage(x)
                else:
                    x = AV.zero
                row.append(x)
            rows.append(row)
        diffs[n] = Matrix(AV, rows, d.ncols, check=False)
    try:
        lift = FreeComplex(AV, T.lo, T.ranks, diffs)
    except Exception as exc:
        raise LiftNotFound(f"lifted differentials do not square to zero: {exc}")
    target = lift.base_change(X.rho_V)
    comps = {}
    for n in T.degrees:
        r = T.rank(n)
        comps[n] = Matrix.from_dict(L, r, r, {(j, j): u ** k[(n, j)] for j in range(r)})
    return lift, ChainMap(T, target, comps)


def glue_generator_two_patch(X: GluedScheme, E_U: FreeComplex, lift: FreeComplex | None = None,
                             lift_comparison: ChainMap | None = None,
                             budget: int = MAX_DENOMINATOR_POWER) -> GluedComplex:
    """A compact local generator on ``X`` from a generator on the first patch.

    ``E_U (+) E_U[1]`` is glued to a lift on ``V``; the Koszul complex of the
    gluing element on ``V``, extended by zero, is added so that the result
    also generates near ``V - U``.
    """
    U = X.names[0]
    if E_U.base is not X.patches[U]:
        raise ValueError("E_U must live over the first patch")
    if not is_compact_generator(E_U).holds:
        raise ValueError("E_U is not a compact generator on its patch")
    if X.is_affine:
        return GluedComplex(X, {U: E_U})
    V = X.names[1]
    AV = X.patches[V]
    complement_empty = _is_unit(AV, X.f_VU)
    D = E_U if complement_empty else direct_sum(E_U, shift(E_U, 1))
    T = D.base_change(X.rho_U)
    if lift is None:
        lift, phi = free_lift(X, T, budget)
    else:
        if lift.base is not AV:
            raise ValueError("the lift must live over the second patch")
        if lift_comparison is None:
            if lift.base_change(X.rho_V) != T:
                raise LiftNotFound("supplied lift does not restrict to the doubled complex")
            phi = ChainMap(T, T, {n: Matrix.identity(X.overlap_ring, T.rank(n)) for n in T.degrees})
        else:
            phi = lift_comparison
    E_X = GluedComplex(X, {U: D, V: lift}, phi)
    if complement_empty:
        return E_X
    F_X = extension_by_zero(X, koszul_complement_generator(AV, [X.f_VU]))
    return glued_direct_sum(E_X, F_X)


def _is_unit(A: PolyAlgebra, f: Element) -> bool:
    try:
        A.inverse(f)
        return True
    except Exception:
        return False


# weight gradings -----------------------------------------------------------------------------

def _weight(A: PolyAlgebra, w: Sequence[int], x: Element) -> int | None:
    ws = {sum(a * b for a, b in zip(e, w)) for e in x.terms}
    if not ws:
        return None
    if len(ws) > 1:
        raise NotHomogeneous(f"{x} is not homogeneous for the weights {tuple(w)}")
    return ws.pop()


class _GradedRing:
    """Standard monomials of a patch ring sorted by weight, up to a degree cap."""

    def __init__(self, A: PolyAlgebra, weights: Sequence[int], cap: int):
        self.alg, self.w, self.cap = A, tuple(weights), cap
        self.pieces: dict[int, list[tuple]] = {}
        for e in self._exponents(A.nvars, cap):
            if A.is_standard(e):
                self.pieces.setdefault(sum(a * b for a, b in zip(e, self.w)), []).append(e)
        for v in self.pieces.values():
            v.sort(key=lambda e: (sum(e), e))
        self.index = {k: {e: i for i, e in enumerate(v)} for k, v in self.pieces.items()}
        self._mono: dict = {}

    @staticmethod
    def _exponents(n: int, cap: int):
        if n == 0:
            yield ()
            return
        for d in range(cap + 1):
            for head in range(d + 1):
                for rest in _GradedRing._exponents_exact(n - 1, d - head):
                    yield (head,) + rest

    @staticmethod
    def _exponents_exact(n: int, d: int):
        if n == 0:
            if d == 0:
                yield ()
            return
        for head in range(d + 1):
            for rest in _GradedRing._exponents_exact(n - 1, d - head):
                yield (head,) + rest

    def piece(self, k: int) -> list[tuple]:
        p = self.pieces.get(k, [])
        if any(sum(e) > self.cap // 2 for e in p):
            raise WindowError(f"weight {k} of {self.alg} does not look finite-dimensional")
        return p

    def monomial(self, e: tuple) -> Element:
        m = self._mono.get(e)
        if m is None:
            m = self._mono[e] = self.alg.monomial(e)
        return m


def _infer_basis_weights(constraints: list, nodes: list) -> dict:
    """Solve ``w(b) = w(a) + delta`` on a graph; free components start at 0."""
    adj: dict = {v: [] for v in nodes}
    for a, b, delta in constraints:
        adj[a].append((b, delta))
        adj[b].append((a, -delta))
    w: dict = {}
    for v in nodes:
        if v in w:
            continue
        w[v] = 0
        stack = [v]
        while stack:
            x = stack.pop()
            for y, delta in adj[x]:
                if y not in w:
                    w[y] = w[x] + delta
                    stack.append(y)
                elif w[y] != w[x] + delta:
                    raise NotHomogeneous("the complexes admit no compatible weights")
    return w


def _complex_constraints(tag, E: FreeComplex, A: PolyAlgebra, wts) -> list:
    out = []
    for n in range(E.lo, E.hi):
        d = E.d(n)
        for a in range(d.nrows):
            for b in range(d.ncols):
                if d[a, b]:
                    k = _weight(A, wts, d[a, b])
                    # e_b at n maps to d[a,b] e_a at n+1
                    out.append(((tag, n, b), (tag, n + 1, a), -k))
    return out


@dataclass
class _WComplex:
    complex: FreeComplex
    ring: _GradedRing
    bw: dict  # degree -> list of basis weights

    def basis(self, n: int, m: int) -> list:
        out = []
        for j in range(self.complex.rank(n)):
            for e in self.ring.piece(m - self.bw[n][j]):
                out.append((j, e))
        return out


def _piece_map(src: _WComplex, n_src: int, tgt: _WComplex, n_tgt: int, M: Matrix, m: int,
               rho: RingMap | None, cache: dict) -> Matrix:
    """Matrix over the base field of ``x -> M rho(x)`` on weight ``m`` pieces."""
    F = src.ring.alg.field
    sb = src.basis(n_src, m)
    tb = tgt.basis(n_tgt, m)
    tindex = {v: i for i, v in enumerate(tb)}
    entries: dict = {}
    for col, (j, e) in enumerate(sb):
        key = (id(src.ring), id(rho), e)
        img = cache.get(key)
        if img is None:
            mono = src.ring.monomial(e)
            img = cache[key] = rho(mono) if rho is not None else mono
        for i in range(M.nrows):
            a = M[i, j]
            if not a:
                continue
            for e2, c in (img * a).terms.items():
                pos = tindex.get((i, e2))
                if pos is None:
                    raise WindowError("a product left the enumerated monomials; enlarge the window")
                entries[(pos, col)] = entries.get((pos, col), F.zero) + c
    return Matrix.from_dict(F, len(tb), len(sb), entries)


class _CechPair:
    """Total complex of ``P (+) Q -> O``, ``(a, b) -> beta(b) - alpha(a)``, split by weight.

    ``alpha`` and ``beta`` are degreewise matrices over the overlap ring
    applied after the restriction maps.
    """

    def __init__(self, P: _WComplex, Q: _WComplex | None, O: _WComplex | None,
                 alpha: dict | None, beta: dict | None, rho_P: RingMap | None, rho_Q: RingMap | None):
        self.P, self.Q, self.O = P, Q, O
        self.alpha, self.beta = alpha or {}, beta or {}
        self.rho_P, self.rho_Q = rho_P, rho_Q
        cs = [P.complex] + ([Q.complex] if Q else [])
        degs = set()
        for C in cs:
            degs |= set(C.degrees)
        if O:
            degs |= {n + 1 for n in O.complex.degrees}
        self.degrees = sorted(degs)
        self._cache: dict = {}
        self._pieces: dict = {}

    def parts(self, n: int, m: int) -> list:
        """Block sizes ``(P^n_m, Q^n_m, O^{n-1}_m)``."""
        p = len(self.P.basis(n, m)) if n in self.P.complex.degrees else 0
        q = len(self.Q.basis(n, m)) if self.Q and n in self.Q.complex.degrees else 0
        o = len(self.O.basis(n - 1, m)) if self.O and (n - 1) in self.O.complex.degrees else 0
        return [p, q, o]

    def dim(self, n: int, m: int) -> int:
        return sum(self.parts(n, m))

    def differential(self, n: int, m: int) -> Matrix:
        key = (n, m)
        if key in self._pieces:
            return self._pieces[key]
        F = self.P.ring.alg.field
        src = self.parts(n, m)
        tgt = self.parts(n + 1, m)
        blocks = [[None] * 3 for _ in range(3)]
        P, Q, O = self.P, self.Q, self.O
        if src[0] and tgt[0]:
            blocks[0][0] = _piece_map(P, n, P, n + 1, P.complex.d(n), m, None, self._cache)
        if Q and src[1] and tgt[1]:
            blocks[1][1] = _piece_map(Q, n, Q, n + 1, Q.complex.d(n), m, None, self._cache)
        if O and src[2] and tgt[2]:
            blocks[2][2] = -_piece_map(O, n - 1, O, n, O.complex.d(n - 1), m, None, self._cache)
        if O and src[0] and tgt[2] and n in self.alpha:
            blocks[2][0] = -_piece_map(P, n, O, n, self.alpha[n], m, self.rho_P, self._cache)
        if O and src[1] and tgt[2] and n in self.beta:
            blocks[2][1] = _piece_map(Q, n, O, n, self.beta[n], m, self.rho_Q, self._cache)
        rows = []
        for bi in range(3):
            for r in range(tgt[bi]):
                row = []
                for bj in range(3):
                    b = blocks[bi][bj]
                    row.extend(b.row(r) if b is not None else [F.zero] * src[bj])
                rows.append(row)
        M = Matrix(F, rows, sum(src), check=False)
        self._pieces[key] = M
        return M

    def homology_dims(self, m: int) -> dict[int, int]:
        out = {}
        for n in self.degrees:
            dim = self.dim(n, m)
            if not dim:
                continue
            r_out = rank(self.differential(n, m)) if self.dim(n + 1, m) else 0
            r_in = rank(self.differential(n - 1, m)) if self.dim(n - 1, m) else 0
            h = dim - r_out - r_in
            if h:
                out[n] = h
        return out

    # vectors <-> ring elements
    def split(self, n: int, m: int, vec: Sequence) -> tuple[list, list, list]:
        """Coordinates to vectors of ring elements on ``P^n``, ``Q^n`` and ``O^{n-1}``."""
        sizes = self.parts(n, m)
        out = []
        off = 0
        for k, (W, deg) in enumerate([(self.P, n), (self.Q, n), (self.O, n - 1)]):
            if W is None or deg not in W.complex.degrees:
                out.append([])
                off += sizes[k]
                continue
            A = W.ring.alg
            v = [A.zero] * W.complex.rank(deg)
            for (j, e), c in zip(W.basis(deg, m), vec[off:off + sizes[k]]):
                if c:
                    v[j] = v[j] + W.ring.monomial(e) * c
            out.append(v)
            off += sizes[k]
        return out[0], out[1], out[2]

    def join(self, n: int, m: int, p: Sequence, q: Sequence, o: Sequence) -> list:
        F = self.P.ring.alg.field
        vec = []
        for W, deg, v in [(self.P, n, p), (self.Q, n, q), (self.O, n - 1, o)]:
            if W is None or deg not in W.complex.degrees:
                continue
            basis = W.basis(deg, m)
            idx = {b: i for i, b in enumerate(basis)}
            part = [F.zero] * len(basis)
            for j, x in enumerate(v):
                for e, c in W.ring.alg(x).terms.items():
                    pos = idx.get((j, e))
                    if pos is None:
                        raise WindowError("an element left the enumerated weight piece")
                    part[pos] = part[pos] + c
            vec.extend(part)
        return vec


def _window_cap(w: int, shifts: int) -> int:
    return 2 * (w + 2 + shifts) + 2


def _graded(X: GluedScheme, name: str, cap: int) -> _GradedRing:
    if name not in X.weights:
        raise ValueError(f"no weights given for patch {name}; Cech computations need a grading")
    return _GradedRing(X.patches[name], X.weights[name], cap)


def _complex_weights(X: GluedScheme, E: GluedComplex) -> dict:
    """Basis weights making every differential and the comparison homogeneous."""
    nodes, cons = [], []
    for k in X.names:
        C = E.parts[k]
        nodes += [(k, n, j) for n in C.degrees for j in range(C.rank(n))]
        cons += _complex_constraints(k, C, X.patches[k], X.weights[k])
    if not X.is_affine:
        U, V = X.names
        L, wL = X.overlap_ring, X.overlap_weights()
        for n, M in ((n, E.comparison[n]) for n in E.comparison.source.degrees):
            for a in range(M.nrows):
                for b in range(M.ncols):
                    if M[a, b]:
                        k = _weight(L, wL, M[a, b])
                        cons.append(((U, n, b), (V, n, a), -k))
    w = _infer_basis_weights(cons, nodes)
    return {k: {n: [w[(k, n, j)] for j in range(E.parts[k].rank(n))] for n in E.parts[k].degrees}
            for k in X.names}


def _cech_of_complex(X: GluedScheme, E: GluedComplex, window: int) -> _CechPair:
    bw = _complex_weights(X, E)
    S = max([abs(x) for d in bw.values() for v in d.values() for x in v] or [0])
    cap = _window_cap(window, S)
    U = X.names[0]
    P = _WComplex(E.parts[U], _graded(X, U, cap), bw[U])
    if X.is_affine:
        return _CechPair(P, None, None, None, None, None, None)
    V = X.names[1]
    Q = _WComplex(E.parts[V], _graded(X, V, cap), bw[V])
    O = _WComplex(E.restricted(V), _GradedRing(X.overlap_ring, X.overlap_weights(), cap), bw[V])
    alpha = {n: E.comparison[n] for n in E.parts[U].degrees}
    L = X.overlap_ring
    beta = {n: Matrix.identity(L, E.parts[V].rank(n)) for n in E.parts[V].degrees}
    return _CechPair(P, Q, O, alpha, beta, X.rho_U, X.rho_V)


def _check_window(C: _CechPair, window: int) -> dict[int, dict[int, int]]:
    """Homology by weight inside the window; the two rings outside must vanish."""
    dims = {}
    for m in range(-window, window + 1):
        h = C.homology_dims(m)
        if h:
            dims[m] = h
    for m in (window + 1, window + 2, -window - 1, -window - 2):
        if C.homology_dims(m):
            raise WindowError(f"homology in weight {m} lies outside the window {window}", suggested=window + 4)
    return dims


def hypercohomology(X: GluedScheme, E: GluedComplex, window: int = 8) -> dict[int, int]:
    """Dimensions of the Cech hypercohomology of ``E`` (window-checked)."""
    C = _cech_of_complex(X, E, window)
    total: dict[int, int] = {}
    for h in _check_window(C, window).values():
        for n, d in h.items():
            total[n] = total.get(n, 0) + d
    return dict(sorted(total.items()))


def cech_global_sections(X: GluedScheme, E: GluedComplex, window: int = 8) -> FreeComplex:
    """The Cech total complex over the base field, restricted to the weight window."""
    C = _cech_of_complex(X, E, window)
    _check_window(C, window)
    k = residue_algebra(X.patches[X.names[0]].field)
    F = k.field
    degs = C.degrees
    lo, hi = degs[0] - 1, degs[-1] + 1
    ranks = []
    for n in range(lo, hi + 1):
        ranks.append(sum(C.dim(n, m) for m in range(-window, window + 1)))
    diffs = {}
    for n in range(lo, hi):
        rs = [C.dim(n + 1, m) for m in range(-window, window + 1)]
        cs = [C.dim(n, m) for m in range(-window, window + 1)]
        rows = [[F.zero] * sum(cs) for _ in range(sum(rs))]
        ro = co = 0
        for i, m in enumerate(range(-window, window + 1)):
            if rs[i] and cs[i]:
                M = C.differential(n, m)
                for a in range(M.nrows):
                    for b in range(M.ncols):
                        rows[ro + a][co + b] = M[a, b]
            ro += rs[i]
            co += cs[i]
        diffs[n] = Matrix(k, [[k.const(x) for x in r] for r in rows], sum(cs), check=False)
    return FreeComplex(k, lo, ranks, diffs, cap=0)


# global sections of endomorphism algebras ----------------------------------------------------

def _post_matrix(L: PolyAlgebra, H1: HomLayout, H2: HomLayout, n: int, phi: ChainMap) -> Matrix:
    """``f -> phi o f`` from ``Hom^n(C, D)`` to ``Hom^n(C, D')``."""
    entries = {}
    for pos, i, r, c in H1.units(n):
        M = phi[i + n]
        for r2 in range(M.nrows):
            if M[r2, r]:
                entries[(H2.index(n, i, r2, c), pos)] = M[r2, r]
    return Matrix.from_dict(L, H2.ranks.get(n, 0), H1.ranks.get(n, 0), entries)


def _pre_matrix(L: PolyAlgebra, H1: HomLayout, H2: HomLayout, n: int, phi: ChainMap) -> Matrix:
    """``g -> g o phi`` from ``Hom^n(D', D')`` to ``Hom^n(C, D')``."""
    entries = {}
    for pos, i, r, c in H1.units(n):
        M = phi[i]
        for c2 in range(M.ncols):
            if M[c, c2]:
                key = (H2.index(n, i, r, c2), pos)
                entries[key] = entries.get(key, L.zero) + M[c, c2]
    return Matrix.from_dict(L, H2.ranks.get(n, 0), H1.ranks.get(n, 0), entries)


def _hom_weights(H: HomLayout, n: int, wC: dict, wD: dict) -> list:
    out = [0] * H.ranks.get(n, 0)
    for pos, i, r, c in H.units(n):
        out[pos] = wD[i + n][r] - wC[i][c]
    return out


def _compose(H_left: HomLayout, n_left: int, f: Sequence, H_right: HomLayout, n_right: int, g: Sequence,
             H_out: HomLayout) -> list:
    """``f o g`` for ``g: C -> D`` of degree ``n_right`` and ``f: D -> E`` of degree ``n_left``."""
    fm = H_left.to_matrices(n_left, f)
    gm = H_right.to_matrices(n_right, g)
    out = {}
    for i, G in gm.items():
        Fm = fm.get(i + n_right)
        if Fm is None:
            continue
        out[i] = Fm @ G
    return H_out.from_matrices(n_left + n_right, out) if (n_left + n_right) in H_out.ranks else []


@dataclass
class GlobalSections:
    algebra: DGAlgebra
    proper: bool
    dimensions: dict | None
    window: int | None = None
    weights: dict | None = None
    note: str = ""

    def summary(self) -> str:
        if self.dimensions is None:
            dims = "dimensions not computed"
        else:
            dims = ", ".join(f"H^{n}={d}" for n, d in sorted(self.dimensions.items()) if d) or "zero"
        return f"{dims}; {'proper' if self.proper else 'not proper'}" + (f" ({self.note})" if self.note else "")


class _EndCech:
    """``End(E_U) x_h End(E_V)`` over ``Hom(E_U|, E_V|)``: elements ``(f, g, h)`` with
    ``D(f, g, h) = (df, dg, -dh + g phi - phi f)`` and
    ``(f, g, h)(f', g', h') = (f f', g g', h f' + (-1)^|f| g h')``."""

    def __init__(self, X: GluedScheme, E: GluedComplex, window: int):
        U, V = X.names
        self.X, self.E = X, E
        bw = _complex_weights(X, E)
        EU, EV = E.parts[U], E.parts[V]
        TU, TV = E.restricted(U), E.restricted(V)
        phi = E.comparison
        L = X.overlap_ring
        self.HU, self.HV, self.HO = HomLayout(EU, EU), HomLayout(EV, EV), HomLayout(TU, TV)
        self.HTU, self.HTV = HomLayout(TU, TU), HomLayout(TV, TV)
        P, Q, O = hom_complex(EU, EU), hom_complex(EV, EV), hom_complex(TU, TV)
        wP = {n: _hom_weights(self.HU, n, bw[U], bw[U]) for n in P.degrees}
        wQ = {n: _hom_weights(self.HV, n, bw[V], bw[V]) for n in Q.degrees}
        wO = {n: _hom_weights(self.HO, n, bw[U], bw[V]) for n in O.degrees}
        S = max([abs(x) for d in (wP, wQ, wO) for v in d.values() for x in v] or [0])
        cap = _window_cap(window, S)
        self.pair = _CechPair(_WComplex(P, _graded(X, U, cap), wP), _WComplex(Q, _graded(X, V, cap), wQ),
                              _WComplex(O, _GradedRing(L, X.overlap_weights(), cap), wO),
                              {n: _post_matrix(L, self.HTU, self.HO, n, phi) for n in P.degrees},
                              {n: _pre_matrix(L, self.HTV, self.HO, n, phi) for n in Q.degrees},
                              X.rho_U, X.rho_V)

    def product(self, n1: int, m1: int, x: Sequence, n2: int, m2: int, y: Sequence) -> list:
        X = self.X
        C = self.pair
        f, g, h = C.split(n1, m1, x)
        f2, g2, h2 = C.split(n2, m2, y)
        n = n1 + n2
        ff = _compose(self.HU, n1, f, self.HU, n2, f2, self.HU) if f and f2 else []
        gg = _compose(self.HV, n1, g, self.HV, n2, g2, self.HV) if g and g2 else []
        hh = []
        if (n - 1) in self.HO.ranks:
            L = X.overlap_ring
            hh = [L.zero] * self.HO.ranks[n - 1]
            if h and f2:
                rf2 = [X.rho_U(a) for a in f2]
                t = _compose(self.HO, n1 - 1, h, self.HTU, n2, rf2, self.HO)
                hh = [a + b for a, b in zip(hh, t)]
            if g and h2:
                rg = [X.rho_V(a) for a in g]
                t = _compose(self.HTV, n1, rg, self.HO, n2 - 1, h2, self.HO)
                s = -1 if n1 % 2 else 1
                hh = [a + b * s for a, b in zip(hh, t)]
        P, Q = self.HU.ranks, self.HV.ranks
        ff = ff or ([self.X.patches[X.names[0]].zero] * P.get(n, 0))
        gg = gg or ([self.X.patches[X.names[1]].zero] * Q.get(n, 0))
        return C.join(n, m1 + m2, ff, gg, hh)

    def unit(self) -> list:
        X, E = self.X, self.E
        U, V = X.names
        f = [X.patches[U].zero] * self.HU.ranks.get(0, 0)
        g = [X.patches[V].zero] * self.HV.ranks.get(0, 0)
        for i in E.parts[U].degrees:
            for r in range(E.parts[U].rank(i)):
                f[self.HU.index(0, i, r, r)] = X.patches[U].one
        for i in E.parts[V].degrees:
            for r in range(E.parts[V].rank(i)):
                g[self.HV.index(0, i, r, r)] = X.patches[V].one
        return self.pair.join(0, 0, f, g, [X.overlap_ring.zero] * self.HO.ranks.get(-1, 0))


class _Cohomology:
    """A complement basis of ``ker D / im D`` in one (degree, weight) piece."""

    def __init__(self, C: _CechPair, n: int, m: int):
        F = C.P.ring.alg.field
        dim = C.dim(n, m)
        self.dim = dim
        Dout = C.differential(n, m) if C.dim(n + 1, m) else None
        Din = C.differential(n - 1, m) if C.dim(n - 1, m) else None
        if Dout is not None:
            K = kernel_basis(Dout)
            kcols = [list(K.column(j)) for j in range(K.ncols)]
        else:
            kcols = [[F.one if i == j else F.zero for i in range(dim)] for j in range(dim)]
        icols = [list(Din.column(j)) for j in range(Din.ncols)] if Din is not None else []
        basis = []
        current = [c for c in icols]
        r0 = rank(Matrix.from_columns(F, dim, current)) if current else 0
        self.image_rank = r0
        for v in kcols:
            trial = current + [v]
            r = rank(Matrix.from_columns(F, dim, trial))
            if r > r0:
                current, r0 = trial, r
                basis.append(v)
        self.image = [c for c in icols]
        self.reps = basis
        self.F = F

    def coordinates(self, z: Sequence) -> list:
        cols = self.image + self.reps
        if not cols:
            return []
        M = Matrix.from_columns(self.F, self.dim, cols)
        x = solve(M, list(z))
        if x is None:
            raise ArithmeticError("product is not a cocycle")
        return x[len(self.image):]


def global_sections_dg_algebra(X: GluedScheme, B, window: int = 8) -> GlobalSections:
    """Global sections of ``End(E)`` for a glued complex ``E``.

    On two patches the result is the cohomology algebra of the Cech model
    (a dg-algebra over the base field with zero differential).  On a single
    patch ``B`` itself is returned, flagged proper only over a field.
    """
    if X.is_affine:
        if isinstance(B, GluedComplex):
            B = end_dga(B.parts[X.names[0]])
        A = B.base
        proper = A.nvars == 0
        note = "" if proper else "affine patch with positive-dimensional base"
        dims = homology(B.complex).dimensions() if proper else None
        return GlobalSections(B, proper, dims, None, None, note)
    if not isinstance(B, GluedComplex):
        raise TypeError("on two patches pass the glued complex whose endomorphisms are wanted")
    M = _EndCech(X, B, window)
    C = M.pair
    try:
        dims_by_weight = _check_window(C, window)
        stable = True
    except WindowError:
        dims_by_weight = {m: C.homology_dims(m) for m in range(-window, window + 1)}
        dims_by_weight = {m: h for m, h in dims_by_weight.items() if h}
        stable = False
    pieces = {}
    for m, h in dims_by_weight.items():
        for n in h:
            pieces[(n, m)] = _Cohomology(C, n, m)
    order = sorted(pieces, key=lambda nm: (nm[0], nm[1]))
    basis = [(n, m, j) for (n, m) in order for j in range(len(pieces[(n, m)].reps))]
    pos = {b: i for i, b in enumerate(basis)}
    k = residue_algebra(X.patches[X.names[0]].field)
    table = {}
    for p, (n1, m1, j1) in enumerate(basis):
        x = pieces[(n1, m1)].reps[j1]
        for q, (n2, m2, j2) in enumerate(basis):
            y = pieces[(n2, m2)].reps[j2]
            key = (n1 + n2, m1 + m2)
            z = M.product(n1, m1, x, n2, m2, y)
            if key not in pieces:
                if any(z) and C.dim(*key):
                    # must be a coboundary
                    H = _Cohomology(C, *key)
                    if H.reps and any(H.coordinates(z)):
                        raise WindowError("a product has cohomology outside the window", window + 4)
                continue
            row = {}
            for j, c in enumerate(pieces[key].coordinates(z)):
                if c:
                    row[pos[(key[0], key[1], j)]] = c
            if row:
                table[(p, q)] = row
    unit = [k.zero] * len(basis)
    if (0, 0) in pieces:
        for j, c in enumerate(pieces[(0, 0)].coordinates(M.unit())):
            unit[pos[(0, 0, j)]] = k.const(c)
    dims: dict[int, int] = {}
    for (n, m), H in pieces.items():
        dims[n] = dims.get(n, 0) + len(H.reps)
    degs = sorted(dims)
    if degs:
        underlying = FreeComplex(k, degs[0], [dims.get(n, 0) for n in range(degs[0], degs[-1] + 1)])
    else:
        underlying = zero_complex(k)
    alg = DGAlgebra(underlying, table, unit, name="global sections")
    return GlobalSections(alg, stable, dict(sorted(dims.items())), window,
                          {b: b[1] for b in basis}, "" if stable else "window not stable")
