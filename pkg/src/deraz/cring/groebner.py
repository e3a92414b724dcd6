"""Buchberger's algorithm for submodules of free modules over k[x1..xn].

Vectors are dictionaries ``{(position, exponent_tuple): coefficient}``;
ideals are the special case where every position is 0.  Module terms are
ordered position-over-term with *lower* positions larger, which makes the
leading block of positions an elimination block (used for syzygies and
lifting).  Pairs are selected by the sugar strategy and pruned with the
Gebauer-Moeller criteria.
"""
from __future__ import annotations

import heapq
from typing import Callable, Iterable

Term = tuple  # (pos, exp)


class MonomialOrder:
    """Monomial order given as a sequence of blocks ``(size, kind)``.

    ``kind`` is ``"lex"`` or ``"degrevlex"``.  A single block is an ordinary
    order; several blocks form a product (elimination) order in which the
    first block dominates.
    """

    def __init__(self, nvars: int, blocks: Iterable[tuple[int, str]] | str = "degrevlex"):
        if isinstance(blocks, str):
            blocks = [(nvars, blocks)]
        blocks = [(int(n), k) for n, k in blocks if n > 0]
        if sum(n for n, _ in blocks) != nvars:
            raise ValueError("block sizes must add up to the number of variables")
        for _, k in blocks:
            if k not in ("lex", "degrevlex"):
                raise ValueError(f"unknown monomial order {k!r}")
        self.nvars = nvars
        self.blocks = tuple(blocks)
        self._cache: dict = {}

    @classmethod
    def parse(cls, nvars: int, spec) -> "MonomialOrder":
        if isinstance(spec, MonomialOrder):
            if spec.nvars != nvars:
                raise ValueError("order has the wrong number of variables")
            return spec
        return cls(nvars, spec)

    @property
    def name(self) -> str:
        if len(self.blocks) <= 1:
            return self.blocks[0][1] if self.blocks else "degrevlex"
        return "block(" + ",".join(f"{k}:{n}" for n, k in self.blocks) + ")"

    def key(self, exp: tuple):
        k = self._cache.get(exp)
        if k is None:
            parts = []
            i = 0
            for n, kind in self.blocks:
                e = exp[i:i + n]
                i += n
                if kind == "lex":
                    parts.append(e)
                else:
                    parts.append((sum(e), tuple(-a for a in reversed(e))))
            k = tuple(parts)
            self._cache[exp] = k
        return k

    def __eq__(self, other):
        return isinstance(other, MonomialOrder) and self.blocks == other.blocks

    def __hash__(self):
        return hash(self.blocks)

    def __repr__(self):
        return f"MonomialOrder({self.name})"


def _divides(a: tuple, b: tuple) -> bool:
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


def _lcm(a: tuple, b: tuple) -> tuple:
    return tuple(x if x > y else y for x, y in zip(a, b))


class _Entry:
    __slots__ = ("vec", "pos", "exp", "sugar")

    def __init__(self, vec: dict, pos: int, exp: tuple, sugar: int):
        self.vec = vec
        self.pos = pos
        self.exp = exp
        self.sugar = sugar


def term_key(order: MonomialOrder) -> Callable:
    mkey = order.key
    return lambda t: (-t[0], mkey(t[1]))


def leading_term(vec: dict, order: MonomialOrder) -> Term:
    return max(vec, key=term_key(order))


def _monic(vec: dict, lt: Term) -> dict:
    c = vec[lt]
    if c == 1:
        return vec
    inv = 1 / c
    return {t: v * inv for t, v in vec.items()}


def reduce_vector(vec: dict, basis: list, order: MonomialOrder) -> dict:
    """Full normal form of ``vec`` modulo monic ``basis`` entries."""
    key = term_key(order)
    f = dict(vec)
    out = {}
    by_pos: dict[int, list] = {}
    for g in basis:
        by_pos.setdefault(g.pos, []).append(g)
    while f:
        t = max(f, key=key)
        c = f.pop(t)
        pos, exp = t
        for g in by_pos.get(pos, ()):
            if _divides(g.exp, exp):
                shift = tuple(a - b for a, b in zip(exp, g.exp))
                for (gp, ge), gc in g.vec.items():
                    if gp == pos and ge == g.exp:
                        continue
                    nt = (gp, tuple(a + b for a, b in zip(ge, shift)))
                    nv = f.get(nt, 0) - c * gc
                    if nv:
                        f[nt] = nv
                    else:
                        f.pop(nt, None)
                break
        else:
            out[t] = c
    return out


def _spoly(a: _Entry, b: _Entry) -> tuple[dict, int]:
    l = _lcm(a.exp, b.exp)
    sa = tuple(x - y for x, y in zip(l, a.exp))
    sb = tuple(x - y for x, y in zip(l, b.exp))
    out: dict = {}
    for (p, e), c in a.vec.items():
        out[(p, tuple(x + y for x, y in zip(e, sa)))] = c
    for (p, e), c in b.vec.items():
        t = (p, tuple(x + y for x, y in zip(e, sb)))
        nv = out.get(t, 0) - c
        if nv:
            out[t] = nv
        else:
            out.pop(t, None)
    sugar = max(a.sugar + sum(sa), b.sugar + sum(sb))
    return out, sugar


def groebner_vectors(gens: Iterable[dict], order: MonomialOrder) -> list[dict]:
    """Reduced Groebner basis (monic, sorted by decreasing leading term)."""
    key = term_key(order)
    gens = [dict(g) for g in gens if g]
    gens = [{t: c for t, c in g.items() if c} for g in gens]
    gens = [g for g in gens if g]
    if not gens:
        return []
    is_ideal = all(t[0] == 0 for g in gens for t in g)
    gens.sort(key=lambda g: key(max(g, key=key)))

    entries: list[_Entry] = []
    active: list[int] = []
    pairs: set = set()
    heap: list = []

    def lcm_of(i, j):
        return _lcm(entries[i].exp, entries[j].exp)

    def coprime(i, j):
        return is_ideal and all(x == 0 or y == 0 for x, y in zip(entries[i].exp, entries[j].exp))

    def add(vec: dict, sugar: int):
        lt = max(vec, key=key)
        vec = _monic(vec, lt)
        h = len(entries)
        entries.append(_Entry(vec, lt[0], lt[1], sugar))
        eh = entries[h]
        same = [g for g in active if entries[g].pos == eh.pos]
        C = list(same)
        D: list[int] = []
        while C:
            g1 = C.pop(0)
            l1 = lcm_of(h, g1)
            if coprime(h, g1) or (
                not any(_divides(lcm_of(h, g2), l1) for g2 in C)
                and not any(_divides(lcm_of(h, g2), l1) for g2 in D)
            ):
                D.append(g1)
        E = [g for g in D if not coprime(h, g)]
        dead = []
        for (g1, g2) in pairs:
            if entries[g1].pos != eh.pos:
                continue
            l12 = lcm_of(g1, g2)
            if _divides(eh.exp, l12) and lcm_of(g1, h) != l12 and lcm_of(h, g2) != l12:
                dead.append((g1, g2))
        for d in dead:
            pairs.discard(d)
        for g in E:
            pr = (g, h)
            pairs.add(pr)
            a, b = entries[g], eh
            l = lcm_of(g, h)
            s = max(a.sugar + sum(l) - sum(a.exp), b.sugar + sum(l) - sum(b.exp))
            heapq.heappush(heap, (s, key((eh.pos, l)), g, h))
        active[:] = [g for g in active if not (entries[g].pos == eh.pos and _divides(eh.exp, entries[g].exp))]
        active.append(h)

    for g in gens:
        r = reduce_vector(g, [entries[i] for i in active], order)
        if r:
            add(r, max(sum(t[1]) for t in g))

    while heap:
        s, _, i, j = heapq.heappop(heap)
        if (i, j) not in pairs:
            continue
        pairs.discard((i, j))
        sp, sugar = _spoly(entries[i], entries[j])
        if not sp:
            continue
        r = reduce_vector(sp, [entries[k] for k in active], order)
        if r:
            add(r, sugar)

    basis = [entries[i] for i in active]
    out = []
    for idx, g in enumerate(basis):
        others = basis[:idx] + basis[idx + 1:]
        lt = (g.pos, g.exp)
        tail = {t: c for t, c in g.vec.items() if t != lt}
        red = reduce_vector(tail, others, order)
        red[lt] = g.vec[lt]
        out.append(red)
    out.sort(key=lambda v: key(max(v, key=key)), reverse=True)
    return out


def entries_from(basis: Iterable[dict], order: MonomialOrder) -> list[_Entry]:
    """Wrap a monic basis for use with :func:`reduce_vector`."""
    key = term_key(order)
    out = []
    for v in basis:
        lt = max(v, key=key)
        v = _monic(v, lt)
        out.append(_Entry(v, lt[0], lt[1], 0))
    return out


def groebner_polys(gens: Iterable[dict], order: MonomialOrder) -> list[dict]:
    """Reduced Groebner basis of an ideal; polynomials are ``{exp: coeff}``."""
    vecs = [{(0, e): c for e, c in g.items()} for g in gens]
    return [{e: c for (_, e), c in v.items()} for v in groebner_vectors(vecs, order)]


def reduce_poly(f: dict, basis: list[tuple[tuple, dict]], order: MonomialOrder) -> dict:
    """Normal form of a polynomial modulo a monic basis given as ``(lead_exp, poly)``."""
    if not basis:
        return {e: c for e, c in f.items() if c}
    mkey = order.key
    f = {e: c for e, c in f.items() if c}
    out = {}
    while f:
        t = max(f, key=mkey)
        c = f.pop(t)
        for lexp, g in basis:
            if _divides(lexp, t):
                shift = tuple(a - b for a, b in zip(t, lexp))
                for ge, gc in g.items():
                    if ge == lexp:
                        continue
                    nt = tuple(a + b for a, b in zip(ge, shift))
                    nv = f.get(nt, 0) - c * gc
                    if nv:
                        f[nt] = nv
                    else:
                        f.pop(nt, None)
                break
        else:
            out[t] = c
    return out
