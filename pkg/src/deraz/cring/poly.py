"""Finitely presented commutative algebras ``k[x1..xn]/I``.

Elements are kept in normal form with respect to the reduced Groebner
basis of ``I``, so equality of elements is equality of term dictionaries.
"""
from __future__ import annotations

import re
from fractions import Fraction
from itertools import product as iproduct
from typing import Iterable, Mapping, Sequence

from ..scalars import Field, FpElement, parse_field
from .groebner import MonomialOrder, groebner_polys, reduce_poly


class ParseError(ValueError):
    def __init__(self, message: str, text: str = "", offset: int | None = None):
        self.text = text
        self.offset = offset
        if offset is not None:
            message = f"{message} at column {offset + 1} of {text!r}"
        super().__init__(message)


class NotInvertible(ArithmeticError):
    pass


class Element:
    """Element of a :class:`PolyAlgebra`, stored in normal form."""

    __slots__ = ("alg", "terms", "_hash")

    def __init__(self, alg: "PolyAlgebra", terms: dict):
        self.alg = alg
        self.terms = terms
        self._hash = None

    def _other(self, other) -> dict:
        if isinstance(other, Element):
            if other.alg is not self.alg:
                raise ValueError("elements of different algebras")
            return other.terms
        return self.alg(other).terms

    def __add__(self, other):
        t = dict(self.terms)
        for e, c in self._other(other).items():
            v = t.get(e, 0) + c
            if v:
                t[e] = v
            else:
                t.pop(e, None)
        return Element(self.alg, t)

    __radd__ = __add__

    def __neg__(self):
        return Element(self.alg, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        t = dict(self.terms)
        for e, c in self._other(other).items():
            v = t.get(e, 0) - c
            if v:
                t[e] = v
            else:
                t.pop(e, None)
        return Element(self.alg, t)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._other(other)
        a = self.terms
        if not a or not o:
            return self.alg.zero
        z = self.alg._zero_exp
        if len(o) == 1 and z in o:
            c = o[z]
            return Element(self.alg, {e: v * c for e, v in a.items()})
        if len(a) == 1 and z in a:
            c = a[z]
            return Element(self.alg, {e: v * c for e, v in o.items()})
        return Element(self.alg, self.alg._nf(_mul_terms(a, o)))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.alg.inverse(self) ** (-n)
        result = self.alg.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __truediv__(self, other):
        if not isinstance(other, Element):
            c = self.alg.field(other)
            inv = 1 / c
            return Element(self.alg, {e: v * inv for e, v in self.terms.items()})
        return self * self.alg.inverse(other)

    def __eq__(self, other):
        if isinstance(other, Element):
            return self.alg is other.alg and self.terms == other.terms
        try:
            return self.terms == self.alg(other).terms
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_value(self):
        """Field value of a constant element."""
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        z = tuple([0] * self.alg.nvars)
        return self.terms.get(z, self.alg.field.zero)

    def leading_exponent(self) -> tuple:
        return max(self.terms, key=self.alg.order.key)

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, var: int) -> int:
        return max((e[var] for e in self.terms), default=-1)

    def evaluate(self, values: Sequence):
        """Value in the base field at a tuple of field values."""
        F = self.alg.field
        total = F.zero
        for e, c in self.terms.items():
            v = c
            for x, k in zip(values, e):
                if k:
                    v = v * x ** k
            total = total + v
        return total

    def __repr__(self):
        return f"Element({self})"

    def __str__(self):
        return self.alg.format(self.terms)


def _mul_terms(a: dict, b: dict) -> dict:
    out: dict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            v = out.get(e, 0) + ca * cb
            if v:
                out[e] = v
            else:
                out.pop(e, None)
    return out


_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([A-Za-z_][A-Za-z_0-9']*)|(\*\*|[-+*/^()]))")


def _tokenize(text: str):
    pos = 0
    toks = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError("unexpected character", text, pos)
        num, name, op = m.groups()
        start = m.start(1) if num else m.start(2) if name else m.start(3)
        if num:
            toks.append(("num", num, start))
        elif name:
            toks.append(("name", name, start))
        else:
            toks.append(("op", "^" if op == "**" else op, start))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    """Recursive-descent evaluator for polynomial expressions in an algebra."""

    def __init__(self, alg: "PolyAlgebra", text: str, extra: Mapping[str, "Element"] | None = None):
        self.alg = alg
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.extra = extra or {}

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def parse(self) -> "Element":
        if self.peek()[0] == "end":
            raise ParseError("empty expression", self.text, 0)
        v = self.expr()
        t = self.peek()
        if t[0] != "end":
            raise ParseError(f"unexpected {t[1]!r}", self.text, t[2])
        return v

    def expr(self):
        v = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            w = self.term()
            v = v + w if op == "+" else v - w
        return v

    def term(self):
        v = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            w = self.unary()
            if op == "*":
                v = v * w
            else:
                if w.is_constant():
                    c = w.constant_value()
                    if not c:
                        raise ParseError("division by zero", self.text, self.toks[self.i - 1][2])
                    v = v / c
                else:
                    try:
                        v = v * self.alg.inverse(w)
                    except NotInvertible:
                        raise ParseError(f"{w} is not invertible", self.text, self.toks[self.i - 1][2])
        return v

    def unary(self):
        t = self.peek()
        if t[0] == "op" and t[1] in ("-", "+"):
            self.take()
            v = self.unary()
            return -v if t[1] == "-" else v
        return self.power()

    def power(self):
        v = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            sign = 1
            if self.peek()[0] == "op" and self.peek()[1] == "-":
                self.take()
                sign = -1
            t = self.take()
            if t[0] != "num" or "/" in t[1]:
                raise ParseError("exponent must be an integer", self.text, t[2])
            n = sign * int(t[1])
            try:
                v = v ** n
            except NotInvertible:
                raise ParseError(f"{v} is not invertible", self.text, t[2])
        return v

    def atom(self):
        t = self.take()
        if t[0] == "num":
            return self.alg.const(Fraction(t[1]))
        if t[0] == "name":
            if t[1] in self.extra:
                return self.extra[t[1]]
            try:
                return self.alg.gen(t[1])
            except KeyError:
                raise ParseError(f"unknown variable {t[1]!r}", self.text, t[2])
        if t[0] == "op" and t[1] == "(":
            v = self.expr()
            c = self.take()
            if c[1] != ")":
                raise ParseError("expected ')'", self.text, c[2])
            return v
        raise ParseError(f"unexpected {t[1]!r}" if t[1] else "unexpected end", self.text, t[2])


class PolyAlgebra:
    """``field[variables] / (relations)`` with a cached reduced Groebner basis."""

    def __init__(self, field: Field | str, variables: Sequence[str] = (), relations: Iterable = (),
                 order="degrevlex"):
        if isinstance(field, str):
            field = parse_field(field)
        self.field = field
        self.variables = tuple(variables)
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("duplicate variable names")
        self.nvars = len(self.variables)
        self.order = MonomialOrder.parse(self.nvars, order)
        self._index = {v: i for i, v in enumerate(self.variables)}
        self._zero_exp = tuple([0] * self.nvars)
        # free mode while the relations are parsed
        self._gb: list[tuple[tuple, dict]] = []
        self.relations: tuple = ()
        self._free = None
        self.zero = Element(self, {})
        self.one = Element(self, {self._zero_exp: field.one})
        rels = []
        for r in relations:
            d = self._free_terms(r)
            if d:
                rels.append(d)
        self.relations = tuple(rels)
        gb = groebner_polys(rels, self.order) if rels else []
        self.groebner = tuple(gb)
        key = self.order.key
        self._gb = [(max(g, key=key), g) for g in gb]
        self.one = self.const(1)

    # construction helpers -------------------------------------------------
    def _free_terms(self, r) -> dict:
        """Polynomial ``r`` as a raw term dictionary (no reduction)."""
        if isinstance(r, Element):
            if r.alg.variables != self.variables or r.alg.field is not self.field:
                raise ValueError("relation from an incompatible algebra")
            return dict(r.terms)
        if isinstance(r, dict):
            return {tuple(e): self.field(c) for e, c in r.items() if c}
        if isinstance(r, str):
            return dict(self.free_cover().parse(r).terms)
        c = self.field(r)
        return {self._zero_exp: c} if c else {}

    def free_cover(self) -> "PolyAlgebra":
        if not self.relations:
            return self
        if self._free is None:
            self._free = PolyAlgebra(self.field, self.variables, (), self.order)
        return self._free

    def _nf(self, terms: dict) -> dict:
        return reduce_poly(terms, self._gb, self.order) if self._gb else terms

    def element(self, terms: dict) -> Element:
        return Element(self, self._nf({e: c for e, c in terms.items() if c}))

    def const(self, c) -> Element:
        c = self.field(c)
        if not c:
            return Element(self, {})
        return Element(self, self._nf({self._zero_exp: c}))

    def gen(self, name: str | int) -> Element:
        i = self._index[name] if isinstance(name, str) else name
        e = [0] * self.nvars
        e[i] = 1
        return Element(self, self._nf({tuple(e): self.field.one}))

    @property
    def gens(self) -> tuple[Element, ...]:
        return tuple(self.gen(i) for i in range(self.nvars))

    def monomial(self, exp: Sequence[int], coeff=1) -> Element:
        return self.element({tuple(exp): self.field(coeff)})

    def parse(self, text: str, extra: Mapping[str, Element] | None = None) -> Element:
        return _Parser(self, text, extra).parse()

    def __call__(self, x) -> Element:
        if isinstance(x, Element):
            if x.alg is self:
                return x
            if x.alg.field is self.field and x.alg.variables == self.variables:
                return self.element(x.terms)
            raise ValueError(f"cannot convert element of {x.alg} into {self}")
        if isinstance(x, str):
            return self.parse(x)
        if isinstance(x, (int, Fraction, FpElement)):
            return self.const(x)
        raise TypeError(f"cannot convert {x!r} into {self}")

    def owns(self, x) -> bool:
        return isinstance(x, Element) and x.alg is self

    # structure ----------------------------------------------------------
    @property
    def is_zero_ring(self) -> bool:
        return bool(self._gb) and self._gb[0][0] == self._zero_exp

    def is_field(self) -> bool:
        """True for the base field itself (no variables, not the zero ring)."""
        return self.nvars == 0 and not self.is_zero_ring

    def is_standard(self, exp: tuple) -> bool:
        return not any(all(a <= b for a, b in zip(l, exp)) for l, _ in self._gb)

    def leading_exponents(self) -> list[tuple]:
        return [l for l, _ in self._gb]

    def monomial_basis(self, limit: int = 10000) -> list[tuple] | None:
        """Standard monomials when ``dim_k A`` is finite (and at most ``limit``)."""
        if self.is_zero_ring:
            return []
        lead = self.leading_exponents()
        bounds = []
        for i in range(self.nvars):
            pure = [l[i] for l in lead if l[i] > 0 and sum(l) == l[i]]
            if not pure:
                return None
            bounds.append(min(pure))
        out = []
        for e in iproduct(*[range(b) for b in bounds]):
            if self.is_standard(e):
                out.append(e)
                if len(out) > limit:
                    return None
        out.sort(key=self.order.key)
        return out

    def inverse(self, a: Element) -> Element:
        """Inverse of a unit, found by lifting 1 into the ideal ``(a)``."""
        a = self(a)
        if a.is_constant() and a:
            return self.const(1 / a.constant_value())
        from .modules import SubmoduleBasis

        sb = SubmoduleBasis(self, 1, [(a,)], track=True)
        coeffs = sb.lift((self.one,))
        if coeffs is None:
            raise NotInvertible(f"{a} is not a unit in {self}")
        return coeffs[0]

    def format(self, terms: dict) -> str:
        if not terms:
            return "0"
        key = self.order.key
        parts = []
        for e in sorted(terms, key=key, reverse=True):
            c = terms[e]
            mono = "*".join(
                (v if k == 1 else f"{v}^{k}") for v, k in zip(self.variables, e) if k
            )
            cs = str(c)
            if not mono:
                parts.append(cs)
            elif cs == "1":
                parts.append(mono)
            elif cs == "-1":
                parts.append("-" + mono)
            else:
                parts.append(f"{cs}*{mono}" if "/" not in cs else f"({cs})*{mono}")
        s = " + ".join(parts)
        return s.replace("+ -", "- ")

    def describe(self) -> str:
        rels = ", ".join(f'"{self.free_cover().format(r)}"' for r in self.relations)
        return (f'algebra {{ field = "{self.field.name}"; vars = [{", ".join(self.variables)}]; '
                f'relations = [{rels}]; order = "{self.order.name}" }}')

    def __repr__(self):
        v = ",".join(self.variables)
        if self.relations:
            rels = ", ".join(self.free_cover().format(r) for r in self.relations)
            return f"{self.field.name}[{v}]/({rels})"
        return f"{self.field.name}[{v}]"

    # constructions ---------------------------------------------------------
    def extend(self, new_vars: Sequence[str], new_relations: Iterable = (), kind: str = "degrevlex",
               inner=None) -> "PolyAlgebra":
        """``self[new_vars]/(new_relations)`` with an elimination order for the new block.

        New variables come first, so standard monomials give a basis over
        ``self`` when the extension is finite free.
        """
        names = tuple(new_vars) + self.variables
        blocks = [(len(new_vars), kind)] + list(self.order.blocks)
        big = PolyAlgebra(self.field, names, (), blocks)
        shift = len(new_vars)
        rels = []
        for r in self.relations:
            rels.append({tuple([0] * shift) + e: c for e, c in r.items()})
        extra = {v: big.gen(v) for v in names}
        for r in new_relations:
            if isinstance(r, str):
                rels.append(dict(big.parse(r, extra).terms))
            elif isinstance(r, Element) and r.alg is big:
                rels.append(dict(r.terms))
            else:
                rels.append(big._free_terms(r))
        return PolyAlgebra(self.field, names, rels, blocks)

    def include(self, target: "PolyAlgebra") -> "RingMap":
        """Inclusion into an algebra built by :meth:`extend` (variables matched by name)."""
        return RingMap(self, target, [target.gen(v) for v in self.variables])


class RingMap:
    """Algebra homomorphism given by images of the generators."""

    def __init__(self, domain: PolyAlgebra, codomain: PolyAlgebra, images: Sequence, check: bool = True):
        if len(images) != domain.nvars:
            raise ValueError("one image per generator is required")
        if domain.field is not codomain.field:
            raise ValueError("ring maps must be over the same field")
        self.domain = domain
        self.codomain = codomain
        self.images = tuple(codomain(x) for x in images)
        self._cache: dict = {}
        if check:
            for r in domain.relations:
                if self._apply_terms(r):
                    raise ValueError(f"relation {domain.free_cover().format(r)} does not map to zero")

    def _power(self, i: int, k: int) -> Element:
        key = (i, k)
        v = self._cache.get(key)
        if v is None:
            v = self.images[i] ** k
            self._cache[key] = v
        return v

    def _apply_terms(self, terms: dict) -> Element:
        cod = self.codomain
        total = cod.zero
        for e, c in terms.items():
            m = cod.const(c)
            for i, k in enumerate(e):
                if k:
                    m = m * self._power(i, k)
            total = total + m
        return total

    def __call__(self, x) -> Element:
        x = self.domain(x)
        return self._apply_terms(x.terms)

    def compose(self, other: "RingMap") -> "RingMap":
        """``self`` after ``other``."""
        return RingMap(other.domain, self.codomain, [self(y) for y in other.images], check=False)

    def __repr__(self):
        pairs = ", ".join(f"{v} -> {y}" for v, y in zip(self.domain.variables, self.images))
        return f"RingMap({self.domain} -> {self.codomain}: {pairs})"
