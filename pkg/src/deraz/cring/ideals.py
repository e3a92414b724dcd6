"""Ideals, radical membership and localization."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .groebner import MonomialOrder, groebner_polys, reduce_poly
from .poly import Element, PolyAlgebra, RingMap


class ZeroLocalization(ValueError):
    """Localizing at the zero element."""


class Ideal:
    """Ideal of a :class:`PolyAlgebra` given by generators.

    The Groebner basis is computed in the free cover together with the
    relations of the algebra, so membership is exact in the quotient.
    """

    def __init__(self, alg: PolyAlgebra, gens: Iterable = ()):
        self.alg = alg
        self.gens = tuple(g for g in (alg(x) for x in gens) if g)
        self._basis = None

    @property
    def basis(self) -> list[tuple[tuple, dict]]:
        if self._basis is None:
            polys = [dict(g.terms) for g in self.gens] + [dict(r) for r in self.alg.groebner]
            gb = groebner_polys(polys, self.alg.order) if polys else []
            key = self.alg.order.key
            self._basis = [(max(g, key=key), g) for g in gb]
        return self._basis

    def normal_form(self, f) -> Element:
        f = self.alg(f)
        return Element(self.alg, reduce_poly(f.terms, self.basis, self.alg.order))

    def contains(self, f) -> bool:
        return not self.normal_form(f)

    __contains__ = contains

    def is_unit(self) -> bool:
        """True when the ideal is the whole ring."""
        z = self.alg._zero_exp
        return any(l == z for l, _ in self.basis)

    def is_zero(self) -> bool:
        return not self.gens

    def __add__(self, other: "Ideal") -> "Ideal":
        return Ideal(self.alg, self.gens + other.gens)

    def __mul__(self, other: "Ideal") -> "Ideal":
        return Ideal(self.alg, [a * b for a in self.gens for b in other.gens])

    def __eq__(self, other):
        if not isinstance(other, Ideal) or other.alg is not self.alg:
            return NotImplemented
        return all(other.contains(g) for g in self.gens) and all(self.contains(g) for g in other.gens)

    def __hash__(self):
        return hash(self.alg)

    def __repr__(self):
        return "(" + ", ".join(str(g) for g in self.gens) + ")" if self.gens else "(0)"


def groebner_basis(generators: Sequence, order="degrevlex", alg: PolyAlgebra | None = None) -> list[Element]:
    """Reduced Groebner basis of the ideal generated by ``generators`` in the free cover."""
    if alg is None:
        alg = generators[0].alg
    free = alg.free_cover()
    order = MonomialOrder.parse(free.nvars, order)
    polys = [free._free_terms(g) for g in generators]
    gb = groebner_polys([p for p in polys if p], order)
    return [Element(free, g) for g in gb]


def radical_membership(f, I: Ideal) -> bool:
    """Whether ``f`` vanishes on ``V(I)``: test ``1 in I + (y f - 1)``."""
    A = I.alg
    f = A(f)
    if not f:
        return True
    big = A.extend(["_rab"], [], "degrevlex")
    inc = A.include(big)
    y = big.gen("_rab")
    J = Ideal(big, [inc(g) for g in I.gens] + [y * inc(f) - 1])
    return J.is_unit()


def is_nilpotent(f) -> bool:
    f = f.alg(f) if isinstance(f, Element) else f
    return radical_membership(f, Ideal(f.alg, []))


@dataclass(frozen=True)
class Localization:
    """``A[1/f]`` presented as ``A[y]/(y f - 1)``, with the canonical map from ``A``."""

    base: PolyAlgebra
    f: Element
    algebra: PolyAlgebra
    map: RingMap
    inverse: Element  # the image of 1/f

    def in_image(self, g) -> bool:
        """Whether ``g`` lies in the image of the base algebra (``y``-free normal form)."""
        g = self.algebra(g)
        return all(e[0] == 0 for e in g.terms)

    def preimage(self, g) -> Element:
        if not self.in_image(g):
            raise ValueError(f"{g} is not in the image of {self.base}")
        return self.base.element({e[1:]: c for e, c in self.algebra(g).terms.items()})


def _fresh(alg: PolyAlgebra, stem: str = "u") -> str:
    i = 0
    while f"{stem}{i}" in alg.variables:
        i += 1
    return f"{stem}{i}"


def localize(A: PolyAlgebra, f, name: str | None = None) -> Localization:
    """Rabinowitsch presentation of ``A[1/f]``; the new variable is eliminated first."""
    f = A(f)
    if not f:
        raise ZeroLocalization(f"cannot invert zero in {A}")
    name = name or _fresh(A)
    big = A.extend([name], [], "degrevlex")
    inc = A.include(big)
    y = big.gen(name)
    rabinowitsch = y * inc(f) - 1
    L = PolyAlgebra(A.field, big.variables, list(big.relations) + [dict(rabinowitsch.terms)], big.order)
    m = RingMap(A, L, [L.gen(v) for v in A.variables])
    return Localization(A, f, L, m, L.gen(name))
