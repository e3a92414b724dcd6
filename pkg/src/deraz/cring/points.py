"""Rational points of ``Spec A`` and evaluation of matrices and complexes at them."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct
from typing import Iterator, Mapping

from ..scalars import Field, Matrix
from .poly import Element, PolyAlgebra, RingMap


class PointMismatch(ValueError):
    """The assignment does not satisfy the relations of the algebra."""


@dataclass(frozen=True)
class PointSpec:
    """A point of ``Spec A`` with values in the base field.

    Only the base field itself is supported as a residue field; the
    relations are checked on construction.
    """

    alg: PolyAlgebra
    values: tuple
    target_field: Field = field(init=False)

    def __post_init__(self):
        F = self.alg.field
        vals = self.values
        if isinstance(vals, Mapping):
            missing = [v for v in self.alg.variables if v not in vals]
            if missing:
                raise PointMismatch(f"no value for {', '.join(missing)}")
            vals = [vals[v] for v in self.alg.variables]
        vals = tuple(F(v) for v in vals)
        if len(vals) != self.alg.nvars:
            raise PointMismatch(f"{len(vals)} values for {self.alg.nvars} variables")
        for r in self.alg.relations:
            if Element(self.alg.free_cover(), dict(r)).evaluate(vals):
                raise PointMismatch(f"relation {self.alg.free_cover().format(r)} does not vanish")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "target_field", F)

    def __call__(self, f):
        return self.alg(f).evaluate(self.values)

    def as_dict(self) -> dict:
        return {v: x for v, x in zip(self.alg.variables, self.values)}

    def __str__(self):
        if not self.values:
            return "(the point of Spec k)"
        return "(" + ", ".join(f"{v}={x}" for v, x in zip(self.alg.variables, self.values)) + ")"


_residue_cache: dict = {}


def residue_algebra(F: Field) -> PolyAlgebra:
    """The base field as a zero-variable :class:`PolyAlgebra` (cached per field)."""
    R = _residue_cache.get(F)
    if R is None:
        R = _residue_cache.setdefault(F, PolyAlgebra(F, ()))
    return R


def _candidates(F: Field, box: int) -> list:
    if F.is_finite():
        return list(F.elements())
    vals = {Fraction(0)}
    for n in range(1, box + 1):
        vals.add(Fraction(n))
        vals.add(Fraction(-n))
    return sorted(vals, key=lambda q: (abs(q), q < 0))


def enumerate_points(A: PolyAlgebra, box: int = 2, limit: int | None = None) -> Iterator[PointSpec]:
    """Points of ``A`` over its base field.

    Over ``F_p`` this is the full list of ``F_p``-points.  Over ``Q`` only the
    integer box ``[-box, box]^n`` is searched.
    """
    if A.is_zero_ring:
        return
    F = A.field
    cands = _candidates(F, box)
    free = A.free_cover()
    rels = [Element(free, dict(r)) for r in A.relations]
    count = 0
    for vals in iproduct(cands, repeat=A.nvars):
        if all(not r.evaluate(vals) for r in rels):
            yield PointSpec(A, vals)
            count += 1
            if limit is not None and count >= limit:
                return


def point_count_is_exhaustive(A: PolyAlgebra) -> bool:
    return A.field.is_finite()


def evaluate_matrix(M: Matrix, pt: PointSpec) -> Matrix:
    if M.ring is not pt.alg:
        raise PointMismatch("matrix and point live over different algebras")
    F = pt.target_field
    vals = pt.values
    return Matrix(F, [[a.evaluate(vals) for a in r] for r in M.rows()], M.ncols, check=False)


def evaluate_at_point(obj, pt: PointSpec):
    """Entrywise evaluation of a matrix, complex or dg-algebra at a point."""
    if isinstance(obj, Matrix):
        return evaluate_matrix(obj, pt)
    if hasattr(obj, "base_change"):
        return obj.base_change(point_map(pt))
    raise TypeError(f"cannot evaluate {type(obj).__name__} at a point")


def point_map(pt: PointSpec) -> RingMap:
    """The ring map ``A -> k`` of a point, with ``k`` as a zero-variable algebra."""
    R = residue_algebra(pt.target_field)
    return RingMap(pt.alg, R, [R.const(v) for v in pt.values])
