"""Finitely presented commutative algebras and their Groebner machinery."""
from .groebner import MonomialOrder
from .ideals import Ideal, Localization, ZeroLocalization, groebner_basis, is_nilpotent, localize, radical_membership
from .modules import (SubmoduleBasis, SubmodulePresentation, TooManyMinors, determinant, fitting0,
                      module_syzygies, prune_presentation)
from .points import PointMismatch, PointSpec, enumerate_points, evaluate_at_point, point_map, residue_algebra
from .poly import Element, NotInvertible, ParseError, PolyAlgebra, RingMap

__all__ = [
    "MonomialOrder", "Ideal", "Localization", "ZeroLocalization", "groebner_basis", "is_nilpotent",
    "localize", "radical_membership", "SubmoduleBasis", "SubmodulePresentation", "TooManyMinors",
    "determinant", "fitting0", "module_syzygies", "prune_presentation", "PointMismatch", "PointSpec",
    "enumerate_points", "evaluate_at_point", "point_map", "residue_algebra", "Element", "NotInvertible",
    "ParseError", "PolyAlgebra", "RingMap",
]
