"""Constructive quotients of semi-algebraic equivalence relations on R^n.

Exact polynomial and set machinery, complexity bounds, general-position
point sets, focal-point tests, perpendicular-foot slices and finite chart
atlases for the quotient.
"""

from .poly import Polynomial, parse_poly, serialize_poly
from .sets import SemialgSet, BasicSet, SignCondition, Rel, parse_set, serialize_set

__version__ = "0.1.0"

__all__ = [
    "Polynomial",
    "parse_poly",
    "serialize_poly",
    "SemialgSet",
    "BasicSet",
    "SignCondition",
    "Rel",
    "parse_set",
    "serialize_set",
]
