"""Dimers on contracting square-hexagon lattices: exact formulas, sampling and limit shapes."""

from .errors import KasteleynSignError, NoPerfectMatchingError, NumericalError, SqhexError, ValidationError
from .lattice import Graph, LatticeSpec, PeriodicWeights, build_lattice
from .limitshape import BoundaryMeasureSpec

__version__ = "0.1.0"

__all__ = [
    "BoundaryMeasureSpec",
    "Graph",
    "KasteleynSignError",
    "LatticeSpec",
    "NoPerfectMatchingError",
    "NumericalError",
    "PeriodicWeights",
    "SqhexError",
    "ValidationError",
    "build_lattice",
]
