"""Exact graded commutative algebra over prime fields, aimed at Ext over complete intersections."""
from .field_poly import FieldElement, FreeModule, PolyRing, Polynomial, Vector, parse_polynomial
from .graded_ring import IdealPowerCache, ModulePresentation, RingPresentation
from .groebner import GroebnerBasis, ModuleMap, buchberger, kernel_of_map, normal_form
from .resolution import Resolution, resolve, verify_complex

__version__ = "0.1.0"
