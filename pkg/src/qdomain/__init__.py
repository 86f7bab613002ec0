"""Quantale-enriched order theory over the unit interval.

Continuous t-norms, finite and parametric [0,1]-ordered sets, the way-below
relation, [0,1]-approach spaces and Scott approach structures, with checkers
for their laws.
"""

from .kernels import BACKEND
from .order import FiniteQOrder, InputError, QMap, Weight
from .interval import INF, ParamStructure, Power
from .tnorm import EPS, TNorm

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "EPS",
    "FiniteQOrder",
    "INF",
    "InputError",
    "ParamStructure",
    "Power",
    "QMap",
    "TNorm",
    "Weight",
]
