"""Trapped-electron spin-echo mm-wave sensing simulator."""

from .constants import DEFAULT_CONSTANTS, PhysicalConstants
from .params import DerivedParameters, ParameterSet, derive_parameters

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_CONSTANTS",
    "PhysicalConstants",
    "ParameterSet",
    "DerivedParameters",
    "derive_parameters",
    "__version__",
]
