"""
FreeWalk - exact random walks on free groups

Green functions, stationary-measure defect identities, Martin kernels and
subset experiments for the uniform walk (and any finitely supported walk)
on F_d, all in exact rational arithmetic.
"""

from .data_types import (
    BudgetExceededError,
    DegenerateMeasureError,
    EvaluationError,
    FreeWalkError,
    IdentityCheckError,
    InvalidWordError,
    RayError,
    SpecParseError,
)
from .green import GreenModel, green_at, green_set, green_translated
from .martin import SqrtPowerSum, martin_kernel
from .measures import FinMeasure, convolve, power, uniform_generator_measure
from .sets import SubsetSpec
from .stationary import GreenTranslateMeasure, MKAverage
from .words import RaySpec, ReducedWord, ball, sphere

__version__ = "1.0.0"
__author__ = "FreeWalk Team"

__all__ = [
    "BudgetExceededError",
    "DegenerateMeasureError",
    "EvaluationError",
    "FreeWalkError",
    "IdentityCheckError",
    "InvalidWordError",
    "RayError",
    "SpecParseError",
    "GreenModel",
    "green_at",
    "green_set",
    "green_translated",
    "SqrtPowerSum",
    "martin_kernel",
    "FinMeasure",
    "convolve",
    "power",
    "uniform_generator_measure",
    "SubsetSpec",
    "GreenTranslateMeasure",
    "MKAverage",
    "RaySpec",
    "ReducedWord",
    "ball",
    "sphere",
]
