# FreeWalk Data Types System
# Shared aliases, enums, constants and errors for the FreeWalk library

from enum import Enum
from fractions import Fraction
from typing import Dict, List

# ============================================================================
# BASE TYPES
# ============================================================================

WalkBool = bool
WalkString = str
WalkStringArray = List[str]
WalkNatural = int  # Natural numbers (>= 0)
WalkInteger = int
WalkRational = Fraction  # Every mass, Green value and kernel value is exact
WalkReal = float  # Convenience columns and growth estimates only
LetterCode = int  # 2 * generator_index + (0 for a_i, 1 for a_i^-1)

# ============================================================================
# CONSTANTS
# ============================================================================

DEFAULT_TRUNCATION: WalkNatural = 200
DEFAULT_ENUMERATION_BUDGET: WalkNatural = 2_000_000
DEFAULT_EPSILON_DEPTH: WalkNatural = 6

SCHEMA_VERSION: WalkInteger = 1
FORMAT_NAME: WalkString = "FreeWalk_JSON"

# Lightness trend heuristic
TREND_WINDOW: WalkNatural = 3
TREND_SHRINK_FACTOR: WalkRational = Fraction(4, 5)
TREND_FLOOR: WalkRational = Fraction(1, 2)

# Empirical constant for the sphere average of sqrt kernels
SPHERE_AVERAGE_CONSTANT: WalkRational = Fraction(4)

IDENTITY_STRING: WalkString = "e"

# ============================================================================
# ENUMS
# ============================================================================

class GreenVariant(Enum):
    """Green function evaluation strategies"""
    TRUNCATED_SERIES = "truncated"
    CLOSED_FORM_UNIFORM = "closed"


class SubsetKind(Enum):
    """Subset generators understood by SubsetSpec"""
    EXPLICIT = "explicit"
    SIGMA = "sigma"
    PALINDROMES = "palindromes"
    RAY_PREFIXES = "rayprefix"
    AAA = "aaa"
    AN_LEMMA = "an"
    WHOLE = "all"


class DefectKind(Enum):
    """Stationarity defect families"""
    MK = "mk"
    GREEN = "green"


class TrendLabel(Enum):
    """Heuristic label for partial sums of a (possibly) divergent series"""
    BOUNDED_LOOKING = "bounded-looking"
    DIVERGING = "diverging"
    UNDETERMINED = "undetermined"


class OutputFormat(Enum):
    JSON = "json"
    CSV = "csv"
    BOTH = "both"

# ============================================================================
# ERRORS
# ============================================================================

class FreeWalkError(Exception):
    """Base class for every error raised by FreeWalk"""


class InvalidWordError(FreeWalkError, ValueError):
    """Bad letter, generator index out of range or mismatched rank"""


class RayError(InvalidWordError):
    """Boundary ray with an empty period or a cancelling junction"""


class SpecParseError(FreeWalkError, ValueError):
    """Unparsable word, ray, subset spec or configuration"""


class EvaluationError(FreeWalkError):
    """A window function was evaluated outside its window"""


class DegenerateMeasureError(FreeWalkError):
    """A normalizing mass vanished or a witness depth is too small"""


class IdentityCheckError(FreeWalkError):
    """An exact identity or an asserted bound does not hold"""


class BudgetExceededError(FreeWalkError):
    """An enumeration would exceed the configured word budget"""

    def __init__(self, requested: WalkNatural, budget: WalkNatural, what: WalkString = "words"):
        super().__init__(f"Enumeration of {requested} {what} exceeds budget {budget}")
        self.requested = requested
        self.budget = budget

# ============================================================================
# UTILITIES
# ============================================================================

def fraction_to_str(value: WalkRational) -> WalkString:
    """Exact "p/q" string (plain "p" for integers)"""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_fraction(text: WalkString) -> WalkRational:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as e:
        raise SpecParseError(f"Invalid rational: {text!r}") from e


def fraction_map_to_dict(values: Dict[int, WalkRational]) -> Dict[str, str]:
    return {str(key): fraction_to_str(value) for key, value in sorted(values.items())}
