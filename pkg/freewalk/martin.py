"""
Martin - Martin kernels of the uniform walk and the boundary hitting measure

For a boundary ray w the Martin kernel is

    f_w(g) = (2d-1)^(|g^-1| - 2 D(g^-1, w)) = (2d-1)^(2 lcp(g^-1, w) - |g|)

It is positive, left mu-harmonic and equal to 1 at e. Square roots of
kernel values live in Q(sqrt(2d-1)) and are kept exact as SqrtPowerSum.
The hitting measure zeta gives the cylinder of a reduced prefix of length
n the mass 1/(2d (2d-1)^(n-1)).
"""

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Dict, Iterable, List, Optional, Sequence, Union

import numpy as np

from .data_types import (
    DEFAULT_ENUMERATION_BUDGET,
    SPHERE_AVERAGE_CONSTANT,
    TREND_FLOOR,
    TREND_SHRINK_FACTOR,
    TREND_WINDOW,
    BudgetExceededError,
    InvalidWordError,
    TrendLabel,
    fraction_to_str,
)
from .measures import FunctionProvider, harmonicity_defect, uniform_generator_measure
from .words import (
    RaySpec,
    ReducedWord,
    ball,
    ball_size,
    inv,
    lcp_with_ray,
    sphere,
    sphere_size,
)

logger = logging.getLogger(__name__)

Scalar = Union[int, Fraction]

# ============================================================================
# EXACT ARITHMETIC IN Q(sqrt(2d-1))
# ============================================================================

class SqrtPowerSum:
    """
    Exact element sum_j c_j (2d-1)^(j/2) of Q(sqrt(2d-1))

    Stored normalized as a + b*sqrt(2d-1), i.e. exponents {0, 1}; when
    2d-1 is a perfect square everything folds into the rational part.

    Example:
        half = SqrtPowerSum.half_power(2, 1)       # sqrt(3)
        (half * half).rational                     # Fraction(3, 1)
        SqrtPowerSum.from_half_powers(2, {1: 1, -1: 3}).coeffs   # {1: 2}
    """

    __slots__ = ('d', 'rational', 'irrational')

    def __init__(self, d: int, rational: Scalar = 0, irrational: Scalar = 0):
        self.d = d
        rational, irrational = Fraction(rational), Fraction(irrational)
        root = self.perfect_root(d)
        if root is not None:
            rational, irrational = rational + irrational * root, Fraction(0)
        self.rational = rational
        self.irrational = irrational

    @staticmethod
    def perfect_root(d: int) -> Optional[int]:
        base = 2 * d - 1
        root = math.isqrt(base)
        return root if root * root == base else None

    @property
    def base(self) -> int:
        return 2 * self.d - 1

    @classmethod
    def zero(cls, d: int) -> 'SqrtPowerSum':
        return cls(d)

    @classmethod
    def half_power(cls, d: int, exponent: int, coefficient: Scalar = 1) -> 'SqrtPowerSum':
        """coefficient * (2d-1)^(exponent/2)"""
        base = Fraction(2 * d - 1)
        whole, odd = divmod(exponent, 2)
        scale = Fraction(coefficient) * base ** whole
        return cls(d, 0, scale) if odd else cls(d, scale, 0)

    @classmethod
    def from_half_powers(cls, d: int, coefficients: Dict[int, Scalar]) -> 'SqrtPowerSum':
        total = cls.zero(d)
        for exponent, coefficient in coefficients.items():
            total = total + cls.half_power(d, exponent, coefficient)
        return total

    @property
    def coeffs(self) -> Dict[int, Fraction]:
        """Nonzero coefficients by exponent of sqrt(2d-1)"""
        return {j: c for j, c in ((0, self.rational), (1, self.irrational)) if c != 0}

    def _coerce(self, other) -> 'SqrtPowerSum':
        if isinstance(other, SqrtPowerSum):
            if other.d != self.d:
                raise InvalidWordError(f"Cannot combine Q(sqrt({self.base})) with Q(sqrt({other.base}))")
            return other
        if isinstance(other, Rational):
            return SqrtPowerSum(self.d, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return SqrtPowerSum(self.d, self.rational + other.rational, self.irrational + other.irrational)

    __radd__ = __add__

    def __neg__(self) -> 'SqrtPowerSum':
        return SqrtPowerSum(self.d, -self.rational, -self.irrational)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b, c, e = self.rational, self.irrational, other.rational, other.irrational
        return SqrtPowerSum(self.d, a * c + b * e * self.base, a * e + b * c)

    __rmul__ = __mul__

    def sign(self) -> int:
        """Exact sign of a + b*sqrt(q)"""
        a, b = self.rational, self.irrational
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return (b > 0) - (b < 0)
        if (a > 0) == (b > 0):
            return 1 if a > 0 else -1
        # Opposite signs: the larger magnitude wins
        if a * a > b * b * self.base:
            return 1 if a > 0 else -1
        return 1 if b > 0 else -1

    def _compare(self, other) -> Optional[int]:
        other = self._coerce(other)
        if other is NotImplemented:
            return None
        return (self - other).sign()

    def __eq__(self, other) -> bool:
        if isinstance(other, SqrtPowerSum) and other.d != self.d:
            return self.irrational == other.irrational == 0 and self.rational == other.rational
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return self.rational == other.rational and self.irrational == other.irrational

    def __hash__(self) -> int:
        # rational elements compare equal to Fractions, so they must hash alike
        if self.irrational == 0:
            return hash(self.rational)
        return hash((self.d, self.rational, self.irrational))

    def __lt__(self, other) -> bool:
        result = self._compare(other)
        return NotImplemented if result is None else result < 0

    def __le__(self, other) -> bool:
        result = self._compare(other)
        return NotImplemented if result is None else result <= 0

    def __gt__(self, other) -> bool:
        result = self._compare(other)
        return NotImplemented if result is None else result > 0

    def __ge__(self, other) -> bool:
        result = self._compare(other)
        return NotImplemented if result is None else result >= 0

    def numeric(self) -> float:
        return float(self.rational) + float(self.irrational) * math.sqrt(self.base)

    def to_dict(self) -> Dict[str, str]:
        return {str(j): fraction_to_str(c) for j, c in sorted(self.coeffs.items())}

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        if self.rational != 0:
            parts.append(fraction_to_str(self.rational))
        if self.irrational != 0:
            parts.append(f"{fraction_to_str(self.irrational)}*sqrt({self.base})")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"SqrtPowerSum(d={self.d}, {self})"


ExactValue = Union[Fraction, SqrtPowerSum]

# ============================================================================
# KERNELS
# ============================================================================

@dataclass(frozen=True)
class KernelValue:
    """f_w(g) = (2d-1)^exponent"""
    d: int
    exponent: int

    @property
    def value(self) -> Fraction:
        return Fraction(2 * self.d - 1) ** self.exponent

    def sqrt(self) -> SqrtPowerSum:
        return SqrtPowerSum.half_power(self.d, self.exponent)


def kernel_exponent(w: RaySpec, g: ReducedWord) -> int:
    """2 lcp(g^-1, w) - |g|"""
    return 2 * lcp_with_ray(inv(g), w) - len(g)


def kernel_value(w: RaySpec, g: ReducedWord) -> KernelValue:
    return KernelValue(w.d, kernel_exponent(w, g))


def martin_kernel(w: RaySpec, g: ReducedWord) -> Fraction:
    return kernel_value(w, g).value


def kernel_provider(w: RaySpec) -> FunctionProvider:
    return lambda g: martin_kernel(w, g)


def harmonic_check_kernel(w: RaySpec, window: Iterable[ReducedWord]) -> Fraction:
    """Uniform-walk harmonicity defect of f_w on the window (exactly 0)"""
    return harmonicity_defect(uniform_generator_measure(w.d), kernel_provider(w), window)

# ============================================================================
# HITTING MEASURE
# ============================================================================

def hitting_cylinder(d: int, prefix: ReducedWord) -> Fraction:
    """zeta-mass of the rays extending prefix; the empty prefix is the whole boundary"""
    if prefix.d != d:
        raise InvalidWordError(f"Prefix {prefix} has rank {prefix.d}, expected {d}")
    n = len(prefix)
    if n == 0:
        return Fraction(1)
    return Fraction(1, 2 * d * (2 * d - 1) ** (n - 1))


def sample_ray(d: int, length: int, seed: int) -> ReducedWord:
    """
    A zeta-distributed prefix of the given length

    The first letter is uniform over all 2d letters, each later one uniform
    over the 2d-1 letters that do not cancel.
    """
    if length < 1:
        raise ValueError(f"Sample length must be at least 1, got {length}")
    rng = np.random.default_rng(seed)
    return _draw_prefix(rng, d, length)


def sample_rays(d: int, length: int, count: int, seed: int) -> List[ReducedWord]:
    """count independent prefixes from one seeded stream"""
    if length < 1:
        raise ValueError(f"Sample length must be at least 1, got {length}")
    rng = np.random.default_rng(seed)
    return [_draw_prefix(rng, d, length) for _ in range(count)]


def _draw_prefix(rng: np.random.Generator, d: int, length: int) -> ReducedWord:
    codes = [int(rng.integers(2 * d))]
    for _ in range(length - 1):
        # Skip the cancelling letter by drawing from 2d-1 slots
        draw = int(rng.integers(2 * d - 1))
        forbidden = codes[-1] ^ 1
        codes.append(draw if draw < forbidden else draw + 1)
    return ReducedWord(d, tuple(codes))

# ============================================================================
# EXPECTED SQUARE-ROOT KERNELS
# ============================================================================

def _lcp_distribution(d: int, n: int) -> Dict[int, Fraction]:
    """zeta-law of lcp(x, w) for a fixed reduced x of length n"""
    if n == 0:
        return {0: Fraction(1)}
    q = 2 * d - 1
    law = {0: Fraction(q, 2 * d)}
    for k in range(1, n):
        law[k] = Fraction(1, 2 * d * q ** (k - 1)) * Fraction(q - 1, q)
    law[n] = Fraction(1, 2 * d * q ** (n - 1))
    return law


def expected_sqrt_kernel(d: int, g: ReducedWord) -> SqrtPowerSum:
    """
    E_zeta[sqrt f_w(g)], exact

    sqrt f_w(g) = (2d-1)^((2k - |g|)/2) with k = lcp(g^-1, w), so the
    depth-|g| cylinders are grouped by k.
    """
    n = len(g)
    total = SqrtPowerSum.zero(d)
    for k, probability in _lcp_distribution(d, n).items():
        total = total + SqrtPowerSum.half_power(d, 2 * k - n, probability)
    return total


def expected_sqrt_kernel_by_cylinders(d: int, g: ReducedWord) -> SqrtPowerSum:
    """Same value by summing over every cylinder of depth |g|"""
    n = len(g)
    x = inv(g)
    total = SqrtPowerSum.zero(d)
    for prefix in sphere(d, n):
        common = 0
        for a, b in zip(x.codes, prefix.codes):
            if a != b:
                break
            common += 1
        total = total + SqrtPowerSum.half_power(d, 2 * common - n, hitting_cylinder(d, prefix))
    return total


def sphere_sqrt_sum(d: int, r: int, w: RaySpec, budget: int = DEFAULT_ENUMERATION_BUDGET) -> SqrtPowerSum:
    """sum over S_r of sqrt f_w, by full enumeration"""
    size = sphere_size(d, r)
    if size > budget:
        raise BudgetExceededError(size, budget, f"words of S_{r}")
    exponents = Counter(kernel_exponent(w, h) for h in sphere(d, r))
    return SqrtPowerSum.from_half_powers(d, dict(exponents))


def sphere_average_bound(d: int, r: int, w: RaySpec, constant: Fraction = SPHERE_AVERAGE_CONSTANT,
                         budget: int = DEFAULT_ENUMERATION_BUDGET) -> bool:
    """(1/|S_r|) sum_{S_r} sqrt f_w <= C r (2d-1)^(-r/2), decided exactly"""
    if r < 1:
        raise ValueError(f"Sphere average bound needs r >= 1, got {r}")
    average = sphere_sqrt_sum(d, r, w, budget) * Fraction(1, sphere_size(d, r))
    return average <= SqrtPowerSum.half_power(d, -r, Fraction(constant) * r)

# ============================================================================
# LIGHTNESS
# ============================================================================

@dataclass(frozen=True)
class LightnessRow:
    radius: int
    value: ExactValue
    increment: ExactValue


@dataclass
class LightnessTable:
    """Exact partial sums by radius with a heuristic trend label"""
    rows: List[LightnessRow] = field(default_factory=list)
    stride: int = 1
    trend: TrendLabel = TrendLabel.UNDETERMINED

    def values(self) -> List[ExactValue]:
        return [row.value for row in self.rows]

    def to_rows(self) -> List[Dict[str, object]]:
        return [
            {
                'R': row.radius,
                'value': exact_to_json(row.value),
                'value_float': exact_to_float(row.value),
                'increment': exact_to_json(row.increment),
            }
            for row in self.rows
        ]


def exact_to_json(value: ExactValue):
    if isinstance(value, SqrtPowerSum):
        return value.to_dict()
    return fraction_to_str(value)


def exact_to_float(value: ExactValue) -> float:
    if isinstance(value, SqrtPowerSum):
        return value.numeric()
    return float(value)


def exact_to_str(value: ExactValue) -> str:
    if isinstance(value, SqrtPowerSum):
        return str(value)
    return fraction_to_str(value)


def increments(values: Sequence[ExactValue], stride: int = 1) -> List[ExactValue]:
    """values[i] - values[i - stride] for every i >= stride"""
    return [values[i] - values[i - stride] for i in range(stride, len(values))]


def classify_trend(values: Sequence[ExactValue], stride: int = 1) -> TrendLabel:
    """
    Heuristic label for a nondecreasing sequence of partial sums

    "bounded-looking" when each of the last three increments is at most 4/5
    of the one before, "diverging" when each of them is at least 1/2. Exact
    sums are always emitted next to the label.
    """
    steps = increments(values, stride)
    if len(steps) < TREND_WINDOW + 1:
        return TrendLabel.UNDETERMINED
    tail = steps[-(TREND_WINDOW + 1):]
    if all(later <= TREND_SHRINK_FACTOR * earlier and earlier > 0 for earlier, later in zip(tail, tail[1:])):
        return TrendLabel.BOUNDED_LOOKING
    if all(step >= TREND_FLOOR for step in tail[1:]):
        return TrendLabel.DIVERGING
    return TrendLabel.UNDETERMINED


def _build_table(values: List[ExactValue], stride: int) -> LightnessTable:
    rows = []
    for radius, value in enumerate(values):
        increment = value - values[radius - 1] if radius > 0 else value
        rows.append(LightnessRow(radius, value, increment))
    table = LightnessTable(rows, stride, classify_trend(values, stride))
    if table.trend is TrendLabel.UNDETERMINED:
        logger.warning(f"Lightness trend undetermined over R <= {len(values) - 1}")
    return table


def _partial_sums_by_length(per_length: Dict[int, ExactValue], radius_max: int, zero: ExactValue) -> List[ExactValue]:
    values, running = [], zero
    for radius in range(radius_max + 1):
        running = running + per_length.get(radius, zero)
        values.append(running)
    return values


def lightness_partial_sums(w: RaySpec, subset, radius_max: int,
                           budget: int = DEFAULT_ENUMERATION_BUDGET) -> LightnessTable:
    """sum of f_w over A cap B_R for R = 0..radius_max"""
    per_length: Dict[int, Fraction] = {}
    for g in subset.materialize(radius_max, budget):
        per_length[len(g)] = per_length.get(len(g), Fraction(0)) + martin_kernel(w, g)
    values = _partial_sums_by_length(per_length, radius_max, Fraction(0))
    return _build_table(values, subset.length_stride)


def expected_lightness_sum(subset, radius_max: int, budget: int = DEFAULT_ENUMERATION_BUDGET) -> LightnessTable:
    """E_zeta of the sum of sqrt f_w over A cap B_R for R = 0..radius_max"""
    d = subset.d
    counts = Counter(len(g) for g in subset.materialize(radius_max, budget))
    per_length = {length: _expected_by_length(d, length) * count for length, count in counts.items()}
    values = _partial_sums_by_length(per_length, radius_max, SqrtPowerSum.zero(d))
    return _build_table(values, subset.length_stride)


def _expected_by_length(d: int, length: int) -> SqrtPowerSum:
    # The expectation depends on g only through |g|
    return expected_sqrt_kernel(d, ReducedWord(d, (0,) * length))


def ball_kernel_sum(w: RaySpec, radius: int, budget: int = DEFAULT_ENUMERATION_BUDGET) -> Fraction:
    """sum over B_R of f_w; exceeds R since every geodesic point contributes at least 1"""
    size = ball_size(w.d, radius)
    if size > budget:
        raise BudgetExceededError(size, budget, f"words of B_{radius}")
    return sum((martin_kernel(w, g) for g in ball(w.d, radius)), Fraction(0))
