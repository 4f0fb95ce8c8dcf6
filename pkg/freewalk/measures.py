"""
Measures - finitely supported rational measures on F_d

FinMeasure holds exact Fraction masses. Convolution follows the left
convention (mu * nu)(g) = sum_h mu(h) nu(h^-1 g), and the same formula
defines [mu * f](g) for functions f. Convolution powers are memoized in a
lock-guarded table; for the uniform generator measure an exact radial fast
path avoids enumerating huge supports.
"""

import logging
import threading
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from types import MappingProxyType
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Tuple

from .data_types import (
    EvaluationError,
    FreeWalkError,
    InvalidWordError,
    WalkRational,
    fraction_to_str,
)
from .words import ReducedWord, inv, mul, sphere, sphere_size

logger = logging.getLogger(__name__)

FunctionProvider = Callable[[ReducedWord], WalkRational]

# ============================================================================
# MEASURES AND WINDOW FUNCTIONS
# ============================================================================

class FinMeasure:
    """
    Finitely supported map ReducedWord -> nonnegative Fraction

    Args:
        d: rank of the free group
        entries: masses; zero entries are dropped, negative ones rejected

    Example:
        mu = uniform_generator_measure(2)
        mu.get(ReducedWord.parse(2, "a"))   # Fraction(1, 4)
        mu.total_mass()                     # Fraction(1, 1)
    """

    __slots__ = ('d', '_entries', '_hash')

    def __init__(self, d: int, entries: Optional[Mapping[ReducedWord, WalkRational]] = None):
        self.d = d
        cleaned: Dict[ReducedWord, Fraction] = {}
        for word, mass in (entries or {}).items():
            if word.d != d:
                raise InvalidWordError(f"Word {word} has rank {word.d}, measure has rank {d}")
            mass = Fraction(mass)
            if mass < 0:
                raise ValueError(f"Negative mass {mass} at {word}")
            if mass != 0:
                cleaned[word] = mass
        self._entries = MappingProxyType(cleaned)
        self._hash = None

    @classmethod
    def delta(cls, d: int, g: Optional[ReducedWord] = None) -> 'FinMeasure':
        """Point mass at g (identity by default)"""
        point = g if g is not None else ReducedWord.identity(d)
        return cls(d, {point: Fraction(1)})

    @property
    def entries(self) -> Mapping[ReducedWord, Fraction]:
        return self._entries

    def get(self, g: ReducedWord) -> Fraction:
        return self._entries.get(g, Fraction(0))

    def mass(self, words: Iterable[ReducedWord]) -> Fraction:
        return sum((self.get(g) for g in set(words)), Fraction(0))

    def total_mass(self) -> Fraction:
        return sum(self._entries.values(), Fraction(0))

    def support(self) -> List[ReducedWord]:
        return sorted(self._entries)

    def support_radius(self) -> int:
        return max((len(g) for g in self._entries), default=0)

    def is_probability(self) -> bool:
        return self.total_mass() == 1

    def items(self) -> List[Tuple[ReducedWord, Fraction]]:
        return sorted(self._entries.items())

    def to_dict(self) -> Dict[str, str]:
        return {str(word): fraction_to_str(mass) for word, mass in self.items()}

    def __len__(self) -> int:
        return len(self._entries)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FinMeasure):
            return False
        return self.d == other.d and dict(self._entries) == dict(other._entries)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.d, frozenset(self._entries.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"FinMeasure(d={self.d}, support={len(self)}, mass={fraction_to_str(self.total_mass())})"


@dataclass(frozen=True)
class WindowFn:
    """A function known only on an explicit finite window"""
    values: Mapping[ReducedWord, WalkRational]
    window: frozenset = field(default=None)

    def __post_init__(self):
        window = frozenset(self.values) if self.window is None else frozenset(self.window)
        if window != frozenset(self.values):
            raise ValueError("WindowFn values must be defined exactly on the window")
        object.__setattr__(self, 'window', window)

    def __call__(self, g: ReducedWord) -> Fraction:
        try:
            return Fraction(self.values[g])
        except KeyError:
            raise EvaluationError(f"Function is not known at {g} (outside its window)") from None


@dataclass(frozen=True)
class WindowedPower:
    """Exact restriction of mu^(n) to a ball"""
    measure: FinMeasure
    radius: int
    steps: int
    discarded: bool

# ============================================================================
# CONSTRUCTORS AND CONVOLUTION
# ============================================================================

@lru_cache(maxsize=None)
def uniform_generator_measure(d: int) -> FinMeasure:
    """Mass 1/(2d) on each generator and each inverse"""
    if not isinstance(d, int) or d < 2:
        raise InvalidWordError(f"Uniform generator measure needs d >= 2, got {d!r}")
    mass = Fraction(1, 2 * d)
    return FinMeasure(d, {g: mass for g in sphere(d, 1)})


def is_uniform_generator(mu: FinMeasure) -> bool:
    return mu == uniform_generator_measure(mu.d)


def convolve(mu: FinMeasure, nu: FinMeasure) -> FinMeasure:
    if mu.d != nu.d:
        raise InvalidWordError(f"Cannot convolve measures of rank {mu.d} and {nu.d}")
    result: Dict[ReducedWord, Fraction] = {}
    for h, p in mu.entries.items():
        for x, q in nu.entries.items():
            g = mul(h, x)
            result[g] = result.get(g, Fraction(0)) + p * q
    return FinMeasure(mu.d, result)


class ConvolutionPowers:
    """
    Session memo of mu^(n), keyed by (mu, n)

    Lookups are guarded by a lock so concurrent callers always observe the
    same table.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self._tables: Dict[FinMeasure, List[FinMeasure]] = {}

    def power(self, mu: FinMeasure, n: int) -> FinMeasure:
        if n < 0:
            raise ValueError(f"Convolution power must be nonnegative, got {n}")
        with self._lock:
            table = self._tables.setdefault(mu, [FinMeasure.delta(mu.d)])
            while len(table) <= n:
                table.append(convolve(table[-1], mu))
                logger.debug(f"Computed convolution power {len(table) - 1} ({len(table[-1])} atoms)")
            return table[n]

    def clear(self):
        with self._lock:
            self._tables.clear()


_POWERS = ConvolutionPowers()


def power(mu: FinMeasure, n: int) -> FinMeasure:
    """mu^(n), with mu^(0) = delta_e"""
    return _POWERS.power(mu, n)


def windowed_power(mu: FinMeasure, n: int, radius: int) -> WindowedPower:
    """
    mu^(n) restricted to B_radius without materializing the full support

    At step j every atom farther than radius + (n - j) * L from e is pruned,
    L being the longest word in supp(mu); such atoms cannot come back into
    the ball, so the restriction stays exact.
    """
    if n < 0 or radius < 0:
        raise ValueError(f"Steps and radius must be nonnegative, got n={n}, radius={radius}")
    reach = mu.support_radius()
    current = FinMeasure.delta(mu.d)
    discarded = False
    for step in range(1, n + 1):
        current = convolve(current, mu)
        limit = radius + (n - step) * reach
        kept = {g: p for g, p in current.entries.items() if len(g) <= limit}
        if len(kept) < len(current):
            discarded = True
            current = FinMeasure(mu.d, kept)
    restricted = {g: p for g, p in current.entries.items() if len(g) <= radius}
    if len(restricted) < len(current):
        discarded = True
    if discarded:
        logger.info(f"Windowed power n={n} radius={radius}: mass outside the window was discarded")
    return WindowedPower(FinMeasure(mu.d, restricted), radius, n, discarded)

# ============================================================================
# RADIAL FAST PATH (uniform generator measure)
# ============================================================================

class RadialProfile:
    """
    Distribution of |X_n| for the uniform generator walk

    |X_n| is a birth-death chain: 0 -> 1 surely, r -> r+1 with probability
    (2d-1)/(2d) and r -> r-1 with probability 1/(2d). By symmetry
    mu^(n)(g) = P(|X_n| = |g|) / |S_|g||.
    """

    def __init__(self, d: int):
        self.d = d
        self._lock = threading.Lock()
        self._rows: List[List[Fraction]] = [[Fraction(1)]]
        self._up = Fraction(2 * d - 1, 2 * d)
        self._down = Fraction(1, 2 * d)

    def row(self, n: int) -> List[Fraction]:
        """P(|X_n| = r) for r = 0..n"""
        with self._lock:
            while len(self._rows) <= n:
                previous = self._rows[-1]
                row = [Fraction(0)] * (len(previous) + 1)
                for r, p in enumerate(previous):
                    if p == 0:
                        continue
                    if r == 0:
                        row[1] += p
                    else:
                        row[r + 1] += p * self._up
                        row[r - 1] += p * self._down
                self._rows.append(row)
            return self._rows[n]

    def point_mass(self, n: int, length: int) -> Fraction:
        row = self.row(n)
        if length >= len(row):
            return Fraction(0)
        return row[length] / sphere_size(self.d, length)


_PROFILES: Dict[int, RadialProfile] = {}
_PROFILES_LOCK = threading.Lock()


def radial_profile(d: int) -> RadialProfile:
    with _PROFILES_LOCK:
        if d not in _PROFILES:
            _PROFILES[d] = RadialProfile(d)
        return _PROFILES[d]


def power_at(mu: FinMeasure, n: int, g: ReducedWord) -> Fraction:
    """mu^(n)(g), exact"""
    if is_uniform_generator(mu):
        return radial_profile(mu.d).point_mass(n, len(g))
    return power(mu, n).get(g)


def power_mass(mu: FinMeasure, n: int, words: Iterable[ReducedWord]) -> Fraction:
    """mu^(n)(E), exact"""
    words = set(words)
    if is_uniform_generator(mu):
        profile = radial_profile(mu.d)
        return sum((profile.point_mass(n, len(g)) for g in words), Fraction(0))
    return power(mu, n).mass(words)

# ============================================================================
# FUNCTIONS ON THE GROUP
# ============================================================================

def left_convolve_fn(mu: FinMeasure, f: FunctionProvider, g: ReducedWord) -> Fraction:
    """[mu * f](g) = sum_h mu(h) f(h^-1 g)"""
    total = Fraction(0)
    for h, p in mu.entries.items():
        total += p * Fraction(f(mul(inv(h), g)))
    return total


def harmonicity_defect(mu: FinMeasure, f: FunctionProvider, window: Iterable[ReducedWord]) -> Fraction:
    """max over the window of |[mu * f](g) - f(g)|"""
    worst = Fraction(0)
    for g in window:
        try:
            gap = abs(left_convolve_fn(mu, f, g) - Fraction(f(g)))
        except EvaluationError:
            raise
        except FreeWalkError as e:
            raise EvaluationError(f"Cannot evaluate harmonicity at {g}: {e}") from e
        if gap > worst:
            worst = gap
    return worst


def left_translate(h: ReducedWord, words: Iterable[ReducedWord]) -> List[ReducedWord]:
    """h E = {h g}"""
    return [mul(h, g) for g in words]


def right_translate(words: Iterable[ReducedWord], k: ReducedWord) -> List[ReducedWord]:
    """E k = {g k}"""
    return [mul(g, k) for g in words]


def indicator(words: Iterable[ReducedWord]) -> FunctionProvider:
    members = frozenset(words)
    return lambda g: Fraction(1) if g in members else Fraction(0)
