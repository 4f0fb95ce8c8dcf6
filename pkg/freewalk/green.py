"""
Green - Green functions of random walks on F_d

G(g) = sum_n mu^(n)(g), evaluated either as a truncated series for any
finitely supported mu or in closed form for the uniform generator walk:

    G(g) = ((2d-1)/(2d-2)) * (2d-1)^(-|g|)

The closed form is standard theory and is checked against the truncated
series by the test suite before anything relies on it.

Also here: translated Green functions G^k(E) = G(E k), Harnack witnesses
epsilon_h, the translate search behind inf_k G^k(A) = 0 and the tail
decomposition identity used in its proof.
"""

import logging
import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Tuple

from .data_types import (
    DEFAULT_EPSILON_DEPTH,
    DEFAULT_TRUNCATION,
    DegenerateMeasureError,
    GreenVariant,
    InvalidWordError,
    fraction_to_str,
)
from .measures import (
    FinMeasure,
    is_uniform_generator,
    left_convolve_fn,
    power,
    power_at,
    radial_profile,
    right_translate,
    uniform_generator_measure,
)
from .words import ReducedWord, ball, inv, mul, sphere, sphere_size

logger = logging.getLogger(__name__)

# ============================================================================
# MODEL
# ============================================================================

@dataclass(frozen=True)
class GreenModel:
    """
    How G is evaluated

    Args:
        variant: truncated series or closed form (uniform walk only)
        d: rank of the free group
        measure: step distribution (truncated series only)
        truncation: N, the last power kept in the series
    """
    variant: GreenVariant
    d: int
    measure: Optional[FinMeasure] = None
    truncation: int = DEFAULT_TRUNCATION

    def __post_init__(self):
        if self.truncation < 0:
            raise ValueError(f"Truncation depth must be nonnegative, got {self.truncation}")
        if self.variant is GreenVariant.TRUNCATED_SERIES and self.measure is None:
            raise ValueError("Truncated series needs a step measure")
        if self.measure is not None and self.measure.d != self.d:
            raise InvalidWordError(f"Measure rank {self.measure.d} does not match model rank {self.d}")
        if (self.variant is GreenVariant.CLOSED_FORM_UNIFORM and self.measure is not None
                and not is_uniform_generator(self.measure)):
            raise ValueError("Closed form is valid only for the uniform generator measure")

    @classmethod
    def closed_form(cls, d: int) -> 'GreenModel':
        return cls(GreenVariant.CLOSED_FORM_UNIFORM, d)

    @classmethod
    def truncated(cls, mu: FinMeasure, truncation: int = DEFAULT_TRUNCATION) -> 'GreenModel':
        return cls(GreenVariant.TRUNCATED_SERIES, mu.d, mu, truncation)

    @property
    def step_measure(self) -> FinMeasure:
        if self.measure is not None:
            return self.measure
        return uniform_generator_measure(self.d)

    @property
    def is_exact(self) -> bool:
        return self.variant is GreenVariant.CLOSED_FORM_UNIFORM

    @property
    def is_radial(self) -> bool:
        """G depends only on |g|"""
        return self.is_exact or is_uniform_generator(self.measure)

    def describe(self) -> str:
        if self.is_exact:
            return f"closed:d={self.d}"
        return f"truncated:d={self.d}:N={self.truncation}"

    def to_dict(self) -> Dict[str, object]:
        data: Dict[str, object] = {'variant': self.variant.value, 'd': self.d}
        if not self.is_exact:
            data['truncation'] = self.truncation
            data['measure'] = self.measure.to_dict()
        return data


@dataclass(frozen=True)
class EpsilonWitness:
    """A valid epsilon_h with the search depth that produced it"""
    h: ReducedWord
    value: Fraction
    depth: int

    def __post_init__(self):
        if not 0 < self.value <= 1:
            raise ValueError(f"Witness value must lie in (0, 1], got {self.value}")


@dataclass
class GammaBoundReport:
    h: ReducedWord
    k: ReducedWord
    epsilon: Fraction
    checked: int = 0
    violations: List[Tuple[ReducedWord, str, Fraction, Fraction]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.passed


@dataclass(frozen=True)
class TranslateStep:
    r: int
    k: ReducedWord
    value: Fraction

# ============================================================================
# EVALUATION
# ============================================================================

class _TruncatedTables:
    """Cumulative tables of truncated Green series, shared per session"""

    def __init__(self):
        self._lock = threading.Lock()
        self._radial: Dict[Tuple[int, int], List[Fraction]] = {}
        self._general: Dict[Tuple[FinMeasure, int], FinMeasure] = {}

    def radial(self, d: int, truncation: int, length: int) -> Fraction:
        if length > truncation:
            return Fraction(0)
        key = (d, truncation)
        with self._lock:
            table = self._radial.get(key)
        if table is None:
            profile = radial_profile(d)
            totals = [Fraction(0)] * (truncation + 1)
            for n in range(truncation + 1):
                for r, p in enumerate(profile.row(n)):
                    totals[r] += p
            table = [totals[r] / sphere_size(d, r) for r in range(truncation + 1)]
            with self._lock:
                self._radial[key] = table
            logger.debug(f"Built radial Green table d={d} N={truncation}")
        return table[length]

    def general(self, mu: FinMeasure, truncation: int) -> FinMeasure:
        key = (mu, truncation)
        with self._lock:
            cached = self._general.get(key)
        if cached is not None:
            return cached
        totals: Dict[ReducedWord, Fraction] = {}
        for n in range(truncation + 1):
            for g, p in power(mu, n).entries.items():
                totals[g] = totals.get(g, Fraction(0)) + p
        series = FinMeasure(mu.d, totals)
        with self._lock:
            self._general[key] = series
        return series


_TABLES = _TruncatedTables()


def closed_form_constant(d: int) -> Fraction:
    """G(e) = (2d-1)/(2d-2) for the uniform walk"""
    return Fraction(2 * d - 1, 2 * d - 2)


@lru_cache(maxsize=None)
def _closed_form_value(d: int, length: int) -> Fraction:
    return closed_form_constant(d) / Fraction(2 * d - 1) ** length


def green_at(model: GreenModel, g: ReducedWord) -> Fraction:
    if g.d != model.d:
        raise InvalidWordError(f"Word {g} has rank {g.d}, model has rank {model.d}")
    if model.is_exact:
        return _closed_form_value(model.d, len(g))
    if is_uniform_generator(model.measure):
        return _TABLES.radial(model.d, model.truncation, len(g))
    return _TABLES.general(model.measure, model.truncation).get(g)


def green_set(model: GreenModel, words: Iterable[ReducedWord]) -> Fraction:
    """G(E) = sum over E (E is taken as a set)"""
    return sum((green_at(model, g) for g in set(words)), Fraction(0))


def green_translated(model: GreenModel, k: ReducedWord, words: Iterable[ReducedWord]) -> Fraction:
    """G^k(E) = G(E k)"""
    return green_set(model, right_translate(set(words), k))


def green_table(model: GreenModel, words: Iterable[ReducedWord]) -> List[Tuple[ReducedWord, Fraction]]:
    return [(g, green_at(model, g)) for g in sorted(set(words))]


def spectral_radius(d: int) -> float:
    """Spectral radius sqrt(2d-1)/d of the uniform walk"""
    return math.sqrt(2 * d - 1) / d


def truncation_tail_bound(d: int, truncation: int) -> float:
    """
    Upper bound on G(g) - G_N(g) for the uniform walk

    Uses mu^(n)(g) <= rho^n, so the tail is at most rho^(N+1) / (1 - rho).
    """
    rho = spectral_radius(d)
    return rho ** (truncation + 1) / (1 - rho)


def renewal_identity_check(model: GreenModel, window: Iterable[ReducedWord]) -> bool:
    """
    G_N - mu * G_N = delta_e - mu^(N+1) exactly on the window

    For the closed form the right-hand side is delta_e.
    """
    mu = model.step_measure

    def evaluate(x: ReducedWord) -> Fraction:
        return green_at(model, x)

    for g in window:
        lhs = green_at(model, g) - left_convolve_fn(mu, evaluate, g)
        rhs = Fraction(1 if g.is_identity() else 0)
        if not model.is_exact:
            rhs -= power_at(mu, model.truncation + 1, g)
        if lhs != rhs:
            logger.error(f"Renewal identity fails at {g}: {fraction_to_str(lhs)} != {fraction_to_str(rhs)}")
            return False
    return True

# ============================================================================
# HARNACK WITNESSES
# ============================================================================

def epsilon_witness(mu: FinMeasure, h: ReducedWord, depth: int = DEFAULT_EPSILON_DEPTH) -> EpsilonWitness:
    """
    A valid epsilon_h from the masses mu^(n)(h) and mu^(n)(h^-1), n <= depth

    Path concatenation gives G(h^-1 x) >= mu^(n)(h^-1) G(x) and
    G(x) >= mu^(n)(h) G(h^-1 x); the smaller of the two best masses works
    for all four inequalities.
    """
    if h.is_identity():
        return EpsilonWitness(h, Fraction(1), 0)
    inverse = inv(h)
    best_inverse = max((power_at(mu, n, inverse) for n in range(depth + 1)), default=Fraction(0))
    best_forward = max((power_at(mu, n, h) for n in range(depth + 1)), default=Fraction(0))
    value = min(best_inverse, best_forward, Fraction(1))
    if value <= 0:
        raise DegenerateMeasureError(
            f"No positive mass at {h} and {inverse} within {depth} steps; increase depth"
        )
    return EpsilonWitness(h, value, depth)


def verify_gamma_bounds(model: GreenModel, h: ReducedWord, k: ReducedWord,
                        sample: Iterable[ReducedWord],
                        witness: Optional[EpsilonWitness] = None) -> GammaBoundReport:
    """
    Check eps G^k <= hG^k <= G^k / eps and eps kG <= kG^h <= kG / eps

    Left translation is [h f](x) = f(h^-1 x); right translation is
    f^h(x) = f(x h).
    """
    if witness is None:
        witness = epsilon_witness(model.step_measure, h, max(DEFAULT_EPSILON_DEPTH, len(h)))
    epsilon = witness.value
    report = GammaBoundReport(h, k, epsilon)
    h_inverse, k_inverse = inv(h), inv(k)
    for x in sample:
        base = green_at(model, mul(x, k))
        shifted = green_at(model, mul(mul(h_inverse, x), k))
        left_base = green_at(model, mul(k_inverse, x))
        left_shifted = green_at(model, mul(mul(k_inverse, x), h))
        checks = (
            ("eps*G^k <= hG^k", epsilon * base, shifted),
            ("hG^k <= G^k/eps", shifted, base / epsilon),
            ("eps*kG <= kG^h", epsilon * left_base, left_shifted),
            ("kG^h <= kG/eps", left_shifted, left_base / epsilon),
        )
        for name, smaller, larger in checks:
            if smaller > larger:
                report.violations.append((x, name, smaller, larger))
        report.checked += 1
    if report.violations:
        logger.warning(f"Gamma bounds violated at {len(report.violations)} points for h={h}, k={k}")
    return report

# ============================================================================
# TRANSLATE SEARCH
# ============================================================================

def find_small_translate(model: GreenModel, words: Iterable[ReducedWord], radius_max: int) -> List[TranslateStep]:
    """
    For each r <= radius_max, the k minimizing G^k(A)

    Candidates are S_r when G is radial and B_r otherwise; ties go to the
    first candidate in enumeration order.
    """
    target = sorted(set(words))
    steps: List[TranslateStep] = []
    for r in range(radius_max + 1):
        candidates = sphere(model.d, r) if model.is_radial else ball(model.d, r)
        best_k, best_value = None, None
        for k in candidates:
            value = green_translated(model, k, target)
            if best_value is None or value < best_value:
                best_k, best_value = k, value
        steps.append(TranslateStep(r, best_k, best_value))
        logger.info(f"Translate search r={r}: k={best_k} G^k(A)={float(best_value):.6g}")
    return steps


def tail_decomposition_sides(mu: FinMeasure, words: Iterable[ReducedWord], m: int,
                             truncation: int) -> Tuple[Fraction, Fraction]:
    """
    Both sides of the truncated tail decomposition

        sum_{n=m}^{m+N} mu^(n)(A) = sum_k mu^(m)(k^-1) sum_{n<=N} mu^(n)(A k)
    """
    target = set(words)
    lhs = sum((power(mu, n).mass(target) for n in range(m, m + truncation + 1)), Fraction(0))
    rhs = Fraction(0)
    for x, weight in power(mu, m).entries.items():
        k = inv(x)
        translated = right_translate(target, k)
        rhs += weight * sum((power(mu, n).mass(translated) for n in range(truncation + 1)), Fraction(0))
    return lhs, rhs


def tail_decomposition_check(mu: FinMeasure, words: Iterable[ReducedWord], m: int, truncation: int) -> bool:
    lhs, rhs = tail_decomposition_sides(mu, words, m, truncation)
    if lhs != rhs:
        logger.error(f"Tail decomposition fails (m={m}, N={truncation}): {lhs} != {rhs}")
    return lhs == rhs
