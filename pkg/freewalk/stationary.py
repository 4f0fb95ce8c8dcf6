"""
Stationary - candidate stationary measures and their defect identities

Two families of finitely additive candidates:

    M_n(E) = sum_{m<=n} mu^(m)(E) / D_n,   D_n = sum_{m<=n} mu^(m)(A)
    M_k(E) = G^k(E) / G^k(A)

Their stationarity defects are computed as signed quantities by direct
convolution [mu * M](E) = sum_h mu(h) M(h^-1 E) and compared with the
closed expressions

    [mu * M_n](E) - M_n(E) = (mu^(n+1)(E) - delta_e(E)) / D_n
    M_k(E) - [mu * M_k](E) = delta_{k^-1}(E) / G^k(A)

The limit measures themselves (ultrafilter limits) are not constructed;
only the finite identities that make those limits stationary are checked.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple

from .data_types import (
    DEFAULT_EPSILON_DEPTH,
    DefectKind,
    DegenerateMeasureError,
    InvalidWordError,
    fraction_to_str,
)
from .green import (
    GreenModel,
    epsilon_witness,
    find_small_translate,
    green_translated,
)
from .measures import FinMeasure, left_translate, power_mass
from .words import ReducedWord, inv

logger = logging.getLogger(__name__)

# Steps searched past n when D_n vanishes
REACHABILITY_SEARCH = 64

# ============================================================================
# MEASURE FAMILIES
# ============================================================================

@dataclass(frozen=True)
class MKAverage:
    """
    Markov-Kakutani average M_n of the walk's visits to A

    Args:
        measure: step distribution mu
        target: the normalizing set A
        n: number of steps averaged
    """
    measure: FinMeasure
    target: frozenset
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"Average length must be nonnegative, got {self.n}")
        object.__setattr__(self, 'target', frozenset(self.target))
        _check_rank(self.measure.d, self.target)


@dataclass(frozen=True)
class GreenTranslateMeasure:
    """M_k(E) = G^k(E) / G^k(A)"""
    model: GreenModel
    k: ReducedWord
    target: frozenset

    def __post_init__(self):
        object.__setattr__(self, 'target', frozenset(self.target))
        _check_rank(self.model.d, self.target | {self.k})


def _check_rank(d: int, words: Iterable[ReducedWord]):
    for g in words:
        if g.d != d:
            raise InvalidWordError(f"Word {g} has rank {g.d}, expected {d}")


@dataclass
class DefectReport:
    """
    Signed stationarity defect on one finite set E

    `holds` is the pass criterion: exact equality (and the 1/D_n bound for
    Markov-Kakutani averages), or residual == truncation_term for truncated
    Green models.
    """
    kind: DefectKind
    window: Tuple[ReducedWord, ...]
    lhs: Fraction
    rhs: Fraction
    bound: Optional[Fraction] = None
    residual: Optional[Fraction] = None
    truncation_term: Optional[Fraction] = None

    @property
    def exact_match(self) -> bool:
        return self.lhs == self.rhs

    @property
    def within_bound(self) -> Optional[bool]:
        if self.bound is None:
            return None
        return abs(self.lhs) <= self.bound

    @property
    def holds(self) -> bool:
        if self.residual is not None:
            return self.residual == self.truncation_term
        return self.exact_match and self.within_bound is not False

    def to_dict(self) -> Dict[str, object]:
        data: Dict[str, object] = {
            'kind': self.kind.value,
            'E': [str(g) for g in self.window],
            'lhs': fraction_to_str(self.lhs),
            'rhs': fraction_to_str(self.rhs),
            'exact_match': self.exact_match,
            'holds': self.holds,
        }
        if self.bound is not None:
            data['bound'] = fraction_to_str(self.bound)
            data['within_bound'] = self.within_bound
        if self.residual is not None:
            data['residual'] = fraction_to_str(self.residual)
            data['truncation_term'] = fraction_to_str(self.truncation_term)
        return data


@dataclass(frozen=True)
class ScheduleRow:
    r: int
    k: ReducedWord
    value: Fraction
    defect: Fraction
    k_inverse_in_window: bool


@dataclass(frozen=True)
class LowerBoundReport:
    convolved: Fraction
    factor: Fraction
    mass: Fraction

    @property
    def holds(self) -> bool:
        return self.convolved >= self.factor * self.mass

# ============================================================================
# MARKOV-KAKUTANI AVERAGES
# ============================================================================

def mk_denominators(mu: FinMeasure, target: Iterable[ReducedWord], n_max: int) -> List[Fraction]:
    """D_0, ..., D_{n_max}; nondecreasing"""
    target = set(target)
    totals: List[Fraction] = []
    running = Fraction(0)
    for m in range(n_max + 1):
        running += power_mass(mu, m, target)
        totals.append(running)
    return totals


def _mk_denominator(average: MKAverage) -> Fraction:
    denominator = mk_denominators(average.measure, average.target, average.n)[-1]
    if denominator == 0:
        first = _first_reachable_step(average)
        if first is None:
            raise DegenerateMeasureError(
                f"A is not reached within {average.n + REACHABILITY_SEARCH} steps; D_{average.n} = 0"
            )
        raise DegenerateMeasureError(f"D_{average.n} = 0: A is first reached at step {first}, use n >= {first}")
    return denominator


def _first_reachable_step(average: MKAverage) -> Optional[int]:
    for m in range(average.n + 1, average.n + REACHABILITY_SEARCH + 1):
        if power_mass(average.measure, m, average.target) > 0:
            return m
    return None


def mk_measure(average: MKAverage, words: Iterable[ReducedWord]) -> Fraction:
    """M_n(E), exact"""
    window = set(words)
    denominator = _mk_denominator(average)
    numerator = sum((power_mass(average.measure, m, window) for m in range(average.n + 1)), Fraction(0))
    return numerator / denominator


def mk_defect_identity(average: MKAverage, words: Iterable[ReducedWord]) -> DefectReport:
    """
    [mu * M_n](E) - M_n(E) against (mu^(n+1)(E) - delta_e(E)) / D_n

    The left side is evaluated by direct convolution; |lhs| <= 1/D_n is
    reported as the bound.
    """
    window = sorted(set(words))
    mu = average.measure
    denominator = _mk_denominator(average)
    convolved = sum(
        (p * mk_measure(average, left_translate(inv(h), window)) for h, p in mu.entries.items()),
        Fraction(0),
    )
    lhs = convolved - mk_measure(average, window)
    identity = ReducedWord.identity(mu.d)
    rhs = (power_mass(mu, average.n + 1, window) - (1 if identity in window else 0)) / denominator
    report = DefectReport(DefectKind.MK, tuple(window), lhs, rhs, bound=1 / denominator)
    if not report.holds:
        logger.error(f"MK defect identity fails on E={_window_str(window)}: {lhs} != {rhs}")
    return report


def mk_limit_defect(d: int, target: Iterable[ReducedWord], words: Iterable[ReducedWord]) -> DefectReport:
    """
    Defect of lim M_n = G(.)/G(A) for the uniform walk

    When G(A) < infinity the averages converge to the Green-translate measure
    with k = e. Signs follow mk_defect_identity: lhs = [mu * M](E) - M(E) and
    rhs = -delta_e(E)/G(A), which does not vanish on E = {e}, so the limit is
    not stationary.
    """
    model = GreenModel.closed_form(d)
    report = gt_defect_identity(
        GreenTranslateMeasure(model, ReducedWord.identity(d), frozenset(target)), words
    )
    return DefectReport(DefectKind.MK, report.window, -report.lhs, -report.rhs)

# ============================================================================
# GREEN-TRANSLATE MEASURES
# ============================================================================

def _gt_denominator(measure: GreenTranslateMeasure) -> Fraction:
    denominator = green_translated(measure.model, measure.k, measure.target)
    if denominator == 0:
        raise DegenerateMeasureError(
            f"G^k(A) = 0 for k={measure.k} under {measure.model.describe()}; increase the truncation depth"
        )
    return denominator


def gt_measure(measure: GreenTranslateMeasure, words: Iterable[ReducedWord]) -> Fraction:
    """M_k(E), exact"""
    return green_translated(measure.model, measure.k, set(words)) / _gt_denominator(measure)


def gt_convolved(measure: GreenTranslateMeasure, words: Iterable[ReducedWord]) -> Fraction:
    """[mu * M_k](E) = sum_h mu(h) M_k(h^-1 E)"""
    window = set(words)
    denominator = _gt_denominator(measure)
    model = measure.model
    total = Fraction(0)
    for h, p in model.step_measure.entries.items():
        total += p * green_translated(model, measure.k, left_translate(inv(h), window))
    return total / denominator


def gt_defect_identity(measure: GreenTranslateMeasure, words: Iterable[ReducedWord]) -> DefectReport:
    """
    M_k(E) - [mu * M_k](E) against delta_{k^-1}(E) / G^k(A)

    Truncated models miss exactly one tail term; the residual lhs - rhs is
    reported next to -mu^(N+1)(E k) / G^k(A) instead of being hidden.
    """
    window = sorted(set(words))
    model = measure.model
    denominator = _gt_denominator(measure)
    lhs = gt_measure(measure, window) - gt_convolved(measure, window)
    rhs = Fraction(1 if inv(measure.k) in window else 0) / denominator
    if model.is_exact:
        report = DefectReport(DefectKind.GREEN, tuple(window), lhs, rhs)
    else:
        shifted = [g * measure.k for g in window]
        tail = power_mass(model.step_measure, model.truncation + 1, shifted)
        report = DefectReport(
            DefectKind.GREEN, tuple(window), lhs, rhs,
            residual=lhs - rhs, truncation_term=-tail / denominator,
        )
    if not report.holds:
        logger.error(f"Green defect identity fails on E={_window_str(window)} (k={measure.k})")
    return report


def vanishing_defect_schedule(model: GreenModel, target: Iterable[ReducedWord],
                              words: Iterable[ReducedWord], radius_max: int) -> List[ScheduleRow]:
    """Defect of M_k along the translate search; exactly 0 once k^-1 leaves E"""
    target = frozenset(target)
    window = sorted(set(words))
    rows = []
    for step in find_small_translate(model, target, radius_max):
        measure = GreenTranslateMeasure(model, step.k, target)
        report = gt_defect_identity(measure, window)
        rows.append(ScheduleRow(step.r, step.k, step.value, report.lhs, inv(step.k) in window))
    return rows


def infinite_mass_lower_bound(measure: GreenTranslateMeasure, words: Iterable[ReducedWord],
                              depth: int = DEFAULT_EPSILON_DEPTH) -> LowerBoundReport:
    """[mu * M_k](E) >= (sum_h mu(h) eps_h) M_k(E)"""
    window = set(words)
    mu = measure.model.step_measure
    factor = sum(
        (p * epsilon_witness(mu, h, max(depth, len(h))).value for h, p in mu.entries.items()),
        Fraction(0),
    )
    report = LowerBoundReport(gt_convolved(measure, window), factor, gt_measure(measure, window))
    if not report.holds:
        logger.error(f"Infinite-mass lower bound fails for k={measure.k}")
    return report


def _window_str(window: Iterable[ReducedWord]) -> str:
    return '{' + ','.join(str(g) for g in window) + '}'
