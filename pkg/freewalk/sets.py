"""
Sets - lazily described subsets of F_d

A SubsetSpec names a subset of the group; materialize(R) returns exactly
its intersection with the ball B_R, sorted shortlex. Also here: the
sigma-suffix and palindrome maps, growth-rate estimates, the A_a^a words
and the A_n family with its product-injectivity test.

String grammar used by the command line:

    explicit:a,ab,ba   sigma   sigma-noe   palindromes   palindromes-noe
    aaa:a   an:2   an:2:b   an:2:a:50   rayprefix:a|ab   all

The A_n grammar is an:N[:LETTER[:CAP]]; the pairing is always the shifted
Cantor pairing there, other pairings are set through SubsetSpec.an_lemma.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Callable, Iterator, List, Optional, Tuple

import numpy as np

from .data_types import (
    DEFAULT_ENUMERATION_BUDGET,
    BudgetExceededError,
    IdentityCheckError,
    InvalidWordError,
    SpecParseError,
    SubsetKind,
    WalkReal,
)
from .words import (
    Letter,
    RaySpec,
    ReducedWord,
    ball,
    ball_size,
    iter_words_with_prefix,
    mul,
    parse_words,
    sphere_size,
)

logger = logging.getLogger(__name__)

NO_IDENTITY_SUFFIX = "-noe"

Pairing = Callable[[int, int], int]

# ============================================================================
# PAIRINGS
# ============================================================================

def cantor_pairing(n: int, m: int) -> int:
    """Shifted Cantor pairing N^2 -> N with r(1,1) = 1"""
    if n < 1 or m < 1:
        raise ValueError(f"Pairing arguments must be >= 1, got ({n}, {m})")
    a, b = n - 1, m - 1
    return (a + b) * (a + b + 1) // 2 + b + 1

# ============================================================================
# SUBSET SPECS
# ============================================================================

@dataclass(frozen=True)
class SubsetSpec:
    """
    A subset of F_d described by a generator

    Args:
        kind: which generator
        d: rank of the free group
        words: members of an explicit set
        ray: ray whose prefixes form the set
        letter: designated first/last letter of A_a^a and A_n
        n: index of the A_n family member
        include_identity: whether e belongs to sigma or palindrome images
        pairing: injection r(n, m) giving A_n the sphere lengths 2^r(n,m)
        sphere_cap: most words A_n keeps from each sphere (None keeps all)
    """
    kind: SubsetKind
    d: int
    words: Tuple[ReducedWord, ...] = ()
    ray: Optional[RaySpec] = None
    letter: Optional[Letter] = None
    n: int = 1
    include_identity: bool = True
    pairing: Pairing = cantor_pairing
    sphere_cap: Optional[int] = None

    @classmethod
    def explicit(cls, d: int, words) -> 'SubsetSpec':
        return cls(SubsetKind.EXPLICIT, d, words=tuple(sorted(set(words))))

    @classmethod
    def sigma(cls, d: int, include_identity: bool = True) -> 'SubsetSpec':
        return cls(SubsetKind.SIGMA, d, include_identity=include_identity)

    @classmethod
    def palindromes(cls, d: int, include_identity: bool = True) -> 'SubsetSpec':
        return cls(SubsetKind.PALINDROMES, d, include_identity=include_identity)

    @classmethod
    def ray_prefixes(cls, ray: RaySpec) -> 'SubsetSpec':
        return cls(SubsetKind.RAY_PREFIXES, ray.d, ray=ray)

    @classmethod
    def aaa(cls, d: int, letter: Letter) -> 'SubsetSpec':
        return cls(SubsetKind.AAA, d, letter=letter)

    @classmethod
    def an_lemma(cls, d: int, n: int, letter: Optional[Letter] = None,
                 pairing: Pairing = cantor_pairing, sphere_cap: Optional[int] = None) -> 'SubsetSpec':
        if sphere_cap is not None and sphere_cap < 1:
            raise ValueError(f"Sphere cap must be >= 1, got {sphere_cap}")
        return cls(SubsetKind.AN_LEMMA, d, letter=letter or Letter(0), n=n,
                   pairing=pairing, sphere_cap=sphere_cap)

    @classmethod
    def whole(cls, d: int) -> 'SubsetSpec':
        return cls(SubsetKind.WHOLE, d)

    @classmethod
    def parse(cls, d: int, text: str) -> 'SubsetSpec':
        """Parse the command-line grammar; SpecParseError on anything else"""
        text = text.strip()
        head, _, argument = text.partition(':')
        try:
            if head == SubsetKind.EXPLICIT.value:
                items = [item for item in argument.split(',') if item.strip()]
                return cls.explicit(d, parse_words(d, items))
            if head in (SubsetKind.SIGMA.value, SubsetKind.PALINDROMES.value) and not argument:
                return cls(SubsetKind(head), d)
            if head.endswith(NO_IDENTITY_SUFFIX) and not argument:
                kind = SubsetKind(head[:-len(NO_IDENTITY_SUFFIX)])
                if kind in (SubsetKind.SIGMA, SubsetKind.PALINDROMES):
                    return cls(kind, d, include_identity=False)
            if head == SubsetKind.RAY_PREFIXES.value:
                return cls.ray_prefixes(RaySpec.parse(d, argument))
            if head == SubsetKind.AAA.value:
                return cls.aaa(d, _parse_letter(d, argument))
            if head == SubsetKind.AN_LEMMA.value:
                parts = argument.split(':')
                if len(parts) > 3:
                    raise SpecParseError(f"A_n takes at most n, a letter and a cap: {text!r}")
                n = int(parts[0])
                if n < 1:
                    raise SpecParseError(f"A_n needs n >= 1, got {n}")
                letter = _parse_letter(d, parts[1]) if len(parts) > 1 else None
                sphere_cap = int(parts[2]) if len(parts) > 2 else None
                return cls.an_lemma(d, n, letter, sphere_cap=sphere_cap)
            if head == SubsetKind.WHOLE.value and not argument:
                return cls.whole(d)
        except SpecParseError:
            raise
        except ValueError as e:
            raise SpecParseError(f"Invalid subset spec {text!r}: {e}") from e
        raise SpecParseError(f"Unknown subset spec: {text!r}")

    @property
    def length_stride(self) -> int:
        """Gap between consecutive member lengths worth comparing"""
        if self.kind in (SubsetKind.SIGMA, SubsetKind.PALINDROMES):
            return 2
        return 1

    def materialize(self, radius: int, budget: int = DEFAULT_ENUMERATION_BUDGET) -> List[ReducedWord]:
        return materialize(self, radius, budget)

    def __str__(self) -> str:
        if self.kind is SubsetKind.EXPLICIT:
            return f"explicit:{','.join(str(g) for g in self.words)}"
        if self.kind in (SubsetKind.SIGMA, SubsetKind.PALINDROMES):
            return self.kind.value + ('' if self.include_identity else NO_IDENTITY_SUFFIX)
        if self.kind is SubsetKind.RAY_PREFIXES:
            return f"rayprefix:{self.ray}"
        if self.kind is SubsetKind.AAA:
            return f"aaa:{self.letter}"
        if self.kind is SubsetKind.AN_LEMMA:
            text = f"an:{self.n}"
            if self.sphere_cap is not None:
                return f"{text}:{self.letter}:{self.sphere_cap}"
            if self.letter != Letter(0):
                return f"{text}:{self.letter}"
            return text
        return self.kind.value


def _parse_letter(d: int, text: str) -> Letter:
    letter = Letter.from_char(text)
    if letter.generator_index >= d:
        raise InvalidWordError(f"Letter {text!r} is not a generator of F_{d}")
    return letter


@dataclass(frozen=True)
class GrowthReport:
    radii: List[int]
    counts: List[int]
    lower_est: WalkReal
    upper_est: WalkReal

    def to_dict(self):
        return {
            'radii': self.radii,
            'counts': self.counts,
            'lower_est': self.lower_est,
            'upper_est': self.upper_est,
        }


@dataclass
class InjectivityReport:
    n: int
    radius: int
    tuples_checked: int = 0
    collisions: List[Tuple[Tuple[ReducedWord, ...], Tuple[ReducedWord, ...]]] = field(default_factory=list)
    additivity_failures: List[Tuple[ReducedWord, ...]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.collisions and not self.additivity_failures

    def to_dict(self):
        return {
            'n': self.n,
            'R': self.radius,
            'tuples_checked': self.tuples_checked,
            'collisions': [[[str(g) for g in t] for t in pair] for pair in self.collisions],
            'additivity_failures': [[str(g) for g in t] for t in self.additivity_failures],
            'passed': self.passed,
        }

# ============================================================================
# WORD MAPS
# ============================================================================

def sigma_apply(g: ReducedWord) -> ReducedWord:
    """s_1...s_r -> s_1...s_{r-1} s_r^(r+1); |sigma(g)| = 2|g| and g is a prefix"""
    if g.is_identity():
        raise InvalidWordError("sigma is defined on nonempty words only")
    r = len(g)
    return ReducedWord._trusted(g.d, g.codes + (g.last(),) * r)


def palindrome_apply(g: ReducedWord) -> ReducedWord:
    """s_1...s_r -> s_1...s_r s_r...s_1"""
    if g.is_identity():
        raise InvalidWordError("Palindrome map is defined on nonempty words only")
    return ReducedWord._trusted(g.d, g.codes + tuple(reversed(g.codes)))

# ============================================================================
# MATERIALIZATION
# ============================================================================

def _check_budget(requested: int, budget: int, what: str):
    if requested > budget:
        raise BudgetExceededError(requested, budget, what)


def aaa_words(d: int, letter: Letter, r: int) -> Iterator[ReducedWord]:
    """Reduced words of length r that begin and end with the letter"""
    if r < 1:
        return
    start = ReducedWord(d, (letter.code,))
    for g in iter_words_with_prefix(start, r):
        if g.last() == letter.code:
            yield g


def aaa_lower_bound(d: int, r: int) -> Optional[int]:
    """(2d-1)^(r-3) for r >= 3; no bound below that"""
    return (2 * d - 1) ** (r - 3) if r >= 3 else None


def aaa_sphere_count(d: int, r: int, letter: Optional[Letter] = None, check_bound: bool = True) -> int:
    """
    |A_a^a cap S_r| by enumeration

    With check_bound, a count below (2d-1)^(r-3) raises IdentityCheckError.
    """
    if r < 1:
        raise ValueError(f"Sphere radius must be >= 1, got {r}")
    letter = letter or Letter(0)
    count = sum(1 for _ in aaa_words(d, letter, r))
    bound = aaa_lower_bound(d, r)
    if check_bound and bound is not None and count < bound:
        raise IdentityCheckError(f"|A_{letter}^{letter} cap S_{r}| = {count} is below (2d-1)^(r-3) = {bound}")
    return count


def an_lemma_set(n: int, radius: int, d: int, letter: Optional[Letter] = None,
                 budget: int = DEFAULT_ENUMERATION_BUDGET, pairing: Pairing = cantor_pairing,
                 sphere_cap: Optional[int] = None) -> List[ReducedWord]:
    """
    A_n cap B_R where A_n = {e} cup union_m (A_a^a cap S_(2^r(n,m)))

    Distinct n use disjoint sets of lengths when the pairing is injective,
    which is what makes products of one element from each A_i injective.
    The pairing must be strictly increasing in m. With sphere_cap only the
    first sphere_cap words (shortlex) of each sphere are kept.
    """
    if n < 1:
        raise ValueError(f"A_n needs n >= 1, got {n}")
    if sphere_cap is not None and sphere_cap < 1:
        raise ValueError(f"Sphere cap must be >= 1, got {sphere_cap}")
    letter = letter or Letter(0)
    words = [ReducedWord.identity(d)]
    m, previous = 1, None
    exponent = pairing(n, 1)
    while 2 ** exponent <= radius:
        if previous is not None and exponent <= previous:
            raise ValueError(f"Pairing must increase in m: r({n},{m}) = {exponent} after {previous}")
        length = 2 ** exponent
        kept = sphere_size(d, length) if sphere_cap is None else min(sphere_size(d, length), sphere_cap)
        _check_budget(kept, budget, f"words of S_{length}")
        words.extend(itertools.islice(aaa_words(d, letter, length), sphere_cap))
        m, previous = m + 1, exponent
        exponent = pairing(n, m)
    return sorted(words)


def materialize(spec: SubsetSpec, radius: int, budget: int = DEFAULT_ENUMERATION_BUDGET) -> List[ReducedWord]:
    """Exactly A cap B_R, sorted shortlex"""
    if radius < 0:
        raise ValueError(f"Radius must be nonnegative, got {radius}")
    d = spec.d
    kind = spec.kind
    if kind is SubsetKind.EXPLICIT:
        return [g for g in spec.words if len(g) <= radius]
    if kind in (SubsetKind.SIGMA, SubsetKind.PALINDROMES):
        half = radius // 2
        _check_budget(ball_size(d, half), budget, f"words of B_{half}")
        apply = sigma_apply if kind is SubsetKind.SIGMA else palindrome_apply
        words = [apply(g) for g in ball(d, half) if not g.is_identity()]
        if spec.include_identity:
            words.append(ReducedWord.identity(d))
        return sorted(words)
    if kind is SubsetKind.RAY_PREFIXES:
        return [spec.ray.head(length) for length in range(radius + 1)]
    if kind is SubsetKind.AAA:
        _check_budget(ball_size(d, radius), budget, f"words of B_{radius}")
        words = []
        for length in range(1, radius + 1):
            words.extend(aaa_words(d, spec.letter, length))
        return words
    if kind is SubsetKind.AN_LEMMA:
        return an_lemma_set(spec.n, radius, d, spec.letter, budget, spec.pairing, spec.sphere_cap)
    _check_budget(ball_size(d, radius), budget, f"words of B_{radius}")
    return list(ball(d, radius))

# ============================================================================
# GROWTH AND INJECTIVITY
# ============================================================================

def growth_rates(spec: SubsetSpec, radius_max: int, budget: int = DEFAULT_ENUMERATION_BUDGET) -> GrowthReport:
    """
    Counts |A cap B_r| for r <= R_max and the min / max of |A cap B_r|^(1/r)
    over the tail r > R_max / 2
    """
    if radius_max < 4:
        raise ValueError(f"Growth estimates need R_max >= 4, got {radius_max}")
    lengths = np.array([len(g) for g in spec.materialize(radius_max, budget)], dtype=np.int64)
    radii = np.arange(radius_max + 1)
    counts = np.array([np.count_nonzero(lengths <= r) for r in radii], dtype=np.int64)
    tail = radii > radius_max / 2
    estimates = np.power(counts[tail].astype(np.float64), 1.0 / radii[tail])
    report = GrowthReport(radii.tolist(), counts.tolist(), float(estimates.min()), float(estimates.max()))
    logger.info(f"Growth of {spec}: [{report.lower_est:.4f}, {report.upper_est:.4f}] at R_max={radius_max}")
    return report


def psi_injectivity_test(n: int, radius: int, d: int, budget: int = DEFAULT_ENUMERATION_BUDGET,
                         pairing: Pairing = cantor_pairing, sphere_cap: Optional[int] = None,
                         letter: Optional[Letter] = None) -> InjectivityReport:
    """Products g_1...g_n over A_1 x ... x A_n (within B_R) are distinct and length additive"""
    if n < 1:
        raise ValueError(f"Number of factors must be >= 1, got {n}")
    factors = [an_lemma_set(i, radius, d, letter, budget, pairing, sphere_cap) for i in range(1, n + 1)]
    total = int(np.prod([len(f) for f in factors], dtype=np.float64))
    _check_budget(total, budget, "tuples")
    report = InjectivityReport(n, radius)
    seen = {}
    for combination in itertools.product(*factors):
        product = ReducedWord.identity(d)
        for g in combination:
            product = mul(product, g)
        if len(product) != sum(len(g) for g in combination):
            report.additivity_failures.append(combination)
        if product in seen:
            report.collisions.append((seen[product], combination))
        else:
            seen[product] = combination
        report.tuples_checked += 1
    if not report.passed:
        logger.error(f"Product map on A_1 x ... x A_{n} is not injective within B_{radius}")
    return report
