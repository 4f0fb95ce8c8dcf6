"""
Verification - the acceptance suite behind `verify-all`

Each check returns a CheckResult; a failed identity is reported, never
raised. `quick` shrinks the windows so the suite runs in seconds.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List

import numpy as np

from .data_types import TREND_FLOOR, TREND_SHRINK_FACTOR, TrendLabel
from .green import (
    GreenModel,
    find_small_translate,
    green_at,
    green_set,
    renewal_identity_check,
    tail_decomposition_check,
)
from .martin import (
    classify_trend,
    expected_lightness_sum,
    expected_sqrt_kernel,
    harmonic_check_kernel,
    increments,
    lightness_partial_sums,
    martin_kernel,
    sphere_average_bound,
    sphere_sqrt_sum,
)
from .measures import uniform_generator_measure
from .sets import SubsetSpec, aaa_lower_bound, aaa_sphere_count, psi_injectivity_test
from .stationary import GreenTranslateMeasure, MKAverage, gt_defect_identity, mk_defect_identity
from .words import RaySpec, ReducedWord, ball, sphere, sphere_size

logger = logging.getLogger(__name__)

VERIFICATION_SEED = 20240501

TEST_RAYS: Dict[int, List[str]] = {
    2: ["e|a", "e|ab", "a|b", "ab|aB", "B|Ab"],
    3: ["e|a", "e|c", "e|abc", "cB|a", "A|Cb"],
}

# Constant rays: sigma images of inverse ray prefixes stay on the geodesic
SIGMA_RAYS = ["e|a", "e|A", "e|b"]

SIGMA_BALL_COUNTS = [5, 17, 53, 161, 485, 1457]


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""

    def to_dict(self):
        return {'name': self.name, 'passed': self.passed, 'detail': self.detail}


def random_subsets(words: List[ReducedWord], count: int, seed: int) -> List[List[ReducedWord]]:
    """count seeded random subsets, each element kept with probability 1/2"""
    rng = np.random.default_rng(seed)
    masks = rng.integers(0, 2, size=(count, len(words)), dtype=np.int8)
    return [[g for g, keep in zip(words, mask) if keep] for mask in masks]


def sigma_ball(radius: int) -> List[ReducedWord]:
    return SubsetSpec.sigma(2).materialize(radius)

# ============================================================================
# CHECKS
# ============================================================================

def check_renewal_identity(quick: bool) -> CheckResult:
    truncation, radius = (20, 4) if quick else (50, 6)
    model = GreenModel.truncated(uniform_generator_measure(2), truncation)
    passed = renewal_identity_check(model, ball(2, radius))
    return CheckResult("renewal_identity", passed, f"N={truncation} on ball(2,{radius})")


def check_closed_form_oracle(quick: bool) -> CheckResult:
    closed = GreenModel.closed_form(2)
    truncated = GreenModel.truncated(uniform_generator_measure(2), 200)
    worst = max(abs(float(green_at(closed, g) - green_at(truncated, g))) for g in ball(2, 4))
    anchors = green_at(closed, ReducedWord.identity(2)) == Fraction(3, 2) and \
        green_at(closed, ReducedWord.parse(2, "a")) == Fraction(1, 2)
    return CheckResult("closed_form_oracle", worst < 1e-6 and anchors, f"max error {worst:.3e} at N=200")


def check_green_translate_identity(quick: bool) -> CheckResult:
    model = GreenModel.closed_form(2)
    count = 10 if quick else 50
    windows = random_subsets(list(ball(2, 2)), count, VERIFICATION_SEED)
    targets = [[ReducedWord.identity(2)], sigma_ball(6)]
    failures = 0
    for target in targets:
        for k in ball(2, 2):
            measure = GreenTranslateMeasure(model, k, frozenset(target))
            failures += sum(1 for window in windows if not gt_defect_identity(measure, window).holds)
    return CheckResult("green_translate_identity", failures == 0,
                       f"{failures} failures over {count} windows x 17 translates x 2 sets")


def check_mk_identity(quick: bool) -> CheckResult:
    mu = uniform_generator_measure(2)
    count = 10 if quick else 50
    windows = random_subsets(list(ball(2, 3)), count, VERIFICATION_SEED + 1)
    failures = 0
    for target in ([ReducedWord.identity(2)], list(sphere(2, 1))):
        for n in range(11):
            # A = S_1 is first reached at step 1
            if n == 0 and len(target) > 1:
                continue
            average = MKAverage(mu, frozenset(target), n)
            failures += sum(1 for window in windows if not mk_defect_identity(average, window).holds)
    return CheckResult("mk_identity", failures == 0, f"{failures} failures over {count} windows, n <= 10")


def check_kernel_harmonicity(quick: bool) -> CheckResult:
    radius = 4 if quick else 6
    worst = Fraction(0)
    for d, rays in TEST_RAYS.items():
        window = ball(d, radius)
        for text in rays:
            worst = max(worst, harmonic_check_kernel(RaySpec.parse(d, text), window))
    return CheckResult("kernel_harmonicity", worst == 0, f"max defect {worst} on ball(d,{radius})")


def check_spherical_symmetry(quick: bool) -> CheckResult:
    w = RaySpec.parse(2, TEST_RAYS[2][1])
    mismatches = 0
    for r in range(5):
        total = sphere_sqrt_sum(2, r, w)
        mismatches += sum(1 for g in sphere(2, r) if expected_sqrt_kernel(2, g) * sphere_size(2, r) != total)
    bound_radii = range(1, 7 if quick else 9)
    bounds = all(sphere_average_bound(2, r, w) for r in bound_radii)
    return CheckResult("spherical_symmetry", mismatches == 0 and bounds,
                       f"{mismatches} mismatches for r <= 4; average bound {'holds' if bounds else 'fails'}")


def check_translate_trend(quick: bool) -> CheckResult:
    model = GreenModel.closed_form(2)
    target = sigma_ball(8)
    total = green_set(model, target)
    steps = find_small_translate(model, target, 6)
    values = [step.value for step in steps]
    decreasing = all(later < earlier for earlier, later in zip(values, values[1:]))
    small = values[-1] < Fraction(1, 20) * total
    return CheckResult("translate_trend", decreasing and small,
                       f"G(A)={float(total):.6f}, r=6 value {float(values[-1]):.6f}")


def check_sigma_claim(quick: bool) -> CheckResult:
    counts = [len(sigma_ball(2 * r)) for r in range(1, 7)]
    radius_max = 10 if quick else 16
    spec = SubsetSpec.sigma(2)
    lower = True
    for text in SIGMA_RAYS:
        table = lightness_partial_sums(RaySpec.parse(2, text), spec, radius_max)
        lower &= all(row.value >= row.radius // 2 for row in table.rows)
    return CheckResult("sigma_claim", counts == SIGMA_BALL_COUNTS and lower, f"counts {counts}")


def check_lightness_contrast(quick: bool) -> CheckResult:
    prefixes = expected_lightness_sum(SubsetSpec.ray_prefixes(RaySpec.parse(2, "e|ab")), 12)
    steps = increments(prefixes.values())
    # steps[i] is the increment at R = i + 1
    decaying = all(steps[i + 1] <= TREND_SHRINK_FACTOR * steps[i] for i in range(5, len(steps) - 1))
    sigma = expected_lightness_sum(SubsetSpec.sigma(2), 14)
    sigma_steps = increments(sigma.values(), stride=2)
    persistent = all(step >= TREND_FLOOR for step in sigma_steps)
    labels = (classify_trend(prefixes.values()), classify_trend(sigma.values(), 2))
    passed = decaying and persistent and labels == (TrendLabel.BOUNDED_LOOKING, TrendLabel.DIVERGING)
    return CheckResult("lightness_contrast", passed, f"labels {labels[0].value} / {labels[1].value}")


def check_subsets_lemma(quick: bool) -> CheckResult:
    report = psi_injectivity_test(2, 8, 2)
    counts_ok = all(aaa_sphere_count(2, r, check_bound=False) >= aaa_lower_bound(2, r) for r in range(3, 9))
    return CheckResult("subsets_lemma", report.passed and counts_ok,
                       f"{report.tuples_checked} tuples, {len(report.collisions)} collisions")


def check_group_not_light(quick: bool) -> CheckResult:
    radius_max = 6 if quick else 10
    failures = 0
    for text in TEST_RAYS[2]:
        w = RaySpec.parse(2, text)
        running = Fraction(0)
        for r in range(radius_max + 1):
            running += sum((martin_kernel(w, g) for g in sphere(2, r)), Fraction(0))
            failures += running <= r
    return CheckResult("group_not_light", failures == 0, f"R <= {radius_max}, {len(TEST_RAYS[2])} rays")


def check_tail_decomposition(quick: bool) -> CheckResult:
    mu = uniform_generator_measure(2)
    results = [
        tail_decomposition_check(mu, target, m, truncation)
        for m, truncation in ((1, 5), (2, 6), (3, 4))
        for target in ([ReducedWord.identity(2)], list(sphere(2, 1)))
    ]
    return CheckResult("tail_decomposition", all(results), f"{sum(results)}/{len(results)} exact")


ACCEPTANCE_CHECKS: List[Callable[[bool], CheckResult]] = [
    check_renewal_identity,
    check_closed_form_oracle,
    check_green_translate_identity,
    check_mk_identity,
    check_kernel_harmonicity,
    check_spherical_symmetry,
    check_translate_trend,
    check_sigma_claim,
    check_lightness_contrast,
    check_subsets_lemma,
    check_group_not_light,
    check_tail_decomposition,
]


def verify_all(quick: bool = False) -> List[CheckResult]:
    results = []
    for check in ACCEPTANCE_CHECKS:
        result = check(quick)
        level = logging.INFO if result.passed else logging.ERROR
        logger.log(level, f"{result.name}: {'PASS' if result.passed else 'FAIL'} ({result.detail})")
        results.append(result)
    return results
