from fractions import Fraction

import pytest

from freewalk.data_types import DefectKind, DegenerateMeasureError
from freewalk.green import GreenModel, green_at
from freewalk.measures import FinMeasure
from freewalk.sets import SubsetSpec
from freewalk.stationary import (
    GreenTranslateMeasure,
    MKAverage,
    gt_convolved,
    gt_defect_identity,
    gt_measure,
    infinite_mass_lower_bound,
    mk_defect_identity,
    mk_denominators,
    mk_limit_defect,
    mk_measure,
    vanishing_defect_schedule,
)
from freewalk.words import ReducedWord, ball, sphere


@pytest.fixture
def identity_set():
    return frozenset([ReducedWord.identity(2)])


def test_mk_measure_values(mu2, word, identity_set):
    average = MKAverage(mu2, identity_set, 2)
    assert mk_measure(average, [word("e")]) == 1
    assert mk_measure(average, [word("a")]) == Fraction(1, 5)
    assert mk_measure(MKAverage(mu2, sphere(2, 1), 3), sphere(2, 1)) == 1


def test_mk_measure_is_additive(mu2, word, identity_set):
    average = MKAverage(mu2, identity_set, 4)
    left, right = [word("a"), word("ab")], [word("e"), word("B")]
    assert mk_measure(average, left + right) == mk_measure(average, left) + mk_measure(average, right)


def test_mk_measure_names_the_first_reachable_step(mu2):
    with pytest.raises(DegenerateMeasureError, match="step 1"):
        mk_measure(MKAverage(mu2, sphere(2, 1), 0), sphere(2, 1))


def test_mk_measure_unreachable_target(word):
    drift = FinMeasure(2, {word("a"): Fraction(1)})
    with pytest.raises(DegenerateMeasureError):
        mk_measure(MKAverage(drift, [word("B")], 3), [word("B")])


def test_mk_average_rejects_negative_length(mu2, identity_set):
    with pytest.raises(ValueError):
        MKAverage(mu2, identity_set, -1)


def test_mk_defect_at_identity(mu2, word, identity_set):
    report = mk_defect_identity(MKAverage(mu2, identity_set, 2), [word("e")])
    assert report.kind is DefectKind.MK
    assert report.lhs == report.rhs == Fraction(-4, 5)
    assert report.bound == Fraction(4, 5)
    assert report.within_bound
    assert report.holds


def test_mk_defect_off_identity_is_nonnegative(mu2, identity_set):
    report = mk_defect_identity(MKAverage(mu2, identity_set, 4), sphere(2, 1))
    assert report.holds
    assert report.rhs > 0


def test_mk_defect_on_a_ball(mu2):
    report = mk_defect_identity(MKAverage(mu2, sphere(2, 1), 5), ball(2, 2))
    assert report.exact_match
    assert report.holds


def test_mk_defect_for_a_non_uniform_step(word):
    lazy = FinMeasure(2, {word("e"): Fraction(1, 2), word("a"): Fraction(1, 4), word("b"): Fraction(1, 4)})
    average = MKAverage(lazy, [word("e"), word("a")], 3)
    for window in ([word("e")], [word("a"), word("ab")], list(ball(2, 1))):
        assert mk_defect_identity(average, window).holds


def test_mk_denominators_are_nondecreasing_and_converge(mu2, identity_set):
    totals = mk_denominators(mu2, identity_set, 200)
    assert all(later >= earlier for earlier, later in zip(totals, totals[1:]))
    assert totals[2] == Fraction(5, 4)
    assert abs(totals[-1] - Fraction(3, 2)) < Fraction(1, 10 ** 6)


def test_mk_limit_is_not_stationary(identity_set, word):
    report = mk_limit_defect(2, identity_set, [word("e")])
    assert report.kind is DefectKind.MK
    assert report.lhs == report.rhs == Fraction(-2, 3)
    assert mk_limit_defect(2, identity_set, [word("a")]).lhs == 0


def test_mk_limit_matches_long_averages(mu2, identity_set, word):
    finite = mk_defect_identity(MKAverage(mu2, identity_set, 200), [word("e")])
    limit = mk_limit_defect(2, identity_set, [word("e")])
    assert finite.lhs < 0 and limit.lhs < 0
    assert abs(float(finite.lhs - limit.lhs)) < 1e-6


def test_gt_measure_values(closed2, word, identity_set):
    assert gt_measure(GreenTranslateMeasure(closed2, word("e"), identity_set), [word("a")]) == Fraction(1, 3)
    assert gt_measure(GreenTranslateMeasure(closed2, word("a"), identity_set), [word("A")]) == 3
    target = frozenset(ball(2, 1))
    assert gt_measure(GreenTranslateMeasure(closed2, word("ab"), target), target) == 1


def test_gt_measure_is_additive(closed2, word, identity_set):
    measure = GreenTranslateMeasure(closed2, word("aB"), identity_set)
    left, right = list(sphere(2, 1)), list(sphere(2, 2))
    assert gt_measure(measure, left + right) == gt_measure(measure, left) + gt_measure(measure, right)


def test_gt_defect_at_identity(closed2, word, identity_set):
    report = gt_defect_identity(GreenTranslateMeasure(closed2, word("e"), identity_set), [word("e")])
    assert report.kind is DefectKind.GREEN
    assert report.lhs == report.rhs == Fraction(2, 3)
    assert report.holds


def test_gt_defect_vanishes_when_k_inverse_is_outside(closed2, word, identity_set):
    measure = GreenTranslateMeasure(closed2, word("ab"), identity_set)
    report = gt_defect_identity(measure, [word("e"), word("a"), word("ba")])
    assert report.lhs == 0
    assert report.holds


def test_gt_defect_on_sigma_set(closed2, word):
    target = frozenset(SubsetSpec.sigma(2).materialize(6))
    measure = GreenTranslateMeasure(closed2, word("aaa"), target)
    report = gt_defect_identity(measure, ball(2, 2))
    assert report.lhs == 0
    assert report.holds


def test_gt_defect_with_k_inverse_inside(closed2, word, identity_set):
    measure = GreenTranslateMeasure(closed2, word("a"), identity_set)
    report = gt_defect_identity(measure, ball(2, 1))
    assert report.lhs == 1 / green_at(closed2, word("a"))
    assert report.holds


def test_truncated_model_reports_the_missing_tail(mu2, word, identity_set):
    model = GreenModel.truncated(mu2, 10)
    measure = GreenTranslateMeasure(model, word("a"), identity_set)
    report = gt_defect_identity(measure, [word("A"), word("e"), word("b")])
    assert report.residual is not None
    assert report.residual == report.truncation_term
    assert report.truncation_term < 0
    assert report.holds
    assert report.to_dict()['truncation_term'] == report.to_dict()['residual']


def test_gt_degenerate_denominator(word):
    drift = FinMeasure(2, {word("a"): Fraction(1)})
    measure = GreenTranslateMeasure(GreenModel.truncated(drift, 4), word("e"), [word("B")])
    with pytest.raises(DegenerateMeasureError):
        gt_measure(measure, [word("e")])


def test_vanishing_defect_schedule(closed2, identity_set):
    rows = vanishing_defect_schedule(closed2, identity_set, ball(2, 3), 5)
    assert [row.r for row in rows] == list(range(6))
    for row in rows:
        if row.r > 3:
            assert row.defect == 0
            assert not row.k_inverse_in_window
        else:
            assert row.defect == 1 / row.value


def test_vanishing_defect_schedule_on_empty_window(closed2, identity_set):
    rows = vanishing_defect_schedule(closed2, identity_set, [], 3)
    assert all(row.defect == 0 for row in rows)


def test_infinite_mass_lower_bound(closed2, word, identity_set):
    measure = GreenTranslateMeasure(closed2, word("ab"), identity_set)
    report = infinite_mass_lower_bound(measure, ball(2, 2))
    assert report.factor == Fraction(1, 4)
    assert report.convolved == gt_convolved(measure, ball(2, 2))
    assert report.holds


def test_defect_report_serialization(closed2, word, identity_set):
    report = gt_defect_identity(GreenTranslateMeasure(closed2, word("e"), identity_set), [word("e")])
    data = report.to_dict()
    assert data == {
        'kind': 'green',
        'E': ['e'],
        'lhs': '2/3',
        'rhs': '2/3',
        'exact_match': True,
        'holds': True,
    }
