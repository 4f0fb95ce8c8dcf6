from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import reduced_words

from freewalk.data_types import EvaluationError
from freewalk.measures import (
    FinMeasure,
    WindowFn,
    convolve,
    harmonicity_defect,
    indicator,
    left_convolve_fn,
    left_translate,
    power,
    power_at,
    power_mass,
    radial_profile,
    right_translate,
    uniform_generator_measure,
    windowed_power,
)
from freewalk.words import ball, sphere


def test_uniform_generator_measure():
    mu = uniform_generator_measure(2)
    assert len(mu) == 4
    assert set(mu.entries.values()) == {Fraction(1, 4)}
    nu = uniform_generator_measure(3)
    assert len(nu) == 6
    assert set(nu.entries.values()) == {Fraction(1, 6)}
    assert mu.total_mass() == 1


def test_negative_mass_is_rejected(word):
    with pytest.raises(ValueError):
        FinMeasure(2, {word("a"): Fraction(-1, 2)})


def test_two_step_masses(mu2, word):
    twice = convolve(mu2, mu2)
    assert twice.get(word("e")) == Fraction(1, 4)
    assert twice.get(word("ab")) == Fraction(1, 16)
    assert twice.total_mass() == 1


def test_delta_is_neutral(mu2):
    delta = FinMeasure.delta(2)
    assert convolve(mu2, delta) == mu2
    assert convolve(delta, mu2) == mu2


def finite_measures(d=2):
    masses = st.fractions(min_value=Fraction(1, 12), max_value=2, max_denominator=12)
    return st.dictionaries(reduced_words(d, 3), masses, min_size=1, max_size=4).map(
        lambda entries: FinMeasure(d, entries))


@settings(max_examples=50, deadline=None)
@given(finite_measures(), finite_measures(), finite_measures())
def test_convolution_is_associative(mu, nu, rho):
    assert convolve(convolve(mu, nu), rho) == convolve(mu, convolve(nu, rho))
    assert convolve(mu, nu).total_mass() == mu.total_mass() * nu.total_mass()


def test_powers(mu2, word):
    assert power(mu2, 0) == FinMeasure.delta(2)
    assert power(mu2, 2).get(word("e")) == Fraction(1, 4)
    assert power(mu2, 3).get(word("e")) == 0


def test_negative_power_is_rejected(mu2):
    with pytest.raises(ValueError):
        power(mu2, -1)


def test_powers_are_probability_measures_with_parity(mu2):
    for n in range(9):
        mu_n = power(mu2, n)
        assert mu_n.total_mass() == 1
        assert all(len(g) % 2 == n % 2 for g in mu_n.entries)


@pytest.mark.parametrize("n", [0, 1, 4, 7])
def test_radial_fast_path_matches_enumeration(mu2, n):
    mu_n = power(mu2, n)
    for g in ball(2, n):
        assert radial_profile(2).point_mass(n, len(g)) == mu_n.get(g)


def test_radial_profile_rows_sum_to_one():
    for n in range(30):
        assert sum(radial_profile(3).row(n)) == 1


def test_power_mass_on_sets(mu2, word):
    assert power_mass(mu2, 2, [word("e"), word("aa"), word("aa")]) == Fraction(1, 4) + Fraction(1, 16)
    assert power_at(mu2, 1, word("b")) == Fraction(1, 4)


def test_non_uniform_measure_uses_convolution(word):
    lazy = FinMeasure(2, {word("e"): Fraction(1, 2), word("a"): Fraction(1, 2)})
    assert power_at(lazy, 2, word("a")) == Fraction(1, 2)
    assert power_at(lazy, 2, word("aa")) == Fraction(1, 4)


def test_windowed_power_matches_restricted_power(mu2):
    window = windowed_power(mu2, 6, 2)
    full = power(mu2, 6)
    assert window.discarded
    assert dict(window.measure.entries) == {g: p for g, p in full.entries.items() if len(g) <= 2}


def test_windowed_power_without_pruning(mu2):
    window = windowed_power(mu2, 3, 3)
    assert not window.discarded
    assert window.measure == power(mu2, 3)


def test_left_convolve_fn(mu2, word):
    f = indicator([word("a")])
    assert left_convolve_fn(FinMeasure.delta(2), f, word("a")) == 1
    assert left_convolve_fn(mu2, lambda g: Fraction(1), word("ab")) == 1
    # only h = A has h^-1 e = a
    assert left_convolve_fn(mu2, f, word("e")) == Fraction(1, 4)


def test_harmonicity_defect(mu2, word):
    assert harmonicity_defect(mu2, indicator([word("e")]), [word("e")]) == 1
    assert harmonicity_defect(mu2, lambda g: Fraction(7), ball(2, 2)) == 0


def test_window_function_outside_its_window(mu2, word):
    f = WindowFn({g: Fraction(1) for g in ball(2, 1)})
    assert f(word("a")) == 1
    with pytest.raises(EvaluationError):
        f(word("ab"))
    with pytest.raises(EvaluationError):
        harmonicity_defect(mu2, f, sphere(2, 1))


@given(st.integers(min_value=0, max_value=12), st.integers(min_value=0, max_value=4))
def test_windowed_power_is_exact(n, radius):
    mu = uniform_generator_measure(2)
    window = windowed_power(mu, n, radius).measure
    for g in ball(2, radius):
        assert window.get(g) == power_at(mu, n, g)


def test_translates(word):
    window = [word("e"), word("a"), word("Ab")]
    assert left_translate(word("a"), window) == [word("a"), word("aa"), word("b")]
    assert right_translate(window, word("B")) == [word("B"), word("aB"), word("A")]
