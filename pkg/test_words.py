import pytest
from hypothesis import given, settings, strategies as st

from conftest import letter_codes, reduced_words
from freewalk.data_types import InvalidWordError, RayError, SpecParseError
from freewalk.words import (
    Letter,
    RaySpec,
    ReducedWord,
    ball,
    ball_size,
    dist_to_ray,
    inv,
    lcp_with_ray,
    mul,
    power_word,
    reduce,
    sphere,
    sphere_size,
)


def test_reduce_cancels_adjacent_inverses():
    a, b = Letter(0), Letter(1)
    assert str(reduce([a, a.inverse(), b], 2)) == "b"
    assert reduce([], 2).is_identity()
    assert str(reduce([a, b, b.inverse(), a], 2)) == "aa"


def test_parse_reduces_and_prints_identity(word):
    assert str(word("abB")) == "a"
    assert str(word("e")) == "e"
    assert str(word("aA")) == "e"


def test_mul_and_inv(word):
    assert mul(word("ab"), word("Ba")) == word("aa")
    assert inv(word("ab")) == word("BA")
    assert mul(word("e"), word("aB")) == word("aB")
    assert word("ab") * ~word("ab") == word("e")


def test_power_word(word):
    assert power_word(word("ab"), 2) == word("abab")
    assert power_word(word("ab"), -1) == word("BA")
    assert power_word(word("a"), 0).is_identity()


def test_unreduced_codes_are_rejected():
    with pytest.raises(InvalidWordError):
        ReducedWord(2, (0, 1))
    with pytest.raises(InvalidWordError):
        ReducedWord(2, (4,))


def test_rank_must_be_at_least_two():
    with pytest.raises(InvalidWordError):
        ReducedWord.identity(1)


def test_bad_letter_is_a_parse_error():
    with pytest.raises(SpecParseError):
        ReducedWord.parse(2, "a1")


@pytest.mark.parametrize("d, r, size", [(2, 1, 4), (2, 3, 36), (3, 1, 6), (3, 2, 30)])
def test_sphere_sizes(d, r, size):
    assert sphere_size(d, r) == size
    assert len(sphere(d, r)) == size


def test_ball_of_radius_two_has_seventeen_words():
    assert ball_size(2, 2) == 17
    assert len(ball(2, 2)) == 17


@pytest.mark.parametrize("d", [2, 3])
def test_spheres_are_exact_and_distinct(d):
    for r in range(9):
        words = sphere(d, r)
        assert len(words) == sphere_size(d, r)
        assert all(len(g) == r for g in words)
        # strictly increasing, hence pairwise distinct
        assert all(a < b for a, b in zip(words, words[1:]))


@pytest.mark.parametrize("d", [2, 3])
def test_ball_is_the_union_of_spheres(d):
    radius = 8 if d == 2 else 6
    assert list(ball(d, radius)) == [g for r in range(radius + 1) for g in sphere(d, r)]
    assert ball_size(d, 8) == sum(sphere_size(d, r) for r in range(9))


def test_sphere_is_shortlex_sorted():
    words = list(ball(2, 3))
    assert words == sorted(words)


def test_lcp_and_distance(word):
    w = RaySpec.parse(2, "e|a")
    assert lcp_with_ray(word("e"), w) == 0
    assert lcp_with_ray(word("aaa"), w) == 3
    assert lcp_with_ray(word("A"), w) == 0
    assert dist_to_ray(word("e"), w) == 0
    assert dist_to_ray(word("BA"), w) == 2
    assert dist_to_ray(word("a"), w) == 0


@pytest.mark.parametrize("d, text, radius", [
    (2, "e|a", 6),
    (2, "e|ab", 6),
    (2, "ab|aB", 6),
    (2, "B|Ab", 6),
    (3, "cB|a", 4),
])
def test_distance_to_ray_is_the_nearest_prefix(d, text, radius):
    w = RaySpec.parse(d, text)
    for g in ball(d, radius):
        inverse = inv(g)
        nearest = min(len(mul(inverse, w.head(i))) for i in range(len(g) + len(w.period) + 1))
        assert dist_to_ray(g, w) == nearest


def test_ray_letters_follow_prefix_then_period():
    w = RaySpec.parse(2, "B|Ab")
    assert str(w.head(6)) == "BAbAbA"
    assert lcp_with_ray(w.head(4), w) == 4
    assert str(w) == "B|Ab"


@pytest.mark.parametrize("text", ["e|", "a|A", "e|aBA", "ab|Ba", "aA|b"])
def test_invalid_rays(text):
    with pytest.raises(RayError):
        RaySpec.parse(2, text)


def test_ray_needs_one_separator():
    with pytest.raises(SpecParseError):
        RaySpec.parse(2, "ab")


@pytest.mark.parametrize("d", [2, 3])
@settings(max_examples=10_000, deadline=None)
@given(data=st.data())
def test_mul_is_associative(d, data):
    u, v, x = (data.draw(reduced_words(d)) for _ in range(3))
    assert mul(mul(u, v), x) == mul(u, mul(v, x))
    assert len(mul(u, v)) % 2 == (len(u) + len(v)) % 2


@given(letter_codes())
def test_reduce_is_idempotent_and_parity_preserving(codes):
    once = reduce(codes, 2)
    assert reduce(once.codes, 2) == once
    assert len(once) % 2 == len(codes) % 2


@given(reduced_words())
def test_inverse_cancels(g):
    assert mul(g, inv(g)).is_identity()
    assert inv(inv(g)) == g
