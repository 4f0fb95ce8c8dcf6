import pytest

from freewalk import sets
from freewalk.data_types import (
    BudgetExceededError,
    IdentityCheckError,
    InvalidWordError,
    SpecParseError,
    SubsetKind,
)
from freewalk.sets import (
    SubsetSpec,
    aaa_lower_bound,
    aaa_sphere_count,
    aaa_words,
    an_lemma_set,
    cantor_pairing,
    growth_rates,
    palindrome_apply,
    psi_injectivity_test,
    sigma_apply,
)
from freewalk.words import Letter, RaySpec, ReducedWord, ball, ball_size

SIGMA_BALL_COUNTS = [5, 17, 53, 161, 485, 1457]


def test_sigma_apply(word):
    assert sigma_apply(word("ab")) == word("abbb")
    assert sigma_apply(word("a")) == word("aa")
    assert sigma_apply(word("aB")) == word("aBBB")


def test_sigma_keeps_the_word_as_prefix():
    for g in ball(2, 5):
        if g.is_identity():
            continue
        image = sigma_apply(g)
        assert len(image) == 2 * len(g)
        assert image.codes[:len(g)] == g.codes


def test_sigma_is_injective():
    images = [sigma_apply(g) for g in ball(2, 6) if not g.is_identity()]
    assert len(set(images)) == len(images)


def test_word_maps_reject_identity():
    with pytest.raises(InvalidWordError):
        sigma_apply(ReducedWord.identity(2))
    with pytest.raises(InvalidWordError):
        palindrome_apply(ReducedWord.identity(2))


def test_palindrome_apply(word):
    assert palindrome_apply(word("aB")) == word("aBBa")
    assert palindrome_apply(word("b")) == word("bb")


def test_sigma_counts():
    spec = SubsetSpec.sigma(2)
    assert len(spec.materialize(2)) == 5
    assert len(spec.materialize(6)) == 53
    assert [len(spec.materialize(2 * r)) for r in range(1, 7)] == SIGMA_BALL_COUNTS
    assert [len(spec.materialize(2 * r)) for r in range(1, 7)] == [ball_size(2, r) for r in range(1, 7)]


def test_sigma_without_identity():
    spec = SubsetSpec.sigma(2, include_identity=False)
    assert len(spec.materialize(6)) == 52
    assert str(spec) == "sigma-noe"


def test_palindrome_counts():
    spec = SubsetSpec.palindromes(2)
    assert [len(spec.materialize(2 * r)) for r in range(1, 5)] == [ball_size(2, r) for r in range(1, 5)]
    assert all(len(g) % 2 == 0 for g in spec.materialize(8))


@pytest.mark.parametrize("text", [
    "explicit:e,a,ab", "sigma", "sigma-noe", "palindromes", "palindromes-noe",
    "rayprefix:a|b", "aaa:a", "an:2", "all",
])
def test_materialize_is_monotone(text):
    spec = SubsetSpec.parse(2, text)
    previous = set()
    for radius in range(9):
        current = spec.materialize(radius)
        assert current == sorted(current)
        assert all(len(g) <= radius for g in current)
        assert previous <= set(current)
        previous = set(current)


def test_explicit_materialize_clips_to_the_ball(word):
    spec = SubsetSpec.parse(2, "explicit:aba,e,a")
    assert spec.materialize(1) == [word("e"), word("a")]
    assert spec.materialize(0) == [word("e")]
    assert SubsetSpec.parse(2, "explicit:").materialize(5) == []


def test_ray_prefixes():
    spec = SubsetSpec.ray_prefixes(RaySpec.parse(2, "a|b"))
    assert [str(g) for g in spec.materialize(3)] == ["e", "a", "ab", "abb"]


def test_aaa_sphere(word):
    assert set(aaa_words(2, Letter(0), 3)) == {word("aaa"), word("aba"), word("aBa")}
    assert aaa_sphere_count(2, 1) == 1
    assert aaa_sphere_count(2, 3) == 3
    assert aaa_sphere_count(2, 5) >= 9
    assert aaa_sphere_count(2, 3, Letter(1, -1)) == 3


def test_aaa_lower_bound():
    for r in range(3, 9):
        assert aaa_sphere_count(2, r) >= 3 ** (r - 3)


def test_aaa_sphere_count_enforces_the_lower_bound(monkeypatch):
    assert aaa_lower_bound(2, 2) is None
    assert aaa_lower_bound(2, 5) == 9
    monkeypatch.setattr(sets, "aaa_words", lambda d, letter, r: iter(()))
    with pytest.raises(IdentityCheckError, match="below"):
        aaa_sphere_count(2, 4)
    assert aaa_sphere_count(2, 4, check_bound=False) == 0
    assert aaa_sphere_count(2, 2) == 0


def test_cantor_pairing():
    assert cantor_pairing(1, 1) == 1
    assert cantor_pairing(2, 1) == 2
    assert cantor_pairing(1, 2) == 3
    values = {cantor_pairing(n, m) for n in range(1, 12) for m in range(1, 12)}
    assert len(values) == 121
    with pytest.raises(ValueError):
        cantor_pairing(0, 1)


def test_an_lemma_set(word):
    assert an_lemma_set(1, 0, 2) == [word("e")]
    assert an_lemma_set(3, 0, 2) == [word("e")]
    # r(1,1) = 1 puts A_a^a cap S_2 = {aa} into A_1
    assert an_lemma_set(1, 2, 2) == [word("e"), word("aa")]
    lengths = {len(g) for n in (1, 2, 3) for g in an_lemma_set(n, 8, 2)}
    assert lengths <= {0, 2, 4, 8}


def test_an_lemma_set_follows_the_letter(word):
    assert an_lemma_set(1, 2, 2, Letter(1)) == [word("e"), word("bb")]
    assert an_lemma_set(1, 2, 2, Letter(1, -1)) == [word("e"), word("BB")]
    spec = SubsetSpec.an_lemma(2, 1, Letter(1))
    assert spec.materialize(2) == [word("e"), word("bb")]


def test_an_lemma_sphere_cap(word):
    # A_1 uses lengths 2 and 8 inside B_8; the cap keeps the first words of each sphere
    capped = an_lemma_set(1, 8, 2, sphere_cap=2)
    assert capped == [word("e"), word("aa"), word("aaaaaaaa"), word("aaaaaaba")]
    assert set(capped) <= set(an_lemma_set(1, 8, 2))
    assert SubsetSpec.parse(2, "an:1:a:2").materialize(8) == capped
    with pytest.raises(BudgetExceededError):
        an_lemma_set(1, 8, 2, budget=100)
    assert len(an_lemma_set(1, 8, 2, budget=100, sphere_cap=2)) == 4
    with pytest.raises(ValueError):
        an_lemma_set(1, 8, 2, sphere_cap=0)


def test_an_lemma_custom_pairing():
    def shifted(n, m):
        return cantor_pairing(n, m) + 1

    assert {len(g) for g in an_lemma_set(1, 8, 2, pairing=shifted)} == {0, 4}
    spec = SubsetSpec.an_lemma(2, 1, pairing=shifted)
    assert spec.materialize(8) == an_lemma_set(1, 8, 2, pairing=shifted)
    with pytest.raises(ValueError, match="increase"):
        an_lemma_set(1, 8, 2, pairing=lambda n, m: 3 - m)


def test_an_lemma_sets_use_disjoint_lengths():
    first = {len(g) for g in an_lemma_set(1, 8, 2)} - {0}
    second = {len(g) for g in an_lemma_set(2, 8, 2)} - {0}
    assert first and second
    assert not first & second


def test_product_injectivity():
    report = psi_injectivity_test(2, 8, 2)
    assert report.passed
    assert report.collisions == []
    assert report.tuples_checked == len(an_lemma_set(1, 8, 2)) * len(an_lemma_set(2, 8, 2))
    assert report.to_dict()['passed'] is True


def test_product_injectivity_three_factors():
    assert psi_injectivity_test(3, 8, 2).passed


def test_product_injectivity_needs_an_injective_pairing(word):
    report = psi_injectivity_test(2, 4, 2, pairing=lambda n, m: m)
    assert not report.passed
    assert ((word("e"), word("aa")), (word("aa"), word("e"))) in report.collisions
    assert psi_injectivity_test(2, 8, 2, sphere_cap=3).passed


def test_growth_of_sigma():
    upper = growth_rates(SubsetSpec.sigma(2), 12)
    assert 1.6 <= upper.upper_est <= 1.9
    report = growth_rates(SubsetSpec.sigma(2), 16)
    assert abs(report.lower_est - 3 ** 0.5) < 0.1
    assert report.counts[:3] == [1, 1, 5]


def test_growth_of_ray_prefixes():
    report = growth_rates(SubsetSpec.ray_prefixes(RaySpec.parse(2, "e|ab")), 10)
    assert report.counts == [r + 1 for r in range(11)]
    assert report.lower_est < report.upper_est < 1.5


def test_growth_of_the_whole_group():
    report = growth_rates(SubsetSpec.whole(2), 8)
    assert report.counts == [ball_size(2, r) for r in range(9)]
    assert 2.5 < report.lower_est <= report.upper_est < 3.5


def test_growth_needs_a_tail():
    with pytest.raises(ValueError):
        growth_rates(SubsetSpec.sigma(2), 3)


def test_budget_is_enforced():
    with pytest.raises(BudgetExceededError):
        SubsetSpec.whole(2).materialize(8, budget=1000)
    with pytest.raises(BudgetExceededError):
        SubsetSpec.sigma(2).materialize(16, budget=1000)


@pytest.mark.parametrize("text, kind", [
    ("explicit:a,b", SubsetKind.EXPLICIT),
    ("sigma", SubsetKind.SIGMA),
    ("palindromes-noe", SubsetKind.PALINDROMES),
    ("rayprefix:ab|aB", SubsetKind.RAY_PREFIXES),
    ("aaa:B", SubsetKind.AAA),
    ("an:3", SubsetKind.AN_LEMMA),
    ("an:2:b", SubsetKind.AN_LEMMA),
    ("an:1:A:3", SubsetKind.AN_LEMMA),
    ("all", SubsetKind.WHOLE),
])
def test_parse_round_trips_through_str(text, kind):
    spec = SubsetSpec.parse(2, text)
    assert spec.kind is kind
    assert SubsetSpec.parse(2, str(spec)) == spec


@pytest.mark.parametrize("text", [
    "sigma:2", "an:0", "an:x", "an:1:c", "an:1:a:0", "an:1:a:2:3",
    "aaa:c", "rayprefix:a|A", "cube", "all:1", "explicit:a9",
])
def test_parse_errors(text):
    with pytest.raises((SpecParseError, InvalidWordError)):
        SubsetSpec.parse(2, text)
