import hypothesis
import numpy as np
import pytest
from hypothesis import strategies as st

from freewalk.green import GreenModel
from freewalk.measures import uniform_generator_measure
from freewalk.words import ReducedWord, reduce

np.seterr(all="warn")

hypothesis.settings.register_profile("fast", max_examples=5)
hypothesis.settings.register_profile("debugger", report_multiple_bugs=False)
hypothesis.settings.register_profile("no_deadline", deadline=None)
hypothesis.settings.load_profile("no_deadline")


@pytest.fixture
def mu2():
    return uniform_generator_measure(2)


@pytest.fixture
def closed2():
    return GreenModel.closed_form(2)


@pytest.fixture
def word():
    """word("aB") parses in F_2"""
    return lambda text, d=2: ReducedWord.parse(d, text)


def letter_codes(d: int = 2, max_size: int = 8):
    return st.lists(st.integers(min_value=0, max_value=2 * d - 1), max_size=max_size)


def reduced_words(d: int = 2, max_size: int = 8):
    return letter_codes(d, max_size).map(lambda codes: reduce(codes, d))
