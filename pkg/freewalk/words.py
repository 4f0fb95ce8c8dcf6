"""
Words - free group arithmetic for FreeWalk

Reduced words over d generators and their inverses, sphere and ball
enumeration, and boundary rays (eventually periodic infinite reduced words)
with the geodesic distance D(g, w).

Letters are packed as integer codes: code = 2 * generator_index for a_i and
2 * generator_index + 1 for a_i^-1, so the inverse of a code is code ^ 1 and
integer order is the letter order a_1 < a_1^-1 < a_2 < a_2^-1 < ...

Example:
    g = ReducedWord.parse(2, "abB")      # -> a
    w = RaySpec.parse(2, "e|a")          # aaa...
    dist_to_ray(ReducedWord.parse(2, "BA"), w)   # 2
"""

import logging
from dataclasses import dataclass
from functools import lru_cache, total_ordering
from typing import Iterable, Iterator, List, Sequence, Tuple, Union

from .data_types import (
    IDENTITY_STRING,
    InvalidWordError,
    LetterCode,
    RayError,
    SpecParseError,
    WalkNatural,
    WalkString,
)

logger = logging.getLogger(__name__)

MAX_GENERATORS = 26

# ============================================================================
# LETTERS
# ============================================================================

@total_ordering
@dataclass(frozen=True)
class Letter:
    """
    A generator a_i (sign +1) or its inverse (sign -1)

    Args:
        generator_index: index i in [0, d)
        sign: +1 or -1
    """
    generator_index: int
    sign: int = 1

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise InvalidWordError(f"Letter sign must be +1 or -1, got {self.sign}")
        if not 0 <= self.generator_index < MAX_GENERATORS:
            raise InvalidWordError(f"Generator index out of range: {self.generator_index}")

    @property
    def code(self) -> LetterCode:
        return 2 * self.generator_index + (0 if self.sign > 0 else 1)

    @classmethod
    def from_code(cls, code: LetterCode) -> 'Letter':
        return cls(code >> 1, -1 if code & 1 else 1)

    @classmethod
    def from_char(cls, char: str) -> 'Letter':
        if len(char) != 1 or not char.isalpha() or not char.isascii():
            raise SpecParseError(f"Invalid letter: {char!r}")
        index = ord(char.lower()) - ord('a')
        return cls(index, -1 if char.isupper() else 1)

    def inverse(self) -> 'Letter':
        return Letter(self.generator_index, -self.sign)

    def to_char(self) -> str:
        char = chr(ord('a') + self.generator_index)
        return char if self.sign > 0 else char.upper()

    def __lt__(self, other: 'Letter') -> bool:
        if not isinstance(other, Letter):
            return NotImplemented
        return self.code < other.code

    def __str__(self) -> str:
        return self.to_char()


def code_to_char(code: LetterCode) -> str:
    char = chr(ord('a') + (code >> 1))
    return char.upper() if code & 1 else char

# ============================================================================
# REDUCED WORDS
# ============================================================================

@dataclass(frozen=True)
class ReducedWord:
    """
    Freely reduced word in F_d; the empty word is the identity e

    Words are immutable values ordered shortlex (length first, then letter
    order), which is the enumeration order used everywhere downstream.
    """
    d: int
    codes: Tuple[LetterCode, ...] = ()

    def __post_init__(self):
        _check_rank(self.d)
        previous = None
        for code in self.codes:
            if not 0 <= code < 2 * self.d:
                raise InvalidWordError(f"Letter {code_to_char(code)!r} has generator index >= d={self.d}")
            if previous is not None and code == previous ^ 1:
                raise InvalidWordError(f"Word is not reduced: {''.join(code_to_char(c) for c in self.codes)}")
            previous = code

    @classmethod
    def _trusted(cls, d: int, codes: Tuple[LetterCode, ...]) -> 'ReducedWord':
        # Internal constructor for codes already known to be reduced
        word = object.__new__(cls)
        object.__setattr__(word, 'd', d)
        object.__setattr__(word, 'codes', codes)
        return word

    @classmethod
    def identity(cls, d: int) -> 'ReducedWord':
        _check_rank(d)
        return cls._trusted(d, ())

    @classmethod
    def parse(cls, d: int, text: WalkString) -> 'ReducedWord':
        """Parse "aBb" style text (uppercase = inverse, "e" = identity) and reduce it"""
        text = text.strip()
        if text in (IDENTITY_STRING, ""):
            return cls.identity(d)
        letters = [Letter.from_char(char) for char in text]
        return reduce(letters, d)

    @property
    def letters(self) -> Tuple[Letter, ...]:
        return tuple(Letter.from_code(code) for code in self.codes)

    def is_identity(self) -> bool:
        return not self.codes

    def first(self) -> LetterCode:
        return self.codes[0]

    def last(self) -> LetterCode:
        return self.codes[-1]

    def sort_key(self) -> Tuple[int, Tuple[LetterCode, ...]]:
        return (len(self.codes), self.codes)

    def __len__(self) -> int:
        return len(self.codes)

    def __lt__(self, other: 'ReducedWord') -> bool:
        return self.sort_key() < other.sort_key()

    def __mul__(self, other: 'ReducedWord') -> 'ReducedWord':
        return mul(self, other)

    def __invert__(self) -> 'ReducedWord':
        return inv(self)

    def __str__(self) -> str:
        if not self.codes:
            return IDENTITY_STRING
        return ''.join(code_to_char(code) for code in self.codes)

    def __repr__(self) -> str:
        return f"ReducedWord(d={self.d}, {self})"


def _check_rank(d: int):
    if not isinstance(d, int) or d < 2:
        raise InvalidWordError(f"Free group rank must be an integer >= 2, got {d!r}")
    if d > MAX_GENERATORS:
        raise InvalidWordError(f"Free group rank {d} exceeds the {MAX_GENERATORS}-letter alphabet")


def _check_same_rank(*words: 'ReducedWord'):
    ranks = {word.d for word in words}
    if len(ranks) > 1:
        raise InvalidWordError(f"Words from free groups of different rank: {sorted(ranks)}")

# ============================================================================
# GROUP OPERATIONS
# ============================================================================

def reduce(letters: Iterable[Union[Letter, LetterCode]], d: int) -> ReducedWord:
    """Free reduction of a letter sequence (stack cancellation)"""
    _check_rank(d)
    stack: List[LetterCode] = []
    for letter in letters:
        code = letter.code if isinstance(letter, Letter) else int(letter)
        if not 0 <= code < 2 * d:
            raise InvalidWordError(f"Letter {code_to_char(code)!r} has generator index >= d={d}")
        if stack and stack[-1] == code ^ 1:
            stack.pop()
        else:
            stack.append(code)
    return ReducedWord._trusted(d, tuple(stack))


def mul(u: ReducedWord, v: ReducedWord) -> ReducedWord:
    _check_same_rank(u, v)
    left, right = u.codes, v.codes
    # Cancel the longest suffix of u against the matching prefix of v
    cancel = 0
    limit = min(len(left), len(right))
    while cancel < limit and left[len(left) - 1 - cancel] == right[cancel] ^ 1:
        cancel += 1
    return ReducedWord._trusted(u.d, left[:len(left) - cancel] + right[cancel:])


def inv(u: ReducedWord) -> ReducedWord:
    return ReducedWord._trusted(u.d, tuple(code ^ 1 for code in reversed(u.codes)))


def power_word(u: ReducedWord, n: int) -> ReducedWord:
    """u^n for any integer n"""
    if n < 0:
        return power_word(inv(u), -n)
    result = ReducedWord.identity(u.d)
    for _ in range(n):
        result = mul(result, u)
    return result

# ============================================================================
# SPHERES AND BALLS
# ============================================================================

def sphere_size(d: int, r: int) -> WalkNatural:
    _check_radius(r)
    if r == 0:
        return 1
    return 2 * d * (2 * d - 1) ** (r - 1)


def ball_size(d: int, r: int) -> WalkNatural:
    _check_radius(r)
    return sum(sphere_size(d, i) for i in range(r + 1))


def _check_radius(r: int):
    if r < 0:
        raise InvalidWordError(f"Radius must be nonnegative, got {r}")


@lru_cache(maxsize=64)
def sphere(d: int, r: int) -> Tuple[ReducedWord, ...]:
    """S_r in lexicographic letter order"""
    _check_rank(d)
    _check_radius(r)
    if r == 0:
        return (ReducedWord.identity(d),)
    words = []
    for parent in sphere(d, r - 1):
        forbidden = parent.codes[-1] ^ 1 if parent.codes else None
        for code in range(2 * d):
            if code != forbidden:
                words.append(ReducedWord._trusted(d, parent.codes + (code,)))
    logger.debug(f"Enumerated sphere d={d} r={r}: {len(words)} words")
    return tuple(words)


def ball(d: int, r: int) -> Tuple[ReducedWord, ...]:
    """B_r as the concatenation of spheres 0..r"""
    _check_radius(r)
    words: List[ReducedWord] = []
    for radius in range(r + 1):
        words.extend(sphere(d, radius))
    return tuple(words)


def iter_words_with_prefix(prefix: ReducedWord, length: int) -> Iterator[ReducedWord]:
    """All reduced words of the given length extending prefix, in letter order"""
    if length < len(prefix):
        return
    d = prefix.d

    def extend(codes: Tuple[LetterCode, ...]) -> Iterator[ReducedWord]:
        if len(codes) == length:
            yield ReducedWord._trusted(d, codes)
            return
        forbidden = codes[-1] ^ 1 if codes else None
        for code in range(2 * d):
            if code != forbidden:
                yield from extend(codes + (code,))

    yield from extend(prefix.codes)

# ============================================================================
# BOUNDARY RAYS
# ============================================================================

@dataclass(frozen=True)
class RaySpec:
    """
    Eventually periodic infinite reduced word prefix·period·period·...

    Junction reducedness is validated here and never repaired.
    """
    prefix: ReducedWord
    period: ReducedWord

    def __post_init__(self):
        _check_same_rank(self.prefix, self.period)
        if self.period.is_identity():
            raise RayError("Ray period must be nonempty")
        if self.period.last() == self.period.first() ^ 1:
            raise RayError(f"Period {self.period} cancels against itself")
        if self.prefix.codes and self.prefix.last() == self.period.first() ^ 1:
            raise RayError(f"Prefix {self.prefix} cancels against period {self.period}")

    @classmethod
    def parse(cls, d: int, text: WalkString) -> 'RaySpec':
        if text.count('|') != 1:
            raise SpecParseError(f"Ray must be written prefix|period, got {text!r}")
        prefix_text, period_text = text.split('|')
        try:
            prefix = _parse_reduced(d, prefix_text)
            period = _parse_reduced(d, period_text)
        except InvalidWordError as e:
            raise RayError(f"Ray parts must already be reduced: {text!r}") from e
        return cls(prefix, period)

    @classmethod
    def constant(cls, letter: Letter, d: int) -> 'RaySpec':
        return cls(ReducedWord.identity(d), ReducedWord(d, (letter.code,)))

    @property
    def d(self) -> int:
        return self.prefix.d

    def letter_code(self, index: int) -> LetterCode:
        """0-based letter of the infinite word"""
        if index < len(self.prefix):
            return self.prefix.codes[index]
        offset = (index - len(self.prefix)) % len(self.period)
        return self.period.codes[offset]

    def head(self, n: int) -> ReducedWord:
        """First n letters as a reduced word"""
        return ReducedWord._trusted(self.d, tuple(self.letter_code(i) for i in range(n)))

    def __str__(self) -> str:
        return f"{self.prefix}|{self.period}"


def _parse_reduced(d: int, text: WalkString) -> ReducedWord:
    # Unlike ReducedWord.parse, rejects input that would need reduction
    text = text.strip()
    if text in (IDENTITY_STRING, ""):
        return ReducedWord.identity(d)
    return ReducedWord(d, tuple(Letter.from_char(char).code for char in text))


def lcp_with_ray(g: ReducedWord, w: RaySpec) -> WalkNatural:
    """Length of the longest common prefix of g and the infinite word w"""
    _check_same_rank(g, w.prefix)
    length = 0
    for index, code in enumerate(g.codes):
        if code != w.letter_code(index):
            break
        length += 1
    return length


def dist_to_ray(g: ReducedWord, w: RaySpec) -> WalkNatural:
    """D(g, w): distance from g to the geodesic e, s_1, s_1 s_2, ..."""
    return len(g) - lcp_with_ray(g, w)


def parse_words(d: int, items: Sequence[str]) -> List[ReducedWord]:
    return [ReducedWord.parse(d, item) for item in items]
