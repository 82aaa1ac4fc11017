"""Reduced words in a free group of fixed finite rank.

Letters are nonzero integers: ``i`` is the i-th generator and ``-i`` its
inverse. A word ``s_k ... s_1`` is stored left to right and acts on the
circle right to left, so ``s_1`` acts first.

Text form: generators are lowercase letters (``a``, ``b``, ``c``, ``d``,
``f``, ...; ``e`` is skipped because it denotes the identity), inverses are
uppercase, and the empty word is written ``e``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import total_ordering
import string
from typing import Iterable, Sequence

GENERATOR_NAMES = [ch for ch in string.ascii_lowercase if ch != "e"]
IDENTITY_TEXT = "e"


class AlphabetMismatch(ValueError):
    pass


class WordParseError(ValueError):
    def __init__(self, text: str, position: int, reason: str):
        self.text = text
        self.position = position
        super().__init__(f"cannot parse word {text!r} at position {position}: {reason}")


@dataclass(frozen=True)
class Alphabet:
    rank: int

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError("rank must be >= 1")
        if self.rank > len(GENERATOR_NAMES):
            raise ValueError(f"rank above {len(GENERATOR_NAMES)} has no text encoding")

    @property
    def letters(self) -> list[int]:
        """Signed letters in the fixed order a < A < b < B < ..."""
        out = []
        for i in range(1, self.rank + 1):
            out += [i, -i]
        return out

    def identity(self) -> "ReducedWord":
        return ReducedWord(self.rank, ())

    def generator(self, i: int) -> "ReducedWord":
        return ReducedWord(self.rank, (i,))


def letter_key(letter: int) -> int:
    return 2 * (abs(letter) - 1) + (0 if letter > 0 else 1)


def letter_name(letter: int) -> str:
    name = GENERATOR_NAMES[abs(letter) - 1]
    return name if letter > 0 else name.upper()


def reduce_letters(letters: Iterable[int]) -> tuple[int, ...]:
    stack: list[int] = []
    for x in letters:
        if stack and stack[-1] == -x:
            stack.pop()
        else:
            stack.append(x)
    return tuple(stack)


@total_ordering
@dataclass(frozen=True)
class ReducedWord:
    rank: int
    letters: tuple[int, ...]

    def __post_init__(self):
        for i, x in enumerate(self.letters):
            if x == 0 or abs(x) > self.rank:
                raise ValueError(f"letter {x} outside rank {self.rank}")
            if i and self.letters[i - 1] == -x:
                raise ValueError("word is not freely reduced")

    @classmethod
    def from_letters(cls, rank: int, letters: Iterable[int]) -> "ReducedWord":
        return cls(rank, reduce_letters(letters))

    @classmethod
    def parse(cls, text: str, rank: int) -> "ReducedWord":
        text = text.strip()
        if text == IDENTITY_TEXT or text == "":
            return cls(rank, ())
        letters = []
        for pos, ch in enumerate(text):
            low = ch.lower()
            if low not in GENERATOR_NAMES:
                raise WordParseError(text, pos, f"illegal character {ch!r}")
            i = GENERATOR_NAMES.index(low) + 1
            if i > rank:
                raise WordParseError(text, pos, f"letter {ch!r} beyond rank {rank}")
            letters.append(i if ch == low else -i)
        return cls.from_letters(rank, letters)

    def __str__(self) -> str:
        if not self.letters:
            return IDENTITY_TEXT
        return "".join(letter_name(x) for x in self.letters)

    def __repr__(self) -> str:
        return f"ReducedWord({self})"

    def __len__(self) -> int:
        return len(self.letters)

    def _check(self, other: "ReducedWord"):
        if not isinstance(other, ReducedWord) or other.rank != self.rank:
            raise AlphabetMismatch(f"cannot combine {self!r} with {other!r}")

    def __mul__(self, other: "ReducedWord") -> "ReducedWord":
        self._check(other)
        a, b = self.letters, other.letters
        i = 0
        while i < len(a) and i < len(b) and a[-1 - i] == -b[i]:
            i += 1
        return ReducedWord(self.rank, a[: len(a) - i] + b[i:])

    def __invert__(self) -> "ReducedWord":
        return ReducedWord(self.rank, tuple(-x for x in reversed(self.letters)))

    def __pow__(self, n: int) -> "ReducedWord":
        base = self if n >= 0 else ~self
        out = ReducedWord(self.rank, ())
        for _ in range(abs(n)):
            out = out * base
        return out

    def shortlex_key(self) -> tuple:
        return (len(self.letters), tuple(letter_key(x) for x in self.letters))

    def __lt__(self, other: "ReducedWord") -> bool:
        self._check(other)
        return self.shortlex_key() < other.shortlex_key()

    @property
    def first(self) -> int | None:
        return self.letters[0] if self.letters else None

    def tail(self) -> "ReducedWord":
        """The word with its leftmost (last-acting) letter removed."""
        return ReducedWord(self.rank, self.letters[1:])


def multiply(u: ReducedWord, v: ReducedWord) -> ReducedWord:
    return u * v


def invert(u: ReducedWord) -> ReducedWord:
    return ~u


def ball(alphabet: Alphabet | int, radius: int) -> list[ReducedWord]:
    """All reduced words of length <= radius in shortlex order."""
    rank = alphabet.rank if isinstance(alphabet, Alphabet) else alphabet
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    letters = Alphabet(rank).letters
    level: list[tuple[int, ...]] = [()]
    out = [ReducedWord(rank, ())]
    for _ in range(radius):
        nxt = []
        for w in level:
            for x in letters:
                if w and w[-1] == -x:
                    continue
                nxt.append(w + (x,))
        out.extend(ReducedWord(rank, w) for w in nxt)
        level = nxt
    return out


def ball_size(rank: int, radius: int) -> int:
    return 1 + sum(2 * rank * (2 * rank - 1) ** (i - 1) for i in range(1, radius + 1))


def commutator(u: ReducedWord, v: ReducedWord) -> ReducedWord:
    """[u, v] = v^-1 u^-1 v u; the rightmost factor u acts first."""
    return ~v * ~u * v * u


def commutator_product(alphabet: Alphabet | int) -> ReducedWord:
    """[a1, b1] ... [an, bn] for generators paired as (1, 2), (3, 4), ...

    With the rightmost letter acting first, ``[a, b] = b^-1 a^-1 b a``.
    """
    rank = alphabet.rank if isinstance(alphabet, Alphabet) else alphabet
    if rank % 2:
        raise ValueError("commutator product needs even rank")
    out: Sequence[int] = []
    for j in range(rank // 2):
        a, b = 2 * j + 1, 2 * j + 2
        out = list(out) + [-b, -a, b, a]
    return ReducedWord.from_letters(rank, out)
