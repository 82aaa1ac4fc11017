import pytest
from hypothesis import given, strategies as st

from circorder.freegroup import (
    Alphabet,
    AlphabetMismatch,
    ReducedWord,
    WordParseError,
    ball,
    ball_size,
    commutator,
    commutator_product,
)

from conftest import W


def words(rank=2, max_len=8):
    letters = st.sampled_from([s for i in range(1, rank + 1) for s in (i, -i)])
    return st.lists(letters, max_size=max_len).map(lambda ls: ReducedWord.from_letters(rank, ls))


def test_parse_and_print_round_trip():
    for text in ["e", "a", "A", "aBAb", "BAbaDCdc"]:
        rank = 4 if "d" in text.lower() else 2
        assert str(W(text, rank)) == text


def test_parse_reduces_and_rejects_foreign_letters():
    assert str(W("aAb")) == "b"
    with pytest.raises(WordParseError) as err:
        W("ac")
    assert err.value.position == 1
    with pytest.raises(WordParseError):
        W("a1")


def test_identity_letter_is_skipped_in_generator_names():
    assert Alphabet(5).letters[8:] == [5, -5]
    assert str(ReducedWord(5, (5,))) == "f"


def test_multiplication_cancels():
    assert W("aB") * W("ba") == W("aa")
    assert W("ab") * ~W("ab") == W("e")


def test_ranks_must_match():
    with pytest.raises(AlphabetMismatch):
        W("a") * W("a", 3)


def test_commutator_convention():
    # [a, b] = b^-1 a^-1 b a, rightmost letter acting first
    assert str(commutator(W("a"), W("b"))) == "BAba"
    assert str(commutator_product(4)) == "BAbaDCdc"


@pytest.mark.parametrize("rank,sizes", [(1, [1, 3, 5, 7]), (2, [1, 5, 17, 53]), (4, [1, 9, 65, 457])])
def test_ball_sizes(rank, sizes):
    for r, n in enumerate(sizes):
        assert ball_size(rank, r) == n
        assert len(ball(rank, r)) == n


def test_ball_is_shortlex_sorted():
    b = ball(2, 2)
    assert [str(w) for w in b[:5]] == ["e", "a", "A", "b", "B"]
    assert [str(w) for w in b[5:8]] == ["aa", "ab", "aB"]
    assert b == sorted(b)


@given(words(), words(), words())
def test_associativity(u, v, w):
    assert (u * v) * w == u * (v * w)


@given(words())
def test_inverse(u):
    assert u * ~u == Alphabet(2).identity()
    assert ~~u == u


@given(words(), words())
def test_shortlex_total(u, v):
    assert (u < v) + (v < u) + (u == v) == 1


@given(words(), st.integers(-3, 3))
def test_powers(u, n):
    p = u**n
    if n >= 0:
        acc = Alphabet(2).identity()
        for _ in range(n):
            acc = acc * u
        assert p == acc
    else:
        assert p == ~(u ** (-n))
