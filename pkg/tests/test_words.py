import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from crooked.words import Letter, Word, count_reduced, cyclically_reduced_words, power, random_reduced_word, reduced_words, words_up_to

letter = st.builds(Letter, st.integers(1, 3), st.sampled_from([1, -1]))
raw_word = st.lists(letter, max_size=12)


def test_parse_and_print():
    w = Word.parse("[1+ 2-]")
    assert w.letters == (Letter(1, 1), Letter(2, -1))
    assert str(w) == "[1+ 2-]"
    assert str(Word()) == "[]"
    assert Word.of("1+", (2, "-")) == w
    with pytest.raises(ValueError):
        Word.parse("[1+ x]")


def test_rejects_unreduced():
    with pytest.raises(ValueError):
        Word.of("1+", "1-")


def test_letter_validation():
    with pytest.raises(ValueError):
        Letter(1, 0)
    with pytest.raises(ValueError):
        Letter(0, 1)


@pytest.mark.parametrize("length, count", [(0, 1), (1, 4), (2, 12), (3, 36), (4, 108)])
def test_counts(length, count):
    ws = list(reduced_words(2, length))
    assert len(ws) == count == count_reduced(2, length)
    assert len(set(ws)) == count


def test_lexicographic_order():
    ws = list(reduced_words(2, 2))
    assert ws == sorted(ws)
    assert [str(w) for w in ws[:3]] == ["[1+ 1+]", "[1+ 2+]", "[1+ 2-]"]


def test_cyclic_reduction_examples():
    w = Word.parse("[1+ 2+ 1-]")
    assert not w.is_cyclically_reduced()
    u, c = w.cyclic_reduction()
    assert str(u) == "[1+]" and str(c) == "[2+]"
    assert Word.parse("[1+ 2+ 1+]").is_cyclically_reduced()


@pytest.mark.parametrize("m, n", [(2, 2), (2, 3), (2, 4), (3, 3)])
def test_cyclically_reduced_count(m, n):
    # closed form for the free group of rank m
    expected = (2 * m - 1) ** n + 1 + (m - 1) * (1 + (-1) ** n)
    assert len(list(cyclically_reduced_words(m, n))) == expected


def test_power():
    assert str(power(Letter(1, 1), 3)) == "[1+ 1+ 1+]"
    assert str(power(Letter(1, 1), -2)) == "[1- 1-]"
    assert power(Letter(2, 1), 0).is_identity


@given(raw_word, raw_word)
def test_group_laws(a, b):
    x, y = Word.reduce(a), Word.reduce(b)
    assert (x * x.inverse()).is_identity
    assert (x * y).inverse() == y.inverse() * x.inverse()
    assert Word.reduce(a + b) == x * y


@given(raw_word)
def test_cyclic_reduction_splits(a):
    w = Word.reduce(a)
    u, c = w.cyclic_reduction()
    assert u * c * u.inverse() == w
    assert c.is_cyclically_reduced()


@given(st.integers(0, 10), st.integers(0, 2**32 - 1))
def test_random_word_is_reduced(n, seed):
    w = random_reduced_word(3, n, np.random.default_rng(seed))
    assert len(w) == n


def test_words_up_to():
    assert len(words_up_to(2, 2)) == 17
