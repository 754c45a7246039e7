import pytest
from hypothesis import given
from hypothesis import strategies as st

from treestretch.errors import BadWord, ParseError
from treestretch.words import (
    ball,
    canonical_cyclic,
    check_rank,
    conjugate,
    cyclic_reduce,
    format_word,
    inverse,
    is_cyclically_reduced,
    multiply,
    parse_word,
    power,
    reduce_word,
    substitute,
)

letters = st.sampled_from([1, -1, 2, -2, 3, -3])
words = st.lists(letters, max_size=12).map(tuple)


def test_reduce_and_multiply():
    assert reduce_word((1, 2, -2, -1, 3)) == (3,)
    assert multiply((1, 2), (-2, 1)) == (1, 1)
    assert power((1, 2), -2) == (-2, -1, -2, -1)
    assert conjugate((2,), (1,)) == (1, 2, -1)


@given(words, words)
def test_group_laws(u, v):
    assert multiply(u, inverse(u)) == ()
    assert inverse(multiply(u, v)) == multiply(inverse(v), inverse(u))
    assert reduce_word(reduce_word(u)) == reduce_word(u)


@given(words, words)
def test_canonical_cyclic_is_class_invariant(w, u):
    c = canonical_cyclic(w)
    assert canonical_cyclic(conjugate(w, u)) == c
    assert canonical_cyclic(inverse(w)) == c
    assert is_cyclically_reduced(c)
    assert len(c) == len(cyclic_reduce(w))


def test_ball_examples():
    assert sorted(ball(2, 1)) == sorted([(1,), (-1,), (2,), (-2,)])
    assert len(list(ball(2, 2))) == 16
    assert sorted(ball(1, 3)) == sorted([(1,), (-1,), (1, 1), (-1, -1), (1, 1, 1), (-1, -1, -1)])
    with pytest.raises(ValueError):
        list(ball(0, 2))


@pytest.mark.parametrize("rank,length", [(1, 5), (2, 6), (3, 4)])
def test_ball_conjugacy_classes_complete(rank, length):
    # brute force: canonical forms of every reduced word, cyclically reduced lengths <= length
    expected = {canonical_cyclic(w) for w in ball(rank, length)} - {()}
    expected = {c for c in expected if len(c) <= length}
    got = list(ball(rank, length, conjugacy=True))
    assert len(got) == len(set(got))
    assert set(got) == expected
    assert all(canonical_cyclic(w) == w for w in got)


def test_parse_and_format():
    labels = ("a", "b")
    assert parse_word("a b A", labels) == (1, 2, -1)
    assert parse_word("abA", labels) == (1, 2, -1)
    assert parse_word("1", labels) == ()
    assert parse_word("x1 x2^-1 x2^3", ("x1", "x2")) == (1, 2, 2)
    assert format_word((1, -2), labels) == "a B"
    assert format_word((), labels) == "1"
    assert format_word((2, -1), ("x1", "x2")) == "x2 x1^-1"
    with pytest.raises(BadWord):
        parse_word("a c", labels)
    with pytest.raises(ParseError):
        parse_word("a ^2", labels)


@given(words)
def test_parse_format_round_trip(w):
    w = reduce_word(w)
    assert parse_word(format_word(w)) == w


def test_check_rank_and_substitute():
    with pytest.raises(BadWord):
        check_rank((1, 3), 2)
    with pytest.raises(BadWord):
        check_rank((0,), 2)
    assert substitute((1, -2), [(1, 2), (2,)]) == (1,)
