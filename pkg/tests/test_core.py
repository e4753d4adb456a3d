import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kcm.core import (
    DeckState,
    OrderStatisticSet,
    Permutation,
    RelativeSeq,
    ValidationError,
    permutation_to_relative,
    relative_to_permutation,
)

from conftest import all_relative


@st.composite
def relative_seqs(draw, max_n=60):
    n = draw(st.integers(1, max_n))
    return [draw(st.integers(1, n - t)) for t in range(n)]


@st.composite
def permutations(draw, max_n=60):
    n = draw(st.integers(1, max_n))
    return draw(st.permutations(list(range(1, n + 1))))


@pytest.mark.parametrize(
    "rel, perm",
    [
        ((1, 1, 1, 1), (1, 2, 3, 4)),
        ((4, 3, 2, 1), (4, 3, 2, 1)),
        ((2, 1, 2, 1), (2, 1, 4, 3)),
    ],
)
def test_relative_examples(rel, perm):
    assert relative_to_permutation(rel).to_list() == list(perm)
    assert permutation_to_relative(perm).to_list() == list(rel)


@given(relative_seqs())
def test_relative_round_trip(rel):
    assert permutation_to_relative(relative_to_permutation(rel)).to_list() == rel


@given(permutations())
def test_permutation_round_trip(perm):
    assert relative_to_permutation(permutation_to_relative(perm)).to_list() == perm


def test_bijection_exhaustive_n5():
    seen = {tuple(relative_to_permutation(r).to_list()) for r in all_relative(5)}
    assert len(seen) == 120


@pytest.mark.parametrize(
    "cards, fragment",
    [([1, 1], "more than once"), ([0, 1], "index 1"), ([1, 3], "index 2"), ([], "non-empty")],
)
def test_permutation_validation(cards, fragment):
    with pytest.raises(ValidationError, match=fragment):
        Permutation(cards)


@pytest.mark.parametrize("rel", [[2, 2], [1, 0], [1, 3, 1], []])
def test_relative_validation(rel):
    with pytest.raises(ValidationError):
        RelativeSeq(rel)


def test_arrays_are_read_only():
    p = Permutation([2, 1, 3])
    with pytest.raises(ValueError):
        p.cards[0] = 5
    r = RelativeSeq([1, 1])
    with pytest.raises(ValueError):
        r.rel[0] = 2


@given(permutations())
def test_permutation_serialization(perm):
    p = Permutation(perm)
    assert json.loads(p.to_json()) == perm
    assert Permutation.from_json(p.to_json()) == p
    assert Permutation.from_text(p.to_text()) == p
    assert p.to_text() == " ".join(map(str, perm))


@given(relative_seqs())
def test_relative_serialization(rel):
    r = RelativeSeq(rel)
    assert RelativeSeq.from_json(r.to_json()) == r
    assert RelativeSeq.from_text(r.to_text()) == r


def test_identity_and_reversal():
    assert Permutation.identity(4).to_list() == [1, 2, 3, 4]
    assert Permutation.reversal(4).to_list() == [4, 3, 2, 1]
    assert Permutation([1]).n == 1


def test_order_statistic_set_matches_sorted_list():
    rng = np.random.default_rng(3)
    n = 200
    s = OrderStatisticSet(n)
    ref = list(range(1, n + 1))
    for card in rng.permutation(n)[:150] + 1:
        r = int(rng.integers(1, len(ref) + 1))
        assert s.select(r) == ref[r - 1]
        assert s.rank(int(card)) == ref.index(int(card)) + 1
        s.remove(int(card))
        ref.remove(int(card))
        assert int(card) not in s
        assert len(s) == len(ref)
    assert list(s) == ref


def test_deck_state():
    d = DeckState(4)
    assert d.card_at_rank(2) == 2
    d.remove(2)
    assert d.cards() == [1, 3, 4]
    assert d.rank_of(4) == 3
    assert d.size == 3
    with pytest.raises(KeyError):
        d.remove(2)
