"""Permutations, relative-position sequences and the bijection between them.

Everything public is 1-based: ``cards[t-1]`` is the card removed at time
``t`` and ``rel[t-1]`` is its rank among the cards still in the deck.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from ._pykernels import _PresenceTree


class ValidationError(ValueError):
    """An input violates a type invariant."""


def _as_int_array(values, what: str) -> np.ndarray:
    arr = np.array(values, dtype=np.int64, copy=True)
    if arr.ndim != 1:
        raise ValidationError(f"{what} must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise ValidationError(f"{what} must be non-empty (n >= 1)")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Permutation:
    """Card-removal order ``(C_1, ..., C_n)``; a bijection on ``{1..n}``."""

    cards: np.ndarray

    def __init__(self, cards: Iterable[int]):
        arr = _as_int_array(list(cards) if not isinstance(cards, np.ndarray) else cards, "permutation")
        n = arr.size
        bad = np.flatnonzero((arr < 1) | (arr > n))
        if bad.size:
            i = int(bad[0])
            raise ValidationError(f"card {int(arr[i])} at index {i + 1} is outside 1..{n}")
        order = np.argsort(arr, kind="stable")
        dup = np.flatnonzero(arr[order][1:] == arr[order][:-1])
        if dup.size:
            i = int(order[dup[0] + 1])
            raise ValidationError(f"card {int(arr[i])} at index {i + 1} appears more than once")
        object.__setattr__(self, "cards", arr)

    @classmethod
    def _trusted(cls, arr: np.ndarray) -> "Permutation":
        obj = object.__new__(cls)
        arr = np.ascontiguousarray(arr, dtype=np.int64)
        arr.setflags(write=False)
        object.__setattr__(obj, "cards", arr)
        return obj

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls._trusted(np.arange(1, n + 1, dtype=np.int64))

    @classmethod
    def reversal(cls, n: int) -> "Permutation":
        return cls._trusted(np.arange(n, 0, -1, dtype=np.int64))

    @property
    def n(self) -> int:
        return int(self.cards.size)

    def __len__(self) -> int:
        return self.n

    def __iter__(self):
        return iter(self.cards.tolist())

    def __getitem__(self, t):
        return self.cards[t]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Permutation):
            return NotImplemented
        return np.array_equal(self.cards, other.cards)

    def __hash__(self) -> int:
        return hash(self.cards.tobytes())

    def __repr__(self) -> str:
        return f"Permutation({self.cards.tolist()})"

    def to_list(self) -> list[int]:
        return self.cards.tolist()

    def to_json(self) -> str:
        return json.dumps(self.to_list())

    @classmethod
    def from_json(cls, text: str) -> "Permutation":
        return cls(json.loads(text))

    def to_text(self) -> str:
        return " ".join(map(str, self.cards.tolist()))

    @classmethod
    def from_text(cls, line: str) -> "Permutation":
        try:
            values = [int(tok) for tok in line.split()]
        except ValueError as exc:
            raise ValidationError(f"not a list of integers: {line.strip()!r}") from exc
        return cls(values)


@dataclass(frozen=True, eq=False)
class RelativeSeq:
    """Relative positions ``(C~_1, ..., C~_n)`` with ``1 <= rel[t] <= n - t + 1``."""

    rel: np.ndarray

    def __init__(self, rel: Iterable[int]):
        arr = _as_int_array(list(rel) if not isinstance(rel, np.ndarray) else rel, "relative sequence")
        bound = np.arange(arr.size, 0, -1, dtype=np.int64)
        bad = np.flatnonzero((arr < 1) | (arr > bound))
        if bad.size:
            i = int(bad[0])
            raise ValidationError(
                f"rank {int(arr[i])} at index {i + 1} is outside 1..{int(bound[i])}"
            )
        object.__setattr__(self, "rel", arr)

    @classmethod
    def _trusted(cls, arr: np.ndarray) -> "RelativeSeq":
        obj = object.__new__(cls)
        arr = np.ascontiguousarray(arr, dtype=np.int64)
        arr.setflags(write=False)
        object.__setattr__(obj, "rel", arr)
        return obj

    @property
    def n(self) -> int:
        return int(self.rel.size)

    def __len__(self) -> int:
        return self.n

    def __iter__(self):
        return iter(self.rel.tolist())

    def __getitem__(self, t):
        return self.rel[t]

    def __eq__(self, other) -> bool:
        if not isinstance(other, RelativeSeq):
            return NotImplemented
        return np.array_equal(self.rel, other.rel)

    def __hash__(self) -> int:
        return hash(self.rel.tobytes())

    def __repr__(self) -> str:
        return f"RelativeSeq({self.rel.tolist()})"

    def to_list(self) -> list[int]:
        return self.rel.tolist()

    def to_json(self) -> str:
        return json.dumps(self.to_list())

    @classmethod
    def from_json(cls, text: str) -> "RelativeSeq":
        return cls(json.loads(text))

    def to_text(self) -> str:
        return " ".join(map(str, self.rel.tolist()))

    @classmethod
    def from_text(cls, line: str) -> "RelativeSeq":
        return cls(int(tok) for tok in line.split())


class OrderStatisticSet:
    """Subset of ``{1..n}`` with O(log n) select-by-rank, rank and removal.

    Starts full. Ranks are 1-based.
    """

    def __init__(self, n: int):
        self._bit = _PresenceTree(n)
        self._size = n

    def __len__(self) -> int:
        return self._size

    def __contains__(self, card: int) -> bool:
        return 1 <= card <= self._bit.n and self._bit.prefix(card) - self._bit.prefix(card - 1) == 1

    def select(self, rank: int) -> int:
        if not 1 <= rank <= self._size:
            raise IndexError(f"rank {rank} outside 1..{self._size}")
        return self._bit.select(rank)

    def rank(self, card: int) -> int:
        """Number of members <= card."""
        return self._bit.prefix(card)

    def remove(self, card: int) -> None:
        if card not in self:
            raise KeyError(card)
        self._bit.add(card, -1)
        self._size -= 1

    def __iter__(self):
        return (self._bit.select(r) for r in range(1, self._size + 1))


@dataclass
class DeckState:
    """The deck ``D_t`` remaining at time ``t`` (1-based)."""

    n: int
    t: int = 1
    remaining: OrderStatisticSet = field(init=False, repr=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError("deck size must be >= 1")
        self.remaining = OrderStatisticSet(self.n)
        self.t = 1

    @property
    def size(self) -> int:
        return len(self.remaining)

    def card_at_rank(self, rank: int) -> int:
        return self.remaining.select(rank)

    def rank_of(self, card: int) -> int:
        return self.remaining.rank(card)

    def remove(self, card: int) -> None:
        self.remaining.remove(card)
        self.t += 1

    def cards(self) -> list[int]:
        return list(self.remaining)


def relative_to_permutation(rel: RelativeSeq | Sequence[int]) -> Permutation:
    """Turn relative ranks into the card-removal order, O(n log n).

    >>> relative_to_permutation(RelativeSeq([2, 1, 2, 1]))
    Permutation([2, 1, 4, 3])
    """
    if not isinstance(rel, RelativeSeq):
        rel = RelativeSeq(rel)
    return Permutation._trusted(kernels.rel_to_perm(rel.rel))


def permutation_to_relative(perm: Permutation | Sequence[int]) -> RelativeSeq:
    """Inverse of :func:`relative_to_permutation`."""
    if not isinstance(perm, Permutation):
        perm = Permutation(perm)
    return RelativeSeq._trusted(kernels.perm_to_rel(perm.cards))
