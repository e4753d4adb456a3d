"""Order statistics of permutations and exact inversion moments under kCM.

``I`` is the inversion count (equivalently the adjacent-transposition
distance to the identity) and ``L`` the longest increasing subsequence length
(``n`` minus the reinsertion distance to the identity).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import kernels
from .core import Permutation, RelativeSeq, ValidationError


def _perm(perm) -> Permutation:
    return perm if isinstance(perm, Permutation) else Permutation(perm)


def count_inversions(perm: Permutation | Sequence[int]) -> int:
    """Number of pairs ``i < j`` with ``perm[i] > perm[j]``, O(n log n)."""
    return int(kernels.count_inversions(_perm(perm).cards))


# I(sigma) equals the adjacent-transposition distance d_AT(sigma, id)
adjacent_transposition_distance = count_inversions


def inversion_profile(perm: Permutation | Sequence[int]) -> np.ndarray:
    """``I_t`` for t = 1..n-1: later cards smaller than the card removed at t."""
    return kernels.inversion_profile(_perm(perm).cards)[:-1]


def lis_length(perm: Permutation | Sequence[int]) -> int:
    """Longest strictly increasing subsequence length (patience sorting)."""
    return int(kernels.lis_length(_perm(perm).cards))


def reinsertion_distance(perm: Permutation | Sequence[int]) -> int:
    """Fewest single reinsertions turning ``perm`` into the identity: n - L."""
    p = _perm(perm)
    return p.n - lis_length(p)


@dataclass(frozen=True)
class AsymptoticConstants:
    k: int
    a_k: Fraction
    b_k: Fraction


def asymptotic_constants(k: int) -> AsymptoticConstants:
    """Fixed-k coefficients: E(I) ~ a_k n^2 and Var(I) ~ b_k n^3."""
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    return AsymptoticConstants(
        k=k,
        a_k=Fraction(1, 2 * (k + 1)),
        b_k=Fraction(k, 3 * (k + 1) ** 2 * (k + 2)),
    )


def growing_k_leading_terms(n: int, k: int) -> tuple[float, float]:
    """Leading growing-k terms ``(n^2 / 2k, n^3 / 3k^2)`` of E(I) and Var(I)."""
    return n * n / (2.0 * k), n**3 / (3.0 * k * k)


def exact_step_moments(n: int, k: int, t: int) -> tuple[float, float]:
    """Exact ``(E(I_t), Var(I_t))`` by direct summation of the tail law."""
    if not 1 <= t <= n:
        raise ValidationError(f"t must lie in 1..{n}, got {t}")
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    mean, second = kernels.deck_moments(n - t + 1, k)
    return mean, max(second - mean * mean, 0.0)


def exact_total_moments(n: int, k: int) -> tuple[float, float]:
    """Exact ``(E(I), Var(I))``; the I_t are independent so moments add."""
    if n < 1 or k < 1:
        raise ValidationError(f"need n >= 1 and k >= 1, got n={n}, k={k}")
    return kernels.total_moments(n, k)


def exact_step_moments_rational(n: int, k: int, t: int) -> tuple[Fraction, Fraction]:
    """Rational twin of :func:`exact_step_moments` for small decks."""
    m = n - t + 1
    if m <= 1:
        return Fraction(0), Fraction(0)
    denom = m**k
    e1 = Fraction(sum(tau**k for tau in range(1, m)), denom)
    e2 = Fraction(sum((m - 1 - tau) * tau**k for tau in range(1, m)), denom)
    return e1, e1 + 2 * e2 - e1 * e1


def target_size(n: int, k: int) -> int:
    """``ceil(sqrt(n / k))`` in exact integer arithmetic."""
    s = math.isqrt(n // k) if n >= k else 0
    while s * s * k < n:
        s += 1
    return max(s, 1)


@dataclass(frozen=True, eq=False)
class GreedyConstructionRecord:
    """Outcome of the greedy increasing-subsequence construction.

    ``stops[m-1]`` is the time of the m-th pick, ``picked_cards[m-1]`` the card
    taken, ``a[m-1]`` its rank within the m-th target set and ``b[m-1]`` the
    number of cards above the previous pick removed in between.
    """

    target_size: int
    stops: np.ndarray
    picked_cards: np.ndarray
    a: np.ndarray
    b: np.ndarray

    @property
    def M(self) -> int:
        return int(self.stops.size)


def greedy_lower_bound(perm: Permutation | Sequence[int], k: int) -> GreedyConstructionRecord:
    """Replay the target-set construction on a realised permutation.

    Target sets hold the ``ceil(sqrt(n/k))`` lowest remaining cards above the
    last pick; each stop is the first later time such a card is removed. The
    picks form an increasing subsequence, so ``M <= L``. The construction only
    looks at the removal order, so it is a function of the permutation alone.
    """
    p = _perm(perm)
    s = target_size(p.n, k)
    stops, picked, a, b = kernels.greedy_walk(p.cards, s)
    return GreedyConstructionRecord(s, stops, picked, a, b)


def perturb_relative(rel: RelativeSeq | Sequence[int], t: int, new_rank: int) -> RelativeSeq:
    """Copy of ``rel`` with coordinate ``t`` (1-based) set to ``new_rank``."""
    if not isinstance(rel, RelativeSeq):
        rel = RelativeSeq(rel)
    n = rel.n
    if not 1 <= t <= n:
        raise ValidationError(f"t must lie in 1..{n}, got {t}")
    if not 1 <= new_rank <= n - t + 1:
        raise ValidationError(f"rank {new_rank} at index {t} is outside 1..{n - t + 1}")
    arr = rel.rel.copy()
    arr[t - 1] = new_rank
    return RelativeSeq._trusted(arr)
