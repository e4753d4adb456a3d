"""Exact ground truth at small scale.

* the law of ``I`` as the convolution of the independent per-step laws,
* exhaustive enumeration of the kCM process under any strategy,
* the exact mean of ``L`` under the minimum rule, two independent ways.
"""
from __future__ import annotations

import itertools
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import signal

from .core import Permutation
from .strategies import ChoiceStrategy, ContractViolation, StrategyContext, check_config, get_strategy

PMF_MAX_N = 2000
EXACT_PMF_MAX_N = 80
ENUM_MAX_LEAVES = 2_000_000
EXACT_EL_MAX_N = 9
# direct convolution up to this many multiply-adds; FFT rounding is visible in the variance below it
_DIRECT_CONV_WORK = 1 << 29


class SizeError(ValueError):
    """The requested exact computation is beyond its size guard."""


class OracleMismatch(AssertionError):
    """Two exact routes disagreed."""


@dataclass(frozen=True, eq=False)
class ExactPmf:
    """Probability vector over ``support_offset, support_offset + 1, ...``.

    ``probs`` is a float array, or a tuple of Fractions when exact.
    """

    support_offset: int
    probs: object

    @property
    def exact(self) -> bool:
        return isinstance(self.probs, tuple)

    def __len__(self) -> int:
        return len(self.probs)

    def support(self) -> np.ndarray:
        return np.arange(self.support_offset, self.support_offset + len(self.probs))

    def as_dict(self) -> dict:
        return {self.support_offset + i: p for i, p in enumerate(self.probs) if p}

    def mean(self):
        if self.exact:
            return sum((self.support_offset + i) * p for i, p in enumerate(self.probs))
        return math.fsum(self.support() * self.probs)

    def variance(self):
        mu = self.mean()
        if self.exact:
            return sum((self.support_offset + i - mu) ** 2 * p for i, p in enumerate(self.probs))
        return math.fsum((self.support() - mu) ** 2 * self.probs)

    def cdf(self) -> np.ndarray:
        return np.cumsum(np.asarray(self.probs, dtype=np.float64))

    def to_json(self) -> str:
        if self.exact:
            probs = [[p.numerator, p.denominator] for p in self.probs]
            return json.dumps({"offset": self.support_offset, "exact": True, "probs": probs})
        return json.dumps({"offset": self.support_offset, "probs": np.asarray(self.probs).tolist()})

    @classmethod
    def from_json(cls, text: str) -> "ExactPmf":
        obj = json.loads(text)
        if obj.get("exact"):
            return cls(obj["offset"], tuple(Fraction(a, b) for a, b in obj["probs"]))
        return cls(obj["offset"], np.array(obj["probs"], dtype=np.float64))


def step_pmf_numerators(m: int, k: int) -> list[int]:
    """Numerators over ``m**k`` of P(I_t = j), j = 0..m-1, for an m-card deck."""
    return [(m - j) ** k - (m - 1 - j) ** k for j in range(m)]


def step_pmf(m: int, k: int) -> np.ndarray:
    j = np.arange(m, dtype=np.float64)
    return ((m - j) / m) ** k - ((m - 1 - j) / m) ** k


def _poly_mul(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.size * b.size <= _DIRECT_CONV_WORK:
        return np.convolve(a, b)
    out = signal.fftconvolve(a, b)
    np.clip(out, 0.0, None, out=out)
    return out


def _tree_reduce(items, mul):
    items = list(items)
    while len(items) > 1:
        nxt = [mul(items[i], items[i + 1]) for i in range(0, len(items) - 1, 2)]
        if len(items) % 2:
            nxt.append(items[-1])
        items = nxt
    return items[0]


def exact_pmf_I(n: int, k: int, exact: bool = False) -> ExactPmf:
    """Law of the inversion count under the minimum rule.

    ``exact=True`` returns Fractions (integer polynomial products); otherwise
    float convolution, FFT-based once the supports get large.
    """
    if n < 1 or k < 1:
        raise ValueError(f"need n >= 1 and k >= 1, got n={n}, k={k}")
    if n > PMF_MAX_N:
        raise SizeError(f"exact_pmf_I supports n <= {PMF_MAX_N}, got {n}")
    if n == 1:
        return ExactPmf(0, (Fraction(1),) if exact else np.ones(1))
    if exact:
        if n > EXACT_PMF_MAX_N:
            raise SizeError(f"rational pmf supports n <= {EXACT_PMF_MAX_N}, got {n}")
        num = _tree_reduce((step_pmf_numerators(m, k) for m in range(2, n + 1)), _poly_mul)
        den = math.factorial(n) ** k
        return ExactPmf(0, tuple(Fraction(x, den) for x in num))
    probs = _tree_reduce((step_pmf(m, k) for m in range(2, n + 1)), _convolve)
    probs = probs / math.fsum(probs)
    return ExactPmf(0, probs)


# ---------------------------------------------------------------------------
# exhaustive enumeration
# ---------------------------------------------------------------------------

def _inversions_small(perm) -> int:
    return sum(1 for i in range(len(perm)) for j in range(i + 1, len(perm)) if perm[i] > perm[j])


def _lis_small(perm) -> int:
    tails: list[int] = []
    for x in perm:
        lo, hi = 0, len(tails)
        while lo < hi:
            mid = (lo + hi) // 2
            if tails[mid] < x:
                lo = mid + 1
            else:
                hi = mid
        if lo == len(tails):
            tails.append(x)
        else:
            tails[lo] = x
    return len(tails)


@dataclass(frozen=True)
class EnumerationResult:
    """Exact law of ``(I, L)`` plus the full permutation law."""

    n: int
    k: int
    strategy: str
    joint: dict
    perm_law: dict = field(repr=False)

    def marginal_I(self) -> dict:
        out: dict = {}
        for (i, _), p in self.joint.items():
            out[i] = out.get(i, 0) + p
        return dict(sorted(out.items()))

    def marginal_L(self) -> dict:
        out: dict = {}
        for (_, l), p in self.joint.items():
            out[l] = out.get(l, 0) + p
        return dict(sorted(out.items()))

    @staticmethod
    def _moments(marg: dict) -> tuple[Fraction, Fraction]:
        mean = sum(x * p for x, p in marg.items())
        return mean, sum((x - mean) ** 2 * p for x, p in marg.items())

    def moments_I(self) -> tuple[Fraction, Fraction]:
        return self._moments(self.marginal_I())

    def moments_L(self) -> tuple[Fraction, Fraction]:
        return self._moments(self.marginal_L())

    def tail_L(self, x: int) -> Fraction:
        """P(L >= x)."""
        return sum((p for l, p in self.marginal_L().items() if l >= x), Fraction(0))

    def cdf_I(self, x: int) -> Fraction:
        """P(I <= x)."""
        return sum((p for i, p in self.marginal_I().items() if i <= x), Fraction(0))

    def to_json(self) -> str:
        rows = [[i, l, p.numerator, p.denominator] for (i, l), p in sorted(self.joint.items())]
        return json.dumps({"n": self.n, "k": self.k, "strategy": self.strategy, "joint": rows})


def _walk(n, k, strategy, history, deck, weight, joint, perm_law):
    if not deck:
        perm = tuple(history)
        key = (_inversions_small(perm), _lis_small(perm))
        joint[key] = joint.get(key, 0) + weight
        perm_law[perm] = perm_law.get(perm, 0) + weight
        return
    hist = tuple(history)
    counts: dict = {}
    for draws in itertools.product(deck, repeat=k):
        card = strategy(StrategyContext(n, k, hist, draws))
        if card not in draws:
            raise ContractViolation(
                f"strategy {strategy.name!r} returned card {card!r} at t={len(hist) + 1}, not among offered {draws}"
            )
        counts[card] = counts.get(card, 0) + 1
    for card in sorted(counts):
        history.append(card)
        rest = [c for c in deck if c != card]
        _walk(n, k, strategy, history, rest, weight * counts[card], joint, perm_law)
        history.pop()


def _walk_subtree(args):
    n, k, strategy, first, count = args
    joint: dict = {}
    perm_law: dict = {}
    _walk(n, k, strategy, [first], [c for c in range(1, n + 1) if c != first], count, joint, perm_law)
    return joint, perm_law


def _merge(into: dict, part: dict) -> None:
    for key, w in part.items():
        into[key] = into.get(key, 0) + w


def enumerate_strategy(n: int, k: int, strategy, workers: int = 1) -> EnumerationResult:
    """Exact law of ``(I, L)`` over every ordered draw tuple at every step.

    At step t each of the ``(n-t+1)**k`` ordered tuples is equally likely.
    Work is split over the first-step choices when ``workers > 1``; partial
    laws are merged by exact integer addition, so the output does not depend on
    the worker count. For the minimum rule the I-marginal is also checked
    against :func:`exact_pmf_I`.
    """
    strategy: ChoiceStrategy = get_strategy(strategy)
    check_config(strategy, n, k)
    if n < 1 or k < 1:
        raise ValueError(f"need n >= 1 and k >= 1, got n={n}, k={k}")
    if math.factorial(n) ** k > ENUM_MAX_LEAVES:
        raise SizeError(f"(n!)^k = {math.factorial(n) ** k} draw paths exceeds {ENUM_MAX_LEAVES}")
    deck = list(range(1, n + 1))
    first_counts: dict = {}
    for draws in itertools.product(deck, repeat=k):
        card = strategy(StrategyContext(n, k, (), draws))
        if card not in draws:
            raise ContractViolation(
                f"strategy {strategy.name!r} returned card {card!r} at t=1, not among offered {draws}"
            )
        first_counts[card] = first_counts.get(card, 0) + 1
    jobs = [(n, k, strategy, card, first_counts[card]) for card in sorted(first_counts)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_walk_subtree, jobs))
    else:
        parts = [_walk_subtree(job) for job in jobs]
    joint_w: dict = {}
    perm_w: dict = {}
    for j, p in parts:
        _merge(joint_w, j)
        _merge(perm_w, p)
    den = math.factorial(n) ** k
    joint = {key: Fraction(w, den) for key, w in sorted(joint_w.items())}
    perm_law = {key: Fraction(w, den) for key, w in sorted(perm_w.items())}
    result = EnumerationResult(n, k, strategy.name, joint, perm_law)
    if sum(joint.values()) != 1:
        raise OracleMismatch("enumerated probabilities do not sum to 1")
    if strategy.name == "min" and n <= EXACT_PMF_MAX_N:
        pmf = exact_pmf_I(n, k, exact=True).as_dict()
        if result.marginal_I() != pmf:
            raise OracleMismatch(f"enumerated I-law disagrees with the convolution law at n={n}, k={k}")
    return result


def relative_weights(m: int, k: int) -> list[int]:
    """Numerators over ``m**k`` of P(rank = j), j = 1..m, for an m-card deck."""
    return [(m - j + 1) ** k - (m - j) ** k for j in range(1, m + 1)]


def exact_E_L(n: int, k: int, method: str = "relative") -> Fraction:
    """Exact E(L) under the minimum rule.

    ``"relative"`` walks all n! relative sequences weighted by the product of
    their independent rank probabilities; ``"enumerate"`` reads it off
    :func:`enumerate_strategy`.
    """
    if n < 1 or k < 1:
        raise ValueError(f"need n >= 1 and k >= 1, got n={n}, k={k}")
    if n > EXACT_EL_MAX_N:
        raise SizeError(f"exact_E_L supports n <= {EXACT_EL_MAX_N}, got {n}")
    if method == "enumerate":
        return enumerate_strategy(n, k, "min").moments_L()[0]
    if method != "relative":
        raise ValueError(f"unknown method {method!r}")
    weights = [relative_weights(n - t, k) for t in range(n)]
    total = 0

    def rec(t, deck, tails, w):
        nonlocal total
        if t == n:
            total += w * len(tails)
            return
        for j, wj in enumerate(weights[t]):
            if not wj:
                continue
            card = deck[j]
            lo, hi = 0, len(tails)
            while lo < hi:
                mid = (lo + hi) // 2
                if tails[mid] < card:
                    lo = mid + 1
                else:
                    hi = mid
            nt = tails.copy()
            if lo == len(nt):
                nt.append(card)
            else:
                nt[lo] = card
            rec(t + 1, deck[:j] + deck[j + 1:], nt, w * wj)

    rec(0, list(range(1, n + 1)), [], 1)
    return Fraction(total, math.factorial(n) ** k)


def uniform_law_check(result: EnumerationResult) -> bool:
    """True when every permutation of ``result.n`` has probability 1/n!."""
    target = Fraction(1, math.factorial(result.n))
    return len(result.perm_law) == math.factorial(result.n) and all(
        p == target for p in result.perm_law.values()
    )


def permutation_probability(result: EnumerationResult, perm) -> Fraction:
    key = tuple(Permutation(perm).to_list())
    return result.perm_law.get(key, Fraction(0))
