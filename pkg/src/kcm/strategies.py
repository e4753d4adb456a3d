"""Choice strategies and coupled replay of shared draw ranks.

A strategy sees actual card values: the history of removed cards and the
``k`` offered cards (repeats allowed). Coupled replay feeds two strategies the
same relative draw ranks, each resolved against that strategy's own deck.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import kernels
from .core import DeckState, Permutation
from .sampler import ConfigError, DrawTrace


class ContractViolation(RuntimeError):
    """A strategy returned a card it was not offered."""


@dataclass(frozen=True)
class StrategyContext:
    n: int
    k: int
    history: tuple
    draws: tuple

    @property
    def t(self) -> int:
        return len(self.history) + 1


def strategy_min(ctx: StrategyContext) -> int:
    return min(ctx.draws)


def strategy_max(ctx: StrategyContext) -> int:
    return max(ctx.draws)


def strategy_uniform(ctx: StrategyContext) -> int:
    """Always the first draw; reproduces the k=1 (uniform) law for every k."""
    return ctx.draws[0]


def _check_copy_config(n: int, k: int) -> None:
    if n < 4 or k < 2:
        raise ConfigError(f"the copy strategy needs n >= 4 and k >= 2, got n={n}, k={k}")


def strategy_copy(ctx: StrategyContext) -> int:
    """Minimum rule, except take card n-1 over card 1 in one configuration.

    The exception: cards ``2, 3, ..., n-2`` were removed in that order and the
    offered cards are copies of ``1`` and ``n-1`` only, with both present.
    Picking ``n-1`` then guarantees the increasing run ``2, ..., n``.
    """
    n = ctx.n
    _check_copy_config(n, ctx.k)
    if ctx.t == n - 2 and ctx.history == tuple(range(2, n - 1)) and set(ctx.draws) == {1, n - 1}:
        return n - 1
    return min(ctx.draws)


# vectorised rank rules: (n, k) draw ranks -> chosen rank per step

def _ranks_min(draws: np.ndarray) -> np.ndarray:
    return draws.min(axis=1)


def _ranks_max(draws: np.ndarray) -> np.ndarray:
    return draws.max(axis=1)


def _ranks_uniform(draws: np.ndarray) -> np.ndarray:
    return draws[:, 0].copy()


def _ranks_copy(draws: np.ndarray) -> np.ndarray:
    n, k = draws.shape
    _check_copy_config(n, k)
    ranks = draws.min(axis=1)
    # removing 2, 3, ..., n-2 in turn means taking the 2nd-lowest card each time;
    # the deck at t = n-2 is then {1, n-1, n}, so cards {1, n-1} are ranks {1, 2}
    t = n - 3
    if np.all(ranks[:t] == 2) and set(draws[t].tolist()) == {1, 2}:
        ranks[t] = 2
    return ranks


@dataclass(frozen=True)
class ChoiceStrategy:
    """A named deterministic choice function.

    ``rank_rule``, when set, is an equivalent vectorised form over draw
    ranks; it is only valid for rules that depend on the draws through their
    relative order.
    """

    name: str
    choose: Callable[[StrategyContext], int]
    rank_rule: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __call__(self, ctx: StrategyContext) -> int:
        return self.choose(ctx)


STRATEGIES = {
    "min": ChoiceStrategy("min", strategy_min, _ranks_min),
    "copy": ChoiceStrategy("copy", strategy_copy, _ranks_copy),
    "uniform": ChoiceStrategy("uniform", strategy_uniform, _ranks_uniform),
    "max": ChoiceStrategy("max", strategy_max, _ranks_max),
}


def get_strategy(name) -> ChoiceStrategy:
    if isinstance(name, ChoiceStrategy):
        return name
    try:
        return STRATEGIES[name]
    except KeyError:
        raise ConfigError(f"unknown strategy {name!r}; expected one of {sorted(STRATEGIES)}") from None


def check_config(strategy: ChoiceStrategy, n: int, k: int) -> None:
    if strategy.choose is strategy_copy:
        _check_copy_config(n, k)


def replay(strategy, trace: DrawTrace, fast: bool = True) -> Permutation:
    """Run one strategy on a trace's draw ranks."""
    strategy = get_strategy(strategy)
    check_config(strategy, trace.n, trace.k)
    if fast and strategy.rank_rule is not None:
        rel = np.ascontiguousarray(strategy.rank_rule(trace.draws), dtype=np.int64)
        return Permutation._trusted(kernels.rel_to_perm(rel))
    deck = DeckState(trace.n)
    history: list[int] = []
    for t, row in enumerate(trace.draws.tolist(), start=1):
        offered = tuple(deck.card_at_rank(r) for r in row)
        card = strategy(StrategyContext(trace.n, trace.k, tuple(history), offered))
        if card not in offered:
            raise ContractViolation(
                f"strategy {strategy.name!r} returned card {card!r} at t={t}, not among offered {offered}"
            )
        deck.remove(card)
        history.append(card)
    return Permutation._trusted(np.array(history, dtype=np.int64))


def coupled_run(strat_a, strat_b, trace: DrawTrace, fast: bool = True) -> tuple[Permutation, Permutation]:
    """Replay the same draw ranks under two strategies."""
    return replay(strat_a, trace, fast), replay(strat_b, trace, fast)
