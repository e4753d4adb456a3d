"""Pure-Python kernels, the fallback for ``kcm._ckernels``.

Same names, same signatures, same outputs. Inputs are 1-based int64 arrays
that the caller has already validated.
"""
import math
from bisect import bisect_left

import numpy as np


class _PresenceTree:
    """Binary-indexed tree over presence flags of cards 1..n (all present at start)."""

    __slots__ = ("n", "tree", "top")

    def __init__(self, n, full=True):
        self.n = n
        self.tree = [i & -i for i in range(n + 1)] if full else [0] * (n + 1)
        self.tree[0] = 0
        top = 1
        while top * 2 <= n:
            top *= 2
        self.top = top

    def add(self, i, delta):
        tree, n = self.tree, self.n
        while i <= n:
            tree[i] += delta
            i += i & -i

    def prefix(self, i):
        tree = self.tree
        s = 0
        while i > 0:
            s += tree[i]
            i -= i & -i
        return s

    def select(self, rank):
        tree, n = self.tree, self.n
        pos = 0
        step = self.top
        while step:
            nxt = pos + step
            if nxt <= n and tree[nxt] < rank:
                pos = nxt
                rank -= tree[nxt]
            step >>= 1
        return pos + 1


def rel_to_perm(rel):
    n = len(rel)
    bit = _PresenceTree(n)
    out = []
    for r in rel.tolist():
        card = bit.select(r)
        bit.add(card, -1)
        out.append(card)
    return np.array(out, dtype=np.int64)


def rel_to_perm_rows(rels):
    if rels.shape[0] == 0:
        return np.empty_like(rels)
    return np.stack([rel_to_perm(row) for row in rels])


def perm_to_rel(perm):
    bit = _PresenceTree(len(perm))
    out = []
    for card in perm.tolist():
        out.append(bit.prefix(card))
        bit.add(card, -1)
    return np.array(out, dtype=np.int64)


def count_inversions(perm):
    bit = _PresenceTree(len(perm), full=False)
    total = 0
    for t, card in enumerate(perm.tolist()):
        total += t - bit.prefix(card)
        bit.add(card, 1)
    return total


def inversion_profile(perm):
    n = len(perm)
    bit = _PresenceTree(n, full=False)
    prof = [0] * n
    cards = perm.tolist()
    for t in range(n - 1, -1, -1):
        prof[t] = bit.prefix(cards[t] - 1)
        bit.add(cards[t], 1)
    return np.array(prof, dtype=np.int64)


def lis_length(perm):
    tails = []
    for x in perm.tolist():
        i = bisect_left(tails, x)
        if i == len(tails):
            tails.append(x)
        else:
            tails[i] = x
    return len(tails)


def greedy_walk(perm, target):
    n = len(perm)
    if n == 0:
        return (np.empty(0, np.int64),) * 4
    cards = perm.tolist()
    bit = _PresenceTree(n)
    stops, picked, a_out, b_out = [], [], [], []
    c, t, remaining = 0, 0, n
    while True:
        r0 = bit.prefix(c)
        upper = bit.select(min(r0 + target, remaining))
        b = 0
        while True:
            card = cards[t]
            t += 1
            if c < card <= upper:
                a_out.append(bit.prefix(card) - r0)
                bit.add(card, -1)
                remaining -= 1
                break
            if card > c:
                b += 1
            bit.add(card, -1)
            remaining -= 1
        stops.append(t)
        picked.append(card)
        b_out.append(b)
        c = card
        if remaining - bit.prefix(c) < target:
            break
    return tuple(np.array(v, dtype=np.int64) for v in (stops, picked, a_out, b_out))


def deck_moments(m, k):
    if m <= 1:
        return 0.0, 0.0
    tau = np.arange(1, m, dtype=np.float64)
    p = (tau / m) ** k
    e1 = math.fsum(p)
    e2 = math.fsum((m - 1 - tau) * p)
    return e1, e1 + 2.0 * e2


def total_moments(n, k):
    means, variances = [], []
    for m in range(2, n + 1):
        e1, second = deck_moments(m, k)
        means.append(e1)
        variances.append(second - e1 * e1)
    return math.fsum(means), math.fsum(variances)
