import itertools
import math

import pytest


def brute_inversions(seq):
    return sum(1 for i, j in itertools.combinations(range(len(seq)), 2) if seq[i] > seq[j])


def brute_lis(seq):
    best = 0
    n = len(seq)
    for mask in range(1, 1 << n):
        sub = [seq[i] for i in range(n) if mask >> i & 1]
        if all(a < b for a, b in zip(sub, sub[1:])):
            best = max(best, len(sub))
    return best


@pytest.fixture
def brute():
    return type("Brute", (), {"inversions": staticmethod(brute_inversions), "lis": staticmethod(brute_lis)})


def all_relative(n):
    return itertools.product(*[range(1, n - t + 1) for t in range(n)])


def chi2_pvalue(observed, expected):
    from scipy.stats import chisquare

    return chisquare(observed, expected).pvalue


__all__ = ["brute_inversions", "brute_lis", "all_relative", "chi2_pvalue", "math"]


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
