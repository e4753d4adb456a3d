from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kcm.core import Permutation, RelativeSeq, permutation_to_relative, relative_to_permutation
from kcm.sampler import sample_kcm_batch
from kcm.statistics import (
    adjacent_transposition_distance,
    asymptotic_constants,
    count_inversions,
    exact_step_moments,
    exact_step_moments_rational,
    exact_total_moments,
    greedy_lower_bound,
    inversion_profile,
    lis_length,
    perturb_relative,
    reinsertion_distance,
    target_size,
)

from conftest import brute_inversions, brute_lis

perms = st.integers(1, 40).flatmap(lambda n: st.permutations(list(range(1, n + 1))))


def test_examples_2143():
    p = Permutation([2, 1, 4, 3])
    assert count_inversions(p) == 2
    assert inversion_profile(p).tolist() == [1, 0, 1]
    assert lis_length(p) == 2
    assert reinsertion_distance(p) == 2


@pytest.mark.parametrize("n", [1, 2, 5, 17])
def test_identity_and_reversal(n):
    assert count_inversions(Permutation.identity(n)) == 0
    assert count_inversions(Permutation.reversal(n)) == n * (n - 1) // 2
    assert lis_length(Permutation.identity(n)) == n
    assert lis_length(Permutation.reversal(n)) == 1
    assert not inversion_profile(Permutation.identity(n)).any()


def test_inversions_vs_brute_up_to_200():
    rng = np.random.default_rng(0)
    for n in list(range(1, 30)) + [100, 200]:
        p = (rng.permutation(n) + 1).tolist()
        assert count_inversions(p) == brute_inversions(p)
        assert adjacent_transposition_distance(p) == count_inversions(p)


def test_lis_vs_brute_up_to_12():
    rng = np.random.default_rng(1)
    for _ in range(200):
        p = (rng.permutation(int(rng.integers(1, 13))) + 1).tolist()
        assert lis_length(p) == brute_lis(p)


@given(perms)
def test_profile_is_relative_minus_one(p):
    rel = permutation_to_relative(p).rel
    assert inversion_profile(p).tolist() == (rel[:-1] - 1).tolist()
    assert inversion_profile(p).sum() == count_inversions(p)


@pytest.mark.parametrize("k, a, b", [(1, Fraction(1, 4), Fraction(1, 36)), (2, Fraction(1, 6), Fraction(1, 54))])
def test_constants(k, a, b):
    c = asymptotic_constants(k)
    assert (c.a_k, c.b_k) == (a, b)


def test_constants_large_k_limits():
    c = asymptotic_constants(10**6)
    assert float(c.a_k * c.k) == pytest.approx(0.5, rel=1e-5)
    assert float(c.b_k * c.k**2) == pytest.approx(1 / 3, rel=1e-5)


@pytest.mark.parametrize(
    "n, k, t, mean, var",
    [(2, 1, 1, 0.5, 0.25), (2, 2, 1, 0.25, 3 / 16), (5, 3, 5, 0.0, 0.0), (7, 2, 7, 0.0, 0.0)],
)
def test_step_moments(n, k, t, mean, var):
    assert exact_step_moments(n, k, t) == pytest.approx((mean, var), abs=1e-15)


def test_step_moments_match_rational():
    for n, k, t in [(10, 3, 1), (10, 3, 4), (25, 1, 2), (50, 7, 10)]:
        m, v = exact_step_moments_rational(n, k, t)
        assert exact_step_moments(n, k, t) == pytest.approx((float(m), float(v)), rel=1e-12)


@pytest.mark.parametrize("n, k, mean", [(3, 1, 1.5), (2, 2, 0.25), (1, 4, 0.0)])
def test_total_mean_examples(n, k, mean):
    assert exact_total_moments(n, k)[0] == pytest.approx(mean, abs=1e-15)


def test_total_moments_n1000_k3():
    n = 1000
    mean, _ = exact_total_moments(n, 3)
    assert abs(mean / n**2 - 1 / 8) <= 2 / n


def test_uniform_variance_formula():
    # k=1 is the uniform law: Var(I) = n(n-1)(2n+5)/72
    n = 300
    assert exact_total_moments(n, 1)[1] == pytest.approx(n * (n - 1) * (2 * n + 5) / 72, rel=1e-12)


@pytest.mark.parametrize("n, k, s", [(4, 1, 2), (10, 3, 2), (100, 1, 10), (101, 1, 11), (5, 10, 1), (10**5, 47, 47)])
def test_target_size(n, k, s):
    assert target_size(n, k) == s


def test_greedy_identity_n4():
    rec = greedy_lower_bound(Permutation.identity(4), 1)
    assert rec.target_size == 2
    assert rec.stops.tolist() == [1, 2, 3]
    assert rec.M == 3
    assert lis_length(Permutation.identity(4)) == 4


@pytest.mark.parametrize("n, k", [(5, 1), (30, 2), (100, 5)])
def test_greedy_reversal(n, k):
    assert greedy_lower_bound(Permutation.reversal(n), k).M == 1


@given(perms, st.integers(1, 6))
def test_greedy_contract(p, k):
    rec = greedy_lower_bound(p, k)
    picked = rec.picked_cards.tolist()
    assert all(a < b for a, b in zip(picked, picked[1:]))
    assert [p[t - 1] for t in rec.stops.tolist()] == picked
    assert all(a < b for a, b in zip(rec.stops.tolist(), rec.stops.tolist()[1:]))
    assert 1 <= rec.M <= lis_length(p)


def test_greedy_on_samples():
    for row in sample_kcm_batch(2000, 5, 20, seed=3):
        assert greedy_lower_bound(row.tolist(), 5).M <= lis_length(row.tolist())


def test_perturbation_examples():
    rel = RelativeSeq([1, 1, 1, 1])
    assert perturb_relative(rel, 2, 1) == rel
    new = perturb_relative(rel, 1, 4)
    sigma = relative_to_permutation(new)
    assert sigma.to_list() == [4, 1, 2, 3]
    assert lis_length(sigma) == 3


@given(st.integers(2, 30).flatmap(lambda n: st.tuples(
    st.tuples(*[st.integers(1, n - t) for t in range(n)]), st.integers(1, n), st.integers(1, n))))
def test_perturbation_changes_lis_by_at_most_one(args):
    rel, t, r = args
    n = len(rel)
    r = min(r, n - t + 1)
    before = lis_length(relative_to_permutation(rel))
    after = lis_length(relative_to_permutation(perturb_relative(rel, t, r)))
    assert abs(before - after) <= 1


def test_perturbation_validation():
    from kcm.core import ValidationError

    with pytest.raises(ValidationError):
        perturb_relative([1, 1, 1], 2, 3)
    with pytest.raises(ValidationError):
        perturb_relative([1, 1, 1], 4, 1)
