import numpy as np
import pytest
from scipy.stats import chisquare

from kcm.core import relative_to_permutation
from kcm.sampler import (
    ConfigError,
    DrawTrace,
    SamplerConfig,
    derive_seed,
    inverse_cdf_ranks,
    make_rng,
    resolve_mode,
    sample_kcm,
    sample_kcm_batch,
    sample_relative,
    sample_relative_batch,
    sample_trace,
)
from kcm.strategies import replay

ALPHA = 1e-3


def exact_pmf(m, k):
    """P(C~ = j) for j = 1..m from the tail ((m-j)/m)^k."""
    j = np.arange(0, m + 1)
    tail = ((m - j) / m) ** k
    return tail[:-1] - tail[1:]


def chi2_p(values, m, k):
    counts = np.bincount(values, minlength=m + 1)[1:]
    return chisquare(counts, exact_pmf(m, k) * len(values)).pvalue


def test_tail_formula_value():
    # P(C~_1 > 2) at n=5, k=2
    assert 1 - exact_pmf(5, 2)[:2].sum() == pytest.approx(0.36)


@pytest.mark.parametrize("mode", ["direct", "inverse"])
def test_first_step_law_n10_k3(mode):
    rel = sample_relative_batch(10, 3, 10**5, seed=11, mode=mode)
    assert chi2_p(rel[:, 0], 10, 3) > ALPHA


@pytest.mark.parametrize("n, k", [(10, 3), (30, 7), (12, 1)])
@pytest.mark.parametrize("t", [1, 4, 8])
def test_mode_equivalence(n, k, t):
    m = n - t + 1
    direct = sample_relative_batch(n, k, 10**5, seed=21, mode="direct")[:, t - 1]
    inverse = sample_relative_batch(n, k, 10**5, seed=22, mode="inverse")[:, t - 1]
    assert chi2_p(direct, m, k) > ALPHA
    assert chi2_p(inverse, m, k) > ALPHA
    # two-sample homogeneity on the pooled table
    from scipy.stats import chi2_contingency

    table = np.stack([np.bincount(direct, minlength=m + 1)[1:], np.bincount(inverse, minlength=m + 1)[1:]])
    table = table[:, table.sum(axis=0) > 0]
    if table.shape[1] > 1:
        assert chi2_contingency(table)[1] > ALPHA


def test_k1_is_uniform_per_step():
    rel = sample_relative_batch(8, 1, 50000, seed=5)
    for t in range(8):
        m = 8 - t
        counts = np.bincount(rel[:, t], minlength=m + 1)[1:]
        assert chisquare(counts).pvalue > ALPHA or m == 1


def test_last_step_is_one():
    for mode in ("direct", "inverse"):
        rel = sample_relative_batch(20, 4, 1000, seed=1, mode=mode)
        assert np.all(rel[:, -1] == 1)


@pytest.mark.parametrize("mode", ["direct", "inverse"])
def test_n1(mode):
    assert sample_kcm(SamplerConfig(1, 5, mode, 9)).to_list() == [1]


@pytest.mark.parametrize("mode", ["direct", "inverse"])
def test_determinism(mode):
    cfg = SamplerConfig(500, 6, mode, 123)
    assert sample_kcm(cfg).cards.tobytes() == sample_kcm(cfg).cards.tobytes()
    a = sample_kcm_batch(50, 3, 20, seed=4, mode=mode)
    b = sample_kcm_batch(50, 3, 20, seed=4, mode=mode)
    assert a.tobytes() == b.tobytes()


def test_sample_relative_matches_kcm():
    cfg = SamplerConfig(40, 3, "inverse", 8)
    assert relative_to_permutation(sample_relative(cfg)) == sample_kcm(cfg)


def test_trace_ranges_n3_k2():
    tr = sample_trace(SamplerConfig(3, 2, seed=3))
    assert tr.draws.shape == (3, 2)
    assert np.all((tr.draws[0] >= 1) & (tr.draws[0] <= 3))
    assert np.all((tr.draws[1] >= 1) & (tr.draws[1] <= 2))
    assert np.all(tr.draws[2] == 1)


@pytest.mark.parametrize("seed", [0, 1, 99, 2**63])
def test_trace_replay_equals_direct_sample(seed):
    cfg = SamplerConfig(200, 4, "direct", seed)
    assert replay("min", sample_trace(cfg)) == sample_kcm(cfg)


def test_distinct_seeds_distinct_traces():
    a = sample_trace(SamplerConfig(50, 3, seed=1))
    b = sample_trace(SamplerConfig(50, 3, seed=2))
    assert a != b


def test_trace_serialization():
    tr = sample_trace(SamplerConfig(30, 5, seed=6))
    assert DrawTrace.from_json(tr.to_json()) == tr
    assert DrawTrace.from_bytes(tr.to_bytes()) == tr
    with pytest.raises(ConfigError):
        DrawTrace.from_bytes(b"XXXX" + tr.to_bytes()[4:])


def test_trace_validation():
    with pytest.raises(ConfigError, match="t=2"):
        DrawTrace(3, 1, np.array([[1], [3], [1]]))


def test_first_step_mean_nonincreasing_in_k():
    n = 10
    means = []
    for k in (1, 2, 3, 5, 8):
        rel = sample_relative_batch(n, k, 20000, seed=k)
        exact = float(np.dot(np.arange(1, n + 1), exact_pmf(n, k)))
        emp = rel[:, 0].mean()
        assert abs(emp - exact) < 5 * rel[:, 0].std() / np.sqrt(len(rel))
        means.append(exact)
    assert all(a >= b for a, b in zip(means, means[1:]))


def test_inverse_large_k_and_boundaries():
    rng = make_rng(0)
    for k in (1, 65, 10**4):
        r = inverse_cdf_ranks(rng, 1000, k)
        assert np.all(r >= 1) and np.all(r <= np.arange(1000, 0, -1))


def test_mode_resolution_and_errors():
    assert resolve_mode(None, 64) == "direct"
    assert resolve_mode(None, 65) == "inverse"
    assert resolve_mode("direct-draws", 3) == "direct"
    assert resolve_mode("inverse-cdf", 3) == "inverse"
    with pytest.raises(ConfigError):
        resolve_mode("fast", 3)
    with pytest.raises(ConfigError):
        SamplerConfig(0, 1)
    with pytest.raises(ConfigError):
        SamplerConfig(5, 0)
    with pytest.raises(ConfigError):
        SamplerConfig(5, 1, seed=-1)


def test_derive_seed_is_stable_and_spread():
    seeds = {derive_seed(7, i) for i in range(1000)}
    assert len(seeds) == 1000
    assert derive_seed(7, 3) == derive_seed(7, 3)
    assert all(0 <= s < 2**64 for s in seeds)
