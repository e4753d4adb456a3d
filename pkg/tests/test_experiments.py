import json

import numpy as np
import pytest

from kcm import experiments as ex
from kcm.sampler import ConfigError, SamplerConfig, derive_seed, sample_kcm
from kcm.statistics import count_inversions, lis_length


def test_ceil_power_snaps_noise():
    assert ex.ceil_power(10**6, 1 / 3) == 100
    assert ex.ceil_power(10**4, 0.5) == 100
    assert ex.ceil_power(2000, 0.4) == 21
    assert ex.ceil_power(10**5, 1 / 3) == 47


def test_k_rules():
    assert ex.KRule.parse(3)(100) == 3
    assert ex.KRule.parse({"beta": 0.5})(10**4) == 100
    assert ex.KRule.parse({"table": {"10": 2}})(10) == 2
    with pytest.raises(ConfigError):
        ex.KRule.parse({"table": {"10": 2}})(11)
    with pytest.raises(ConfigError):
        ex.KRule.parse({"beta": 1.5})
    with pytest.raises(ConfigError):
        ex.KRule.parse(5)(3)
    with pytest.raises(ConfigError):
        ex.KRule.parse("two")


@pytest.mark.parametrize(
    "bad",
    [
        {"n": [10], "k": 2, "trials": 0},
        {"n": [0], "k": 2, "trials": 5},
        {"n": [10], "k": 2, "trials": 5, "stats": ["Q"]},
        {"n": [10], "k": 2, "trials": 5, "strategy": "best"},
        {"n": [3], "k": 2, "trials": 5, "strategy": "copy"},
        {"n": [10], "k": 2, "trials": 5, "colour": "red"},
    ],
)
def test_config_errors(bad):
    with pytest.raises(ConfigError):
        ex.ExperimentConfig.from_dict(bad)


def test_config_round_trip(tmp_path):
    cfg = ex.ExperimentConfig.from_dict({"n": [50, 100], "k_rule": {"beta": 0.5}, "trials": 10, "seed": 4})
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg.to_dict()))
    assert ex.ExperimentConfig.load(path).to_dict() == cfg.to_dict()


@pytest.mark.parametrize("strategy", ["min", "copy", "max"])
def test_trials_one_reproduces_sampler(strategy):
    out = ex.run_samples(60, 3, 1, seed=5, strategy=strategy, stats=("I", "L"))
    perm = ex.replicate_permutation(60, 3, derive_seed(5, 0), strategy)
    assert out["I"][0] == count_inversions(perm)
    assert out["L"][0] == lis_length(perm)
    if strategy == "min":
        assert perm == sample_kcm(SamplerConfig(60, 3, None, derive_seed(5, 0)))


def test_results_identical_across_worker_counts():
    base = ex.run_samples(80, 4, 64, seed=9, stats=("I", "L", "M", "profile"), workers=1)
    for w in (4, 16):
        other = ex.run_samples(80, 4, 64, seed=9, stats=("I", "L", "M", "profile"), workers=w)
        for key in base:
            assert np.array_equal(base[key], other[key])


def test_standard_error_halves_with_four_times_trials():
    ses = []
    for trials in (500, 2000, 8000):
        cfg = ex.ExperimentConfig(n=100, k_rule=2, trials=trials, seed=1, stats=("I",))
        ses.append(ex.run_experiment(cfg).row(100, "I").se)
    for a, b in zip(ses, ses[1:]):
        assert 0.4 < b / a < 0.6


def test_mean_vs_exact_n200_k5():
    cfg = ex.ExperimentConfig(n=200, k_rule=5, trials=10**4, seed=2, stats=("I",))
    summary = ex.run_experiment(cfg)
    assert summary.row(200, "I").verdicts["mean_vs_exact"]["passed"]
    assert summary.passed


def test_run_summary_outputs():
    cfg = ex.ExperimentConfig(n=(30, 60), k_rule=2, trials=50, seed=0, stats=("I", "L", "M", "profile"))
    s = ex.run_experiment(cfg)
    d = json.loads(s.to_json())
    assert d["schema_version"] == ex.SCHEMA_VERSION
    assert s.row(60, "M").verdicts["M_le_L"]["passed"]
    assert len(d["extras"]["profiles"]["30"]["exact_mean"]) == 29
    lines = s.to_csv().splitlines()
    assert lines[0].startswith("schema_version,n,k,statistic")
    assert len(lines) == 1 + 2 * 3


def test_degenerate_n1():
    out = ex.run_samples(1, 1, 20, stats=("I", "L"))
    assert not out["I"].any()
    assert np.all(out["L"] == 1)
    assert np.var(out["L"]) <= 0.25


def test_ks_self_test():
    z = np.random.default_rng(0).standard_normal(5000)
    assert ex.ks_distance(z) < 0.02
    assert ex.clt_verdict(z, 0.0, 1.0).passed


def test_clt_verdict_guards():
    with pytest.raises(ValueError):
        ex.clt_verdict(np.zeros(10), 0, 1)
    with pytest.raises(ValueError):
        ex.clt_verdict(np.zeros(2000), 0, 0)


def test_weak_law_small_sweep():
    v = ex.weak_law_verdict([100, 1000, 5000], 2, eps=0.05, trials=50, seed=1)
    assert v.passed, v.detail


def test_dominance_small():
    v = ex.dominance_verdict(30, 3, 500, seed=1, others=["uniform", "max", "copy"])
    assert v.passed and not any(v.detail["violations"].values())


def test_dominance_catches_reversed_claim():
    # max is worse for I, so "max <= min" must fail on some trace
    from kcm.strategies import coupled_run
    from kcm.sampler import sample_trace

    bad = 0
    for seed in range(50):
        a, b = coupled_run("max", "min", sample_trace(SamplerConfig(20, 2, seed=seed)))
        bad += count_inversions(a) > count_inversions(b)
    assert bad > 0


def test_verdict_line_format():
    v = ex.Verdict("demo", True, {"x": 1})
    assert v.line().startswith("PASS  demo")
