"""Named verification suites driven by ``kcm verify``.

Each suite takes an optional dict of overrides (from ``--config``) and returns
a list of :class:`~kcm.experiments.Verdict`. Defaults reproduce the exit
criteria of the package.
"""
from __future__ import annotations

from . import experiments as ex

SUITE_DEFAULTS = {
    "moments": {"fixed_ks": [1, 2, 5], "ns": [10**3, 10**4], "growing_n": 10**5, "growing_beta": 0.5},
    "clt": {"n": 2000, "k": 4, "beta": 0.4, "trials": 5000, "threshold": ex.DEFAULT_KS_THRESHOLD, "seed": 0},
    "weaklaw": {"ns": [10**3, 10**4, 10**5], "k": 2, "eps_fixed": 0.02, "beta": 0.5, "eps_growing": 0.05,
                "trials": 200, "seed": 0},
    "varL": {"n": 1000, "ks": [1, 10], "trials": 5000, "confidence": 0.999, "seed": 0},
    "scalingL": {"n": 10**5, "beta": 1 / 3, "trials": 200, "seed": 0, "slope_betas": [1 / 3, 2 / 3],
                 "slope_ns": [10**3, 10**4, 10**5], "slope_trials": 50, "slope_tol": 0.05},
    "dominance": {"cases": [[20, 2], [100, 3], [1000, 8]], "traces": 10**4, "others": ["uniform", "max"],
                  "copy_cases": [[5, 2], [20, 3], [100, 8]], "copy_traces": 10**4,
                  "exact_n": 4, "exact_k": 2, "seed": 0},
    "perturbation": {"ns": [10, 100, 1000], "count": 10**5, "seed": 0},
    "oracle": {"agreement": [[4, 2], [5, 2], [4, 3]], "pmf_ns": [2, 3, 10, 50, 300], "pmf_ks": [1, 2, 5, 50],
               "copy_n": 4, "copy_k": 2, "uniform_samples": 10**5, "seed": 0},
}


def _opts(name, overrides):
    unknown = set(overrides or {}) - set(SUITE_DEFAULTS[name]) - {"workers"}
    if unknown:
        raise ex.ConfigError(f"unknown keys for suite {name!r}: {sorted(unknown)}")
    return {**SUITE_DEFAULTS[name], **(overrides or {})}


def suite_moments(cfg=None):
    o = _opts("moments", cfg)
    out = [ex.fixed_k_moments_verdict(k, o["ns"]) for k in o["fixed_ks"]]
    out.append(ex.growing_k_moments_verdict(o["growing_n"], o["growing_beta"]))
    return out


def suite_clt(cfg=None):
    o = _opts("clt", cfg)
    w = o.get("workers", 1)
    return [
        ex.clt_inversions(o["n"], o["k"], o["trials"], o["seed"], o["threshold"], w),
        ex.clt_inversions(o["n"], {"beta": o["beta"]}, o["trials"], o["seed"], o["threshold"], w),
    ]


def suite_weaklaw(cfg=None):
    o = _opts("weaklaw", cfg)
    w = o.get("workers", 1)
    return [
        ex.weak_law_verdict(o["ns"], o["k"], o["eps_fixed"], o["trials"], o["seed"], workers=w),
        ex.weak_law_verdict(o["ns"], {"beta": o["beta"]}, o["eps_growing"], o["trials"], o["seed"], workers=w),
    ]


def suite_varL(cfg=None):
    o = _opts("varL", cfg)
    return [ex.variance_L_verdict(o["n"], k, o["trials"], o["seed"], o["confidence"], o.get("workers", 1))
            for k in o["ks"]]


def suite_scalingL(cfg=None):
    o = _opts("scalingL", cfg)
    w = o.get("workers", 1)
    out = [ex.scaling_L_verdict(o["n"], {"beta": o["beta"]}, o["trials"], o["seed"], workers=w)]
    for beta in o["slope_betas"]:
        out.append(ex.slope_verdict(beta, o["slope_ns"], o["slope_trials"], o["seed"], o["slope_tol"], w))
    return out


def suite_dominance(cfg=None):
    o = _opts("dominance", cfg)
    out = [ex.dominance_verdict(n, k, o["traces"], o["seed"], o["others"]) for n, k in o["cases"]]
    out += [ex.dominance_verdict(n, k, o["copy_traces"], o["seed"], ["copy"]) for n, k in o["copy_cases"]]
    for other in ("uniform", "max", "copy"):
        out.append(ex.exact_dominance_I(o["exact_n"], o["exact_k"], other))
    return out


def suite_perturbation(cfg=None):
    o = _opts("perturbation", cfg)
    return [ex.perturbation_verdict(n, o["count"], o["seed"]) for n in o["ns"]]


def suite_oracle(cfg=None):
    o = _opts("oracle", cfg)
    out = [ex.oracle_agreement_verdict(n, k) for n, k in o["agreement"]]
    out.append(ex.pmf_moments_verdict(o["pmf_ns"], o["pmf_ks"]))
    out.append(ex.copy_improvement_verdict(o["copy_n"], o["copy_k"]))
    out.append(ex.uniform_reduction_verdict(4, o["uniform_samples"], o["seed"]))
    return out


SUITES = {
    "moments": suite_moments,
    "clt": suite_clt,
    "weaklaw": suite_weaklaw,
    "varL": suite_varL,
    "scalingL": suite_scalingL,
    "dominance": suite_dominance,
    "perturbation": suite_perturbation,
    "oracle": suite_oracle,
}


def run_suite(name: str, cfg=None):
    try:
        fn = SUITES[name]
    except KeyError:
        raise ex.ConfigError(f"unknown suite {name!r}; expected one of {sorted(SUITES)}") from None
    return fn(cfg)


def format_table(verdicts) -> str:
    width = max((len(v.name) for v in verdicts), default=10)
    lines = [f"{'check':<{width}}  result"]
    lines += [f"{v.name:<{width}}  {'PASS' if v.passed else 'FAIL'}" for v in verdicts]
    return "\n".join(lines)

