"""Command-line front end: ``kcm <subcommand> ...``.

Exit codes: 0 success, 1 a verification failed, 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from contextlib import contextmanager

from . import __version__
from .core import Permutation, ValidationError
from .experiments import SCHEMA_VERSION, ExperimentConfig, replicate_permutation, run_experiment
from .oracle import SizeError, enumerate_strategy, exact_pmf_I
from .sampler import ConfigError, derive_seed
from .statistics import (
    asymptotic_constants,
    count_inversions,
    exact_step_moments,
    exact_total_moments,
    greedy_lower_bound,
    growing_k_leading_terms,
    lis_length,
)
from .strategies import STRATEGIES, ContractViolation
from .suites import SUITES, format_table, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _seed(text):
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {text}")
    return value


@contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w") as fh:
            yield fh


def _dump(obj) -> str:
    return json.dumps({"schema_version": SCHEMA_VERSION, **obj}, sort_keys=True)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_sample(args):
    fmt = args.format or "text"
    if fmt not in ("text", "json"):
        raise UsageError("sample supports --format text or json")
    perms = [
        replicate_permutation(args.n, args.k, derive_seed(args.seed, i), args.strategy, args.mode)
        for i in range(args.count)
    ]
    with _output(args.out) as fh:
        if fmt == "json":
            fh.write(_dump({"n": args.n, "k": args.k, "seed": args.seed, "strategy": args.strategy,
                            "permutations": [p.to_list() for p in perms]}) + "\n")
        else:
            for p in perms:
                fh.write(p.to_text() + "\n")
    return EXIT_OK


def _read_permutations(stream):
    for lineno, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        try:
            yield Permutation.from_text(line)
        except ValidationError as exc:
            raise UsageError(f"line {lineno}: {exc}") from None


def cmd_stats(args):
    fmt = args.format or "csv"
    if fmt not in ("csv", "json"):
        raise UsageError("stats supports --format csv or json")
    source = sys.stdin if args.input in (None, "-") else open(args.input)
    try:
        rows = []
        for perm in _read_permutations(source):
            rows.append({"n": perm.n, "I": count_inversions(perm), "L": lis_length(perm),
                         "M": greedy_lower_bound(perm, args.k).M})
    finally:
        if source is not sys.stdin:
            source.close()
    with _output(args.out) as fh:
        if fmt == "json":
            fh.write(_dump({"k": args.k, "rows": rows}) + "\n")
        else:
            fh.write("n,I,L,M\n")
            for r in rows:
                fh.write(f"{r['n']},{r['I']},{r['L']},{r['M']}\n")
    return EXIT_OK


def cmd_moments(args):
    c = asymptotic_constants(args.k)
    mean, var = exact_total_moments(args.n, args.k)
    lead_mean, lead_var = growing_k_leading_terms(args.n, args.k)
    out = {
        "n": args.n, "k": args.k, "mean": mean, "var": var,
        "a_k": str(c.a_k), "b_k": str(c.b_k),
        "a_k_n2": float(c.a_k) * args.n**2, "b_k_n3": float(c.b_k) * args.n**3,
        "growing_k_mean": lead_mean, "growing_k_var": lead_var,
    }
    if args.t is not None:
        out["t"] = args.t
        out["step_mean"], out["step_var"] = exact_step_moments(args.n, args.k, args.t)
    with _output(args.out) as fh:
        fh.write(_dump(out) + "\n")
    return EXIT_OK


def cmd_pmf(args):
    pmf = exact_pmf_I(args.n, args.k, exact=args.exact)
    fmt = args.format or "json"
    with _output(args.out) as fh:
        if fmt == "csv":
            fh.write("i,p\n")
            for i, p in zip(pmf.support().tolist(), pmf.probs):
                fh.write(f"{i},{p!r}\n" if not pmf.exact else f"{i},{p}\n")
        else:
            obj = json.loads(pmf.to_json())
            fh.write(_dump({"n": args.n, "k": args.k, **obj}) + "\n")
    return EXIT_OK


def cmd_enumerate(args):
    res = enumerate_strategy(args.n, args.k, args.strategy, workers=args.workers)
    obj = json.loads(res.to_json())
    mean_i, var_i = res.moments_I()
    mean_l, var_l = res.moments_L()
    obj["moments"] = {"E_I": str(mean_i), "Var_I": str(var_i), "E_L": str(mean_l), "Var_L": str(var_l)}
    with _output(args.out) as fh:
        fh.write(_dump(obj) + "\n")
    return EXIT_OK


def cmd_experiment(args):
    if args.config:
        cfg = ExperimentConfig.load(args.config)
        if args.workers:
            cfg = dataclasses.replace(cfg, workers=args.workers)
    else:
        if not args.n or (args.k is None and args.beta is None):
            raise UsageError("experiment needs --config, or --n with --k or --beta")
        k_rule = {"beta": args.beta} if args.beta is not None else args.k
        cfg = ExperimentConfig(n=tuple(args.n), k_rule=k_rule, trials=args.trials, seed=args.seed,
                               strategy=args.strategy, stats=tuple(args.stats.split(",")), mode=args.mode,
                               workers=args.workers or 1)
    summary = run_experiment(cfg)
    with _output(args.out) as fh:
        fh.write(summary.to_csv() if (args.format or "json") == "csv" else summary.to_json() + "\n")
    return EXIT_OK if summary.passed else EXIT_FAIL


def cmd_verify(args):
    overrides = {}
    if args.config:
        with open(args.config) as fh:
            overrides = json.load(fh)
    if args.workers:
        overrides["workers"] = args.workers
    verdicts = run_suite(args.suite, overrides)
    print(format_table(verdicts), file=sys.stderr)
    failed = [v.name for v in verdicts if not v.passed]
    report = {
        "suite": args.suite,
        "passed": not failed,
        "failed": failed,
        "checks": [{"name": v.name, "passed": v.passed, "detail": v.detail} for v in verdicts],
    }
    with _output(args.out) as fh:
        fh.write(json.dumps({"schema_version": SCHEMA_VERSION, **report}, sort_keys=True, default=str) + "\n")
    if failed:
        print("failed: " + ", ".join(failed), file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_seed, default=0, help="master seed (u64)")
    common.add_argument("--mode", choices=["direct", "inverse"], default=None,
                        help="sampling mode (default: inverse when k > 64)")
    common.add_argument("--strategy", choices=sorted(STRATEGIES), default="min")
    common.add_argument("--workers", type=_positive, default=None)
    common.add_argument("--format", choices=["json", "csv", "text"], default=None)
    common.add_argument("--config", default=None, help="JSON config file")
    common.add_argument("--out", default=None, help="output path (default stdout)")

    p = argparse.ArgumentParser(prog="kcm", description="k-card-minimum random permutation workbench")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sample", parents=[common], help="generate permutations")
    s.add_argument("n", type=_positive)
    s.add_argument("k", type=_positive)
    s.add_argument("--count", type=_positive, default=1)
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("stats", parents=[common], help="I, L, M for permutations read one per line")
    s.add_argument("--in", dest="input", default=None, help="input file (default stdin)")
    s.add_argument("--k", type=_positive, default=1, help="k used for the greedy construction")
    s.set_defaults(func=cmd_stats)

    s = sub.add_parser("moments", parents=[common], help="exact mean and variance of I")
    s.add_argument("n", type=_positive)
    s.add_argument("k", type=_positive)
    s.add_argument("--t", type=_positive, default=None, help="also report step t")
    s.set_defaults(func=cmd_moments)

    s = sub.add_parser("pmf", parents=[common], help="exact law of I")
    s.add_argument("n", type=_positive)
    s.add_argument("k", type=_positive)
    s.add_argument("--exact", action="store_true", help="rational arithmetic")
    s.set_defaults(func=cmd_pmf)

    s = sub.add_parser("enumerate", parents=[common], help="exact joint law of (I, L) for a strategy")
    s.add_argument("n", type=_positive)
    s.add_argument("k", type=_positive)
    s.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("experiment", parents=[common], help="Monte Carlo run")
    s.add_argument("--n", type=_positive, nargs="+", default=None)
    s.add_argument("--k", type=_positive, default=None)
    s.add_argument("--beta", type=float, default=None, help="k_n = ceil(n^beta)")
    s.add_argument("--trials", type=_positive, default=1000)
    s.add_argument("--stats", default="I,L", help="comma-separated subset of I,L,M,profile")
    s.set_defaults(func=cmd_experiment)

    s = sub.add_parser("verify", parents=[common], help="run a verification suite")
    s.add_argument("--suite", required=True, choices=sorted(SUITES))
    s.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.workers is None and args.command not in ("experiment", "verify"):
        args.workers = 1
    try:
        return args.func(args)
    except (UsageError, ConfigError, ValidationError, SizeError, ContractViolation, OSError,
            json.JSONDecodeError) as exc:
        print(f"kcm {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
