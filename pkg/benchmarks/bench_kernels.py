"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--n 20000] [--repeat 3]
"""
import argparse
import timeit

import numpy as np

from kcm import kernels
from kcm.sampler import sample_relative_batch


def cases(n):
    rel = np.ascontiguousarray(sample_relative_batch(n, 5, 1, seed=1)[0])
    perm = np.asarray(kernels.rel_to_perm(rel))
    s = max(1, int(np.ceil(np.sqrt(n / 5))))
    return {
        "rel_to_perm": lambda m: m.rel_to_perm(rel),
        "perm_to_rel": lambda m: m.perm_to_rel(perm),
        "count_inversions": lambda m: m.count_inversions(perm),
        "lis_length": lambda m: m.lis_length(perm),
        "greedy_walk": lambda m: m.greedy_walk(perm, s),
        "total_moments": lambda m: m.total_moments(min(n, 5000), 5),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--n", type=int, default=20000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = kernels.available_backends()
    if "cython" not in backends:
        print("compiled backend not built; only the fallback is timed")
    print(f"n={args.n}")
    print(f"{'kernel':<18}" + "".join(f"{b:>12}" for b in sorted(backends)) + "     speedup")
    for name, fn in cases(args.n).items():
        best = {b: min(timeit.repeat(lambda: fn(m), number=1, repeat=args.repeat)) for b, m in backends.items()}
        row = f"{name:<18}" + "".join(f"{best[b] * 1e3:>10.2f}ms" for b in sorted(backends))
        if "cython" in best:
            row += f"  {best['python'] / best['cython']:>8.1f}x"
        print(row)


if __name__ == "__main__":
    main()
