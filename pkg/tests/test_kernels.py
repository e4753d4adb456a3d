"""Both kernel backends against each other and against brute force."""
import numpy as np
import pytest

from kcm import kernels
from kcm.statistics import exact_step_moments_rational

from conftest import brute_inversions, brute_lis

BACKENDS = kernels.available_backends()


@pytest.fixture(params=sorted(BACKENDS))
def kern(request):
    return BACKENDS[request.param]


def random_perms(seed, count=50, max_n=40):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n = int(rng.integers(1, max_n))
        yield (rng.permutation(n) + 1).astype(np.int64)


def test_compiled_backend_present():
    # the editable install builds the extension; the fallback still works without it
    assert kernels.BACKEND in ("cython", "python")


def test_inversions_and_lis_vs_brute(kern):
    for p in random_perms(1, max_n=12):
        assert kern.count_inversions(p) == brute_inversions(p.tolist())
        assert kern.lis_length(p) == brute_lis(p.tolist())


def test_inversion_profile_matches_relative(kern):
    for p in random_perms(2):
        prof = np.asarray(kern.inversion_profile(p))
        rel = np.asarray(kern.perm_to_rel(p))
        assert np.array_equal(prof, rel - 1)
        assert prof[-1] == 0


def test_rel_perm_inverse(kern):
    for p in random_perms(3):
        rel = np.asarray(kern.perm_to_rel(p))
        assert np.array_equal(np.asarray(kern.rel_to_perm(rel)), p)


def test_rows_match_single(kern):
    rng = np.random.default_rng(4)
    n = 30
    rel = np.stack([np.minimum(rng.integers(1, 100, size=n), np.arange(n, 0, -1)) for _ in range(8)]).astype(np.int64)
    rows = np.asarray(kern.rel_to_perm_rows(rel))
    for r, p in zip(rel, rows):
        assert np.array_equal(np.asarray(kern.rel_to_perm(r)), p)


@pytest.mark.parametrize("m, k", [(1, 3), (2, 1), (2, 2), (7, 3), (40, 5)])
def test_deck_moments_exact(kern, m, k):
    e1, var = exact_step_moments_rational(m, k, 1)
    mean, second = kern.deck_moments(m, k)
    assert mean == pytest.approx(float(e1), rel=1e-13, abs=1e-15)
    assert second - mean * mean == pytest.approx(float(var), rel=1e-11, abs=1e-14)


def test_backends_agree():
    if len(BACKENDS) < 2:
        pytest.skip("compiled backend not built")
    c, py = BACKENDS["cython"], BACKENDS["python"]
    for p in random_perms(5, count=30, max_n=300):
        assert c.count_inversions(p) == py.count_inversions(p)
        assert c.lis_length(p) == py.lis_length(p)
        assert np.array_equal(np.asarray(c.perm_to_rel(p)), np.asarray(py.perm_to_rel(p)))
        for s in (1, 3, 10):
            for a, b in zip(c.greedy_walk(p, s), py.greedy_walk(p, s)):
                assert np.array_equal(np.asarray(a), np.asarray(b))
    for n, k in [(50, 1), (300, 4), (2000, 45)]:
        assert np.allclose(c.total_moments(n, k), py.total_moments(n, k), rtol=1e-12)


def test_pure_python_switch():
    import os
    import subprocess
    import sys

    code = (
        "import kcm; from kcm import SamplerConfig, sample_kcm, count_inversions;"
        "print(kcm.BACKEND, count_inversions(sample_kcm(SamplerConfig(300, 3, seed=4))))"
    )
    env = {**os.environ, "KCM_PURE_PYTHON": "1"}
    slow = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    env["KCM_PURE_PYTHON"] = "0"
    fast = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert slow.stdout.split()[0] == "python"
    assert slow.stdout.split()[1] == fast.stdout.split()[1]
