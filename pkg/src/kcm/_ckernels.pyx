# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops. Mirrors ``kcm._pykernels`` function for function.

Every routine takes and returns 1-based card values in int64 arrays and
assumes its input was validated by the caller.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport pow, fabs

cnp.import_array()

ctypedef cnp.int64_t i64


# ---------------------------------------------------------------------------
# binary-indexed tree over presence flags, 1-based
# ---------------------------------------------------------------------------

cdef inline void _bit_fill(i64[::1] tree, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i
    for i in range(1, n + 1):
        tree[i] = i & (-i)


cdef inline void _bit_add(i64[::1] tree, Py_ssize_t n, Py_ssize_t i, i64 delta) noexcept nogil:
    while i <= n:
        tree[i] += delta
        i += i & (-i)


cdef inline i64 _bit_prefix(i64[::1] tree, Py_ssize_t i) noexcept nogil:
    cdef i64 s = 0
    while i > 0:
        s += tree[i]
        i -= i & (-i)
    return s


cdef inline Py_ssize_t _bit_select(i64[::1] tree, Py_ssize_t n, Py_ssize_t top, i64 rank) noexcept nogil:
    # smallest index whose prefix count reaches `rank`; `top` is the highest power of two <= n
    cdef Py_ssize_t pos = 0
    cdef Py_ssize_t step = top
    cdef Py_ssize_t nxt
    while step > 0:
        nxt = pos + step
        if nxt <= n and tree[nxt] < rank:
            pos = nxt
            rank -= tree[nxt]
        step >>= 1
    return pos + 1


cdef inline Py_ssize_t _top_bit(Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t top = 1
    while top * 2 <= n:
        top *= 2
    return top


# ---------------------------------------------------------------------------
# permutation <-> relative positions
# ---------------------------------------------------------------------------

def rel_to_perm(const i64[::1] rel):
    cdef Py_ssize_t n = rel.shape[0]
    cdef Py_ssize_t t, card
    cdef Py_ssize_t top = _top_bit(n) if n > 0 else 0
    out = np.empty(n, dtype=np.int64)
    cdef i64[::1] perm = out
    cdef i64[::1] tree = np.zeros(n + 1, dtype=np.int64)
    with nogil:
        _bit_fill(tree, n)
        for t in range(n):
            card = _bit_select(tree, n, top, rel[t])
            perm[t] = card
            _bit_add(tree, n, card, -1)
    return out


def rel_to_perm_rows(const i64[:, ::1] rels):
    cdef Py_ssize_t rows = rels.shape[0]
    cdef Py_ssize_t n = rels.shape[1]
    cdef Py_ssize_t r, t, card
    cdef Py_ssize_t top = _top_bit(n) if n > 0 else 0
    out = np.empty((rows, n), dtype=np.int64)
    cdef i64[:, ::1] perms = out
    cdef i64[::1] tree = np.zeros(n + 1, dtype=np.int64)
    with nogil:
        for r in range(rows):
            _bit_fill(tree, n)
            for t in range(n):
                card = _bit_select(tree, n, top, rels[r, t])
                perms[r, t] = card
                _bit_add(tree, n, card, -1)
    return out


def perm_to_rel(const i64[::1] perm):
    cdef Py_ssize_t n = perm.shape[0]
    cdef Py_ssize_t t
    out = np.empty(n, dtype=np.int64)
    cdef i64[::1] rel = out
    cdef i64[::1] tree = np.zeros(n + 1, dtype=np.int64)
    with nogil:
        _bit_fill(tree, n)
        for t in range(n):
            rel[t] = _bit_prefix(tree, perm[t])
            _bit_add(tree, n, perm[t], -1)
    return out


# ---------------------------------------------------------------------------
# inversions and LIS
# ---------------------------------------------------------------------------

def count_inversions(const i64[::1] perm):
    cdef Py_ssize_t n = perm.shape[0]
    cdef Py_ssize_t t
    cdef i64 total = 0
    cdef i64[::1] tree = np.zeros(n + 1, dtype=np.int64)
    with nogil:
        for t in range(n):
            # earlier cards greater than perm[t]
            total += t - _bit_prefix(tree, perm[t])
            _bit_add(tree, n, perm[t], 1)
    return int(total)


def inversion_profile(const i64[::1] perm):
    cdef Py_ssize_t n = perm.shape[0]
    cdef Py_ssize_t t
    out = np.zeros(n, dtype=np.int64)
    cdef i64[::1] prof = out
    cdef i64[::1] tree = np.zeros(n + 1, dtype=np.int64)
    with nogil:
        for t in range(n - 1, -1, -1):
            prof[t] = _bit_prefix(tree, perm[t] - 1)
            _bit_add(tree, n, perm[t], 1)
    return out


def lis_length(const i64[::1] perm):
    cdef Py_ssize_t n = perm.shape[0]
    cdef Py_ssize_t t, lo, hi, mid, size = 0
    cdef i64 x
    cdef i64[::1] tails = np.empty(n + 1, dtype=np.int64)
    with nogil:
        for t in range(n):
            x = perm[t]
            lo = 0
            hi = size
            while lo < hi:
                mid = (lo + hi) >> 1
                if tails[mid] < x:
                    lo = mid + 1
                else:
                    hi = mid
            tails[lo] = x
            if lo == size:
                size += 1
    return int(size)


# ---------------------------------------------------------------------------
# greedy increasing-subsequence construction
# ---------------------------------------------------------------------------

def greedy_walk(const i64[::1] perm, i64 target):
    cdef Py_ssize_t n = perm.shape[0]
    cdef Py_ssize_t top = _top_bit(n) if n > 0 else 0
    cdef i64[::1] tree = np.zeros(n + 1, dtype=np.int64)
    cdef i64[::1] stops = np.empty(n, dtype=np.int64)
    cdef i64[::1] picked = np.empty(n, dtype=np.int64)
    cdef i64[::1] a_out = np.empty(n, dtype=np.int64)
    cdef i64[::1] b_out = np.empty(n, dtype=np.int64)
    cdef Py_ssize_t m = 0, t = 0
    cdef i64 c = 0, card, upper, r0, remaining = n, b, rplus
    if n == 0:
        return (np.empty(0, np.int64),) * 4
    with nogil:
        _bit_fill(tree, n)
        while True:
            r0 = _bit_prefix(tree, c)
            if r0 + target < remaining:
                upper = _bit_select(tree, n, top, r0 + target)
            else:
                upper = _bit_select(tree, n, top, remaining)
            b = 0
            while True:
                card = perm[t]
                t += 1
                if c < card <= upper:
                    a_out[m] = _bit_prefix(tree, card) - r0
                    _bit_add(tree, n, card, -1)
                    remaining -= 1
                    break
                if card > c:
                    b += 1
                _bit_add(tree, n, card, -1)
                remaining -= 1
            stops[m] = t
            picked[m] = card
            b_out[m] = b
            m += 1
            c = card
            rplus = remaining - _bit_prefix(tree, c)
            if rplus < target:
                break
    return (
        np.asarray(stops[:m]).copy(),
        np.asarray(picked[:m]).copy(),
        np.asarray(a_out[:m]).copy(),
        np.asarray(b_out[:m]).copy(),
    )


# ---------------------------------------------------------------------------
# exact moments of the per-step inversion counts
# ---------------------------------------------------------------------------

cdef inline void _neumaier(double* s, double* comp, double x) noexcept nogil:
    cdef double t = s[0] + x
    if fabs(s[0]) >= fabs(x):
        comp[0] += (s[0] - t) + x
    else:
        comp[0] += (x - t) + s[0]
    s[0] = t


cdef void _deck_sums(i64 m, double k, double* e1, double* e2) noexcept nogil:
    # e1 = sum_{tau=1}^{m-1} (tau/m)^k ; e2 = sum_tau (m-1-tau) (tau/m)^k
    cdef double s1 = 0.0, c1 = 0.0, s2 = 0.0, c2 = 0.0, p
    cdef double dm = <double>m
    cdef i64 tau
    for tau in range(m - 1, 0, -1):
        p = pow(<double>tau / dm, k)
        _neumaier(&s1, &c1, p)
        _neumaier(&s2, &c2, <double>(m - 1 - tau) * p)
        # remaining terms are bounded by tau * p each weighted by <= m
        if p * dm * dm < 1e-18 * (s1 + c1):
            break
    e1[0] = s1 + c1
    e2[0] = s2 + c2


def deck_moments(i64 m, i64 k):
    """(E, E[X^2]) of the inversion count contributed by a pick from an m-card deck."""
    cdef double e1 = 0.0, e2 = 0.0
    if m <= 1:
        return 0.0, 0.0
    _deck_sums(m, <double>k, &e1, &e2)
    return e1, e1 + 2.0 * e2


def total_moments(i64 n, i64 k):
    cdef double sm = 0.0, cm = 0.0, sv = 0.0, cv = 0.0
    cdef double e1 = 0.0, e2 = 0.0, var
    cdef i64 m
    with nogil:
        for m in range(2, n + 1):
            _deck_sums(m, <double>k, &e1, &e2)
            var = e1 + 2.0 * e2 - e1 * e1
            _neumaier(&sm, &cm, e1)
            _neumaier(&sv, &cv, var)
    return sm + cm, sv + cv
