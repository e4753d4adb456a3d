"""Seeded generation of k-card-minimum permutations.

Two modes produce the same law:

``direct``
    draw ``k`` uniform ranks in ``[1, m]`` from the ``m`` remaining cards and
    keep the smallest;
``inverse``
    draw the relative position directly by inverting its tail
    ``P(rank > j) = ((m - j) / m) ** k``.

Randomness comes from a counter-based generator (Philox). Replicate ``i`` of an
experiment with master seed ``s`` uses :func:`derive_seed` ``(s, i)``, so results
do not depend on how replicates are split across workers.
"""
from __future__ import annotations

import io
import json
import struct
from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import Permutation, RelativeSeq

DIRECT = "direct"
INVERSE = "inverse"
_MODE_ALIASES = {
    "direct": DIRECT,
    "direct-draws": DIRECT,
    "inverse": INVERSE,
    "inverse-cdf": INVERSE,
}
# above this k the inverse transform is cheaper than k draws per step
AUTO_INVERSE_ABOVE = 64
# cap on the number of draws materialised at once in direct mode
_CHUNK_DRAWS = 1 << 22


class ConfigError(ValueError):
    """Invalid sampler or experiment configuration."""


def resolve_mode(mode: str | None, k: int) -> str:
    if mode is None or mode == "auto":
        return INVERSE if k > AUTO_INVERSE_ABOVE else DIRECT
    try:
        return _MODE_ALIASES[mode]
    except KeyError:
        raise ConfigError(f"unknown sampling mode {mode!r}; expected one of {sorted(_MODE_ALIASES)}") from None


@dataclass(frozen=True)
class SamplerConfig:
    n: int
    k: int
    mode: str | None = None
    seed: int = 0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ConfigError(f"n must be a positive integer, got {self.n!r}")
        if int(self.k) != self.k or self.k < 1:
            raise ConfigError(f"k must be a positive integer, got {self.k!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError(f"seed must fit in 64 unsigned bits, got {self.seed!r}")
        object.__setattr__(self, "mode", resolve_mode(self.mode, self.k))

    def rng(self) -> np.random.Generator:
        return make_rng(self.seed)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(int(seed)))


def derive_seed(master_seed: int, index: int) -> int:
    """64-bit seed of replicate ``index`` under ``master_seed``."""
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(int(index),))
    lo, hi = ss.generate_state(2, dtype=np.uint32).tolist()
    return (hi << 32) | lo


def deck_sizes(n: int) -> np.ndarray:
    """Deck size ``m = n - t + 1`` for t = 1..n."""
    return np.arange(n, 0, -1, dtype=np.int64)


def draw_ranks(rng: np.random.Generator, n: int, k: int) -> np.ndarray:
    """``(n, k)`` array; row ``t-1`` holds k i.i.d. uniform ranks in ``[1, n-t+1]``."""
    m = deck_sizes(n)
    out = np.empty((n, k), dtype=np.int64)
    rows = max(1, _CHUNK_DRAWS // k)
    for start in range(0, n, rows):
        stop = min(n, start + rows)
        high = m[start:stop, None] + 1
        out[start:stop] = rng.integers(1, high, size=(stop - start, k), dtype=np.int64)
    return out


def _tail(m, j, k):
    return ((m - j) / m) ** k


def inverse_cdf_ranks(rng: np.random.Generator, n: int, k: int) -> np.ndarray:
    """Relative positions drawn by inverse transform of the exact tail law.

    For ``U`` uniform on ``(0, 1]`` the result is the smallest ``j >= 1`` with
    ``((m - j) / m) ** k < U``.
    """
    m = deck_sizes(n).astype(np.float64)
    u = 1.0 - rng.random(n)
    j = m - np.floor(m * u ** (1.0 / k))
    np.clip(j, 1, m, out=j)
    ok = (_tail(m, j, k) < u) & ((j == 1) | (_tail(m, j - 1, k) >= u))
    for i in np.flatnonzero(~ok):
        j[i] = _search_rank(m[i], u[i], k)
    return j.astype(np.int64)


def _search_rank(m: float, u: float, k: int) -> int:
    lo, hi = 1, int(m)
    while lo < hi:
        mid = (lo + hi) // 2
        if _tail(m, mid, k) < u:
            hi = mid
        else:
            lo = mid + 1
    return lo


def _relative_array(n: int, k: int, mode: str, rng: np.random.Generator) -> np.ndarray:
    if mode == DIRECT:
        return draw_ranks(rng, n, k).min(axis=1)
    return inverse_cdf_ranks(rng, n, k)


def sample_relative(cfg: SamplerConfig) -> RelativeSeq:
    """Independent relative positions of one kCM run."""
    return RelativeSeq._trusted(_relative_array(cfg.n, cfg.k, cfg.mode, cfg.rng()))


def sample_kcm(cfg: SamplerConfig) -> Permutation:
    """One kCM permutation; deterministic in ``(seed, mode, n, k)``."""
    return Permutation._trusted(kernels.rel_to_perm(_relative_array(cfg.n, cfg.k, cfg.mode, cfg.rng())))


def sample_relative_batch(n: int, k: int, count: int, seed: int = 0, mode: str | None = None) -> np.ndarray:
    """``(count, n)`` relative sequences from a single stream."""
    mode = resolve_mode(mode, k)
    rng = make_rng(seed)
    if mode == INVERSE:
        m = deck_sizes(n).astype(np.float64)
        u = 1.0 - rng.random((count, n))
        j = m - np.floor(m * u ** (1.0 / k))
        np.clip(j, 1, m, out=j)
        ok = (_tail(m, j, k) < u) & ((j == 1) | (_tail(m, j - 1, k) >= u))
        for r, c in zip(*np.nonzero(~ok)):
            j[r, c] = _search_rank(m[c], u[r, c], k)
        return j.astype(np.int64)
    out = np.empty((count, n), dtype=np.int64)
    high = deck_sizes(n)[None, :, None] + 1
    per = max(1, _CHUNK_DRAWS // (n * k))
    for start in range(0, count, per):
        stop = min(count, start + per)
        draws = rng.integers(1, high, size=(stop - start, n, k), dtype=np.int64)
        out[start:stop] = draws.min(axis=2)
    return out


def sample_kcm_batch(n: int, k: int, count: int, seed: int = 0, mode: str | None = None) -> np.ndarray:
    """``(count, n)`` kCM permutations from a single stream."""
    return kernels.rel_to_perm_rows(np.ascontiguousarray(sample_relative_batch(n, k, count, seed, mode)))


# ---------------------------------------------------------------------------
# draw traces
# ---------------------------------------------------------------------------

_TRACE_MAGIC = b"KCMT"


@dataclass(frozen=True, eq=False)
class DrawTrace:
    """Raw per-step draw ranks, replayable under any strategy."""

    n: int
    k: int
    draws: np.ndarray

    def __post_init__(self):
        d = np.array(self.draws, dtype=np.int64)
        if d.shape != (self.n, self.k):
            raise ConfigError(f"trace shape {d.shape} does not match (n, k) = ({self.n}, {self.k})")
        m = deck_sizes(self.n)[:, None]
        bad = np.argwhere((d < 1) | (d > m))
        if bad.size:
            t, i = bad[0]
            raise ConfigError(f"draw {i + 1} at t={t + 1} has rank {d[t, i]} outside 1..{m[t, 0]}")
        d.setflags(write=False)
        object.__setattr__(self, "draws", d)

    def __eq__(self, other):
        if not isinstance(other, DrawTrace):
            return NotImplemented
        return self.n == other.n and self.k == other.k and np.array_equal(self.draws, other.draws)

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "k": self.k, "draws": self.draws.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "DrawTrace":
        obj = json.loads(text)
        return cls(int(obj["n"]), int(obj["k"]), np.array(obj["draws"], dtype=np.int64).reshape(obj["n"], obj["k"]))

    def to_bytes(self) -> bytes:
        buf = io.BytesIO()
        buf.write(_TRACE_MAGIC)
        buf.write(struct.pack("<QQ", self.n, self.k))
        buf.write(self.draws.astype("<u4").tobytes())
        return buf.getvalue()

    @classmethod
    def from_bytes(cls, blob: bytes) -> "DrawTrace":
        if blob[:4] != _TRACE_MAGIC:
            raise ConfigError("not a kcm trace file")
        n, k = struct.unpack_from("<QQ", blob, 4)
        draws = np.frombuffer(blob, dtype="<u4", offset=20, count=n * k).astype(np.int64)
        return cls(int(n), int(k), draws.reshape(n, k))


def sample_trace(cfg: SamplerConfig) -> DrawTrace:
    """Draw ranks consumed by direct mode under the same seed."""
    return DrawTrace(cfg.n, cfg.k, draw_ranks(cfg.rng(), cfg.n, cfg.k))
