"""Counter-based SplitMix64 stream generator.

The n-th output of stream ``s`` under master seed ``seed`` is a pure
function of ``(seed, s, n)``, so any partition of the index range across
workers reproduces the single-threaded sequence bit for bit.

Definition (all arithmetic mod 2**64)::

    mix(z):  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
             z = (z ^ (z >> 27)) * 0x94D049BB133111EB
             return z ^ (z >> 31)

    key(seed, s) = mix(seed + s * 0xD1B54A32D192ED03)
    raw(seed, s, n) = mix(key(seed, s) + (n + 1) * 0x9E3779B97F4A7C15)
    uniform(seed, s, n) = (raw(seed, s, n) >> 11) * 2**-53      # in [0, 1)

For a fixed key this is exactly SplitMix64 started from state ``key``.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
STREAM_GAMMA = 0xD1B54A32D192ED03
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB

THREADS_ENV = "GNST_THREADS"


def _mix_int(z: int) -> int:
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def stream_key(seed: int, stream: int) -> int:
    return _mix_int((int(seed) + int(stream) * STREAM_GAMMA) & MASK64)


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def raw(seed: int, stream: int, start: int, count: int) -> np.ndarray:
    """Raw 64-bit outputs ``start .. start+count-1`` of one stream."""
    key = np.uint64(stream_key(seed, stream))
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return _mix(key + idx * np.uint64(GAMMA))


def uniform(seed: int, stream: int, start: int, count: int) -> np.ndarray:
    """Doubles in [0, 1) with 53 random bits each."""
    return (raw(seed, stream, start, count) >> np.uint64(11)).astype(np.float64) * 2.0**-53


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def partitioned(fn, total: int, workers: int | None = None):
    """Evaluate ``fn(start, count)`` over contiguous chunks of ``range(total)``.

    Returns the chunk results in index order, so reductions are deterministic
    regardless of the worker count.
    """
    workers = default_workers() if workers is None else max(1, workers)
    bounds = np.linspace(0, total, workers + 1).astype(int)
    chunks = [(int(a), int(b - a)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
    if workers == 1 or len(chunks) <= 1:
        return [fn(a, n) for a, n in chunks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda c: fn(*c), chunks))
