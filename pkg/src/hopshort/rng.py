"""Deterministic counter-based randomness.

All random choices in this package come from SplitMix64 evaluated on derived
keys. A draw is a pure function of (seed, stream, counters...), which makes
every algorithm replayable bit-for-bit, lets subproblems split off child
seeds without shared state, and keeps the scalar, vectorized, and compiled
implementations in exact agreement.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MUL1 = 0xBF58476D1CE4E5B9
_MUL2 = 0x94D049BB133111EB

# Stream tags keep unrelated draw families statistically independent even
# when their counter values coincide.
STREAM_SAMPLE = 1  # shortcutter election per vertex
STREAM_CELL = 2  # child seed per partition cell
STREAM_FRINGE = 3  # child seed per fringe ring
STREAM_REP = 4  # repetition index in the whp wrapper
STREAM_RUN = 5  # (outer, inner) run inside the diameter loop
STREAM_KAPPA = 6  # kappa draw attempts
STREAM_GEN = 7  # graph generators
STREAM_FLOOD = 8  # arrival scheduling in the flood simulator
STREAM_TRIAL = 9  # Monte Carlo trials in tests
STREAM_SOURCE = 10  # source sampling (diameter estimation, skeleton)


def _finalize(z: int) -> int:
    z = ((z ^ (z >> 30)) * _MUL1) & _MASK
    z = ((z ^ (z >> 27)) * _MUL2) & _MASK
    return z ^ (z >> 31)


def derive(seed: int, *parts: int) -> int:
    """Fold integer parts into a new 64-bit seed.

    One SplitMix64 step per part: advance by the golden-ratio increment,
    xor the part in, finalize. Order-sensitive, so derive(s, a, b) and
    derive(s, b, a) are unrelated streams.
    """
    h = seed & _MASK
    for p in parts:
        h = (h + _GAMMA) & _MASK
        h = _finalize(h ^ (p & _MASK))
    return h


def u64(seed: int, *parts: int) -> int:
    """A single uniform 64-bit draw for the given key."""
    return derive(seed, *parts)


def u64_at(seed: int, stream: int, ids: np.ndarray) -> np.ndarray:
    """u64(seed, stream, i) evaluated at arbitrary counters i, vectorized.

    Bit-identical to [u64(seed, stream, int(i)) for i in ids]; used where
    the counters are vertex ids rather than a dense range.
    """
    # derive(seed, stream, i) expands to one SplitMix64 step per part; the
    # step for `stream` depends only on (seed, stream) and is hoisted out
    # of the vector op.
    h1 = (derive(seed, stream) + _GAMMA) & _MASK
    z = np.uint64(h1) ^ ids.astype(np.uint64)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MUL1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MUL2)
    return z ^ (z >> np.uint64(31))


def u64_vector(seed: int, stream: int, count: int) -> np.ndarray:
    """Uniform 64-bit draws for counters 0..count-1, vectorized."""
    return u64_at(seed, stream, np.arange(count, dtype=np.uint64))


def threshold_for(p: float) -> int:
    """Inclusion threshold t such that P[u64 < t] = p up to 2^-64.

    p >= 1 maps to 2^64, which no draw reaches, so callers short-circuit
    full inclusion before comparing.
    """
    if p >= 1.0:
        return 1 << 64
    if p <= 0.0:
        return 0
    return int(p * 2.0**64)


def bernoulli_mask(seed: int, stream: int, count: int, p: float) -> np.ndarray:
    """Boolean inclusion mask over counters 0..count-1 with probability p."""
    if p >= 1.0:
        return np.ones(count, dtype=bool)
    if p <= 0.0:
        return np.zeros(count, dtype=bool)
    thr = threshold_for(p)
    return u64_vector(seed, stream, count) < np.uint64(thr)


def uniform_int(seed: int, stream: int, lo: int, hi: int) -> int:
    """Uniform integer in [lo, hi], exact via rejection sampling.

    The rejection loop is deterministic: attempt i uses counter i. Width
    must fit in 64 bits, which holds for every kappa interval this package
    draws from.
    """
    if hi < lo:
        raise ValueError(f"empty interval [{lo}, {hi}]")
    width = hi - lo + 1
    if width > 1 << 64:
        raise ValueError("interval wider than 64 bits")
    limit = ((1 << 64) // width) * width
    attempt = 0
    while True:
        u = derive(seed, stream, attempt)
        if u < limit:
            return lo + (u % width)
        attempt += 1


def shuffle_order(seed: int, stream: int, items: np.ndarray, *parts: int) -> np.ndarray:
    """Deterministic pseudo-random ordering of items.

    Sorts by the per-item draw u64(seed, stream, *parts, item); ties (never
    observed, probability ~2^-64) fall back to item order via stable sort.
    """
    key_seed = derive(seed, stream, *parts)
    idx = items.astype(np.uint64)
    h1 = (key_seed + _GAMMA) & _MASK
    z = np.uint64(h1) ^ idx
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MUL1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MUL2)
    keys = z ^ (z >> np.uint64(31))
    return items[np.argsort(keys, kind="stable")]
