"""Counter-based pseudo-random primitives.

Every random quantity in this package is a pure function of
``(seed, stream, counter)``::

    key  = mix64(seed ^ stream)
    draw = mix64(key + counter * GOLDEN)

where ``mix64`` is the SplitMix64 output finalizer and ``GOLDEN`` is the
64-bit golden-ratio increment.  With ``stream = 0`` the draws for counters
1, 2, ... reproduce the classic sequential SplitMix64 output for state
``key``.  Streams are keyed by sample or path index, so parallel order,
chunk size, and evaluation order never change the numbers produced.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15

_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB

_NP_GOLDEN = np.uint64(GOLDEN)
_NP_M1 = np.uint64(_M1)
_NP_M2 = np.uint64(_M2)


def mix64(z: int) -> int:
    """SplitMix64 finalizer of a 64-bit integer."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def stream_key(seed: int, stream: int = 0) -> int:
    return mix64((seed ^ stream) & MASK64)


def draw(key: int, counter: int) -> int:
    """The ``counter``-th 64-bit draw of the stream with key ``key``."""
    return mix64((key + counter * GOLDEN) & MASK64)


def uniform01(u: int) -> float:
    """Map a 64-bit draw to a double in [0, 1) with 53 random bits."""
    return (u >> 11) * 2.0**-53


def bernoulli_threshold(prob: float) -> int:
    """Integer t with {draw < t} having probability round(prob * 2^64) / 2^64."""
    if not 0.0 <= prob <= 1.0:
        raise ValueError(f"probability out of range: {prob!r}")
    t = Fraction(prob) * (1 << 64)
    n = int(t)
    if t - n >= Fraction(1, 2):
        n += 1
    return min(max(n, 0), 1 << 64)


def mix64_np(z: np.ndarray, scratch: np.ndarray | None = None) -> np.ndarray:
    """Vectorized finalizer; mutates and returns a uint64 array.

    ``scratch`` must match ``z`` in shape and dtype when given; it holds the
    shifted copies so tight loops can avoid three fresh temporaries per call.
    """
    s = np.empty_like(z) if scratch is None else scratch
    np.right_shift(z, np.uint64(30), out=s)
    z ^= s
    z *= _NP_M1
    np.right_shift(z, np.uint64(27), out=s)
    z ^= s
    z *= _NP_M2
    np.right_shift(z, np.uint64(31), out=s)
    z ^= s
    return z


def stream_keys_np(seed: int, streams: np.ndarray) -> np.ndarray:
    return mix64_np(np.uint64(seed & MASK64) ^ streams.astype(np.uint64))


def draw_block(keys: np.ndarray, counters: np.ndarray,
               out: np.ndarray | None = None,
               scratch: np.ndarray | None = None) -> np.ndarray:
    """Draws for every (key, counter) pair as a (len(keys), len(counters)) array.

    ``out`` and ``scratch``, when given, are (len(keys), len(counters)) uint64
    buffers reused instead of allocating; the returned values are the same.
    """
    c = counters.astype(np.uint64)
    c *= _NP_GOLDEN
    if out is None:
        z = keys[:, None] + c[None, :]
    else:
        z = out
        np.add(keys[:, None], c[None, :], out=z)
    return mix64_np(z, scratch)


class CounterStream:
    """Stateful view of one stream, for scalar consumers.

    The state is only the counter position; the values are identical to
    calling :func:`draw` with explicit counters 1, 2, ...
    """

    def __init__(self, seed: int, stream: int = 0):
        self.key = stream_key(seed, stream)
        self.counter = 0

    def next_u64(self) -> int:
        self.counter += 1
        return draw(self.key, self.counter)

    def next_uniform01(self) -> float:
        return uniform01(self.next_u64())

    def next_below(self, bound: int) -> int:
        """Unbiased integer in [0, bound) by block rejection.

        Concatenates enough draws for ``bound.bit_length()`` bits, keeps the
        top bits, rejects values >= bound.  Equivalent to rejection sampling
        the digit string of a uniform point.
        """
        if bound <= 0:
            raise ValueError("bound must be positive")
        bits = (bound - 1).bit_length() if bound > 1 else 1
        words = (bits + 63) // 64
        shift = 64 * words - bits
        while True:
            v = 0
            for _ in range(words):
                v = (v << 64) | self.next_u64()
            v >>= shift
            if v < bound:
                return v
