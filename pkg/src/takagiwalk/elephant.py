"""Random walks of +-1 steps that remember only the previous step.

The first step is symmetric; every later step repeats its predecessor with
probability ``p`` and flips with probability ``1 - p``.  The step sequence
is then a two-state Markov chain whose closed-form laws this module exposes:
powers of the transition matrix, the correlation ``E[X_k X_{k+j}] =
(2p-1)**j``, the spectral density of the stationary chain, and exact second
moments of weighted partial sums.

Walks of base ``r`` slope sequences fall in this family with ``p = 1/2``
for even ``r`` and ``p = (r+1) / (2r)`` for odd ``r``.

Simulation is vectorized and counter-based: path ``i`` of ``seed`` consumes
the draw stream ``(seed, i)``, so results are independent of block sizes
and of how many paths run together.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

import numpy as np

from .rng import bernoulli_threshold, draw_block, stream_keys_np
from .sequences import StepSequence


@dataclass(frozen=True)
class MemoryParameter:
    """Repeat probability p in (0, 1) with its derived constants."""

    p: float

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"p must lie strictly in (0, 1), got {self.p}")

    @property
    def alpha(self) -> float:
        """Step correlation 2p - 1."""
        return 2.0 * self.p - 1.0

    @property
    def K(self) -> float:
        """Sandwich constant max(p, 1-p) / min(p, 1-p)."""
        return max(self.p / (1.0 - self.p), (1.0 - self.p) / self.p)

    @property
    def variance_factor(self) -> float:
        """Asymptotic variance slope p / (1 - p) of the walk."""
        return self.p / (1.0 - self.p)


def memory_param_of_base(base: int) -> MemoryParameter:
    """Repeat probability of the slope chain of base ``base``."""
    if base < 2:
        raise ValueError("base must be >= 2")
    if base % 2 == 0:
        return MemoryParameter(0.5)
    return MemoryParameter((base + 1) / (2 * base))


def _as_p(p) -> float:
    return p.p if isinstance(p, MemoryParameter) else float(p)


def transition_power(p, m: int) -> np.ndarray:
    """m-th power of the step transition matrix, states ordered (+1, -1)."""
    if m < 0:
        raise ValueError("m must be >= 0")
    a = MemoryParameter(_as_p(p)).alpha ** m if m > 0 else 1.0
    half = 0.5
    return np.array([[half + half * a, half - half * a],
                     [half - half * a, half + half * a]])


def correlation(p, j: int) -> float:
    """E[X_k X_{k+j}] = (2p - 1)**j, with the j = 0 convention 1."""
    if j < 0:
        raise ValueError("j must be >= 0")
    if j == 0:
        return 1.0
    return MemoryParameter(_as_p(p)).alpha ** j


def spectral_density(p, lam) -> np.ndarray:
    """Spectral density (1/2pi)(1-a^2) / (1 - 2a cos(lam) + a^2), a = 2p-1."""
    a = MemoryParameter(_as_p(p)).alpha
    lam = np.asarray(lam, dtype=float)
    out = (1.0 - a * a) / (2.0 * np.pi * (1.0 - 2.0 * a * np.cos(lam) + a * a))
    return out if out.shape else float(out)


def correlation_by_quadrature(p, j: int, nodes: int = 8192) -> float:
    """integral of cos(j lam) * density over [-pi, pi].

    Periodic trapezoid rule; the integrand is analytic and periodic, so the
    error decays geometrically in ``nodes``.
    """
    lam = -np.pi + 2.0 * np.pi * np.arange(nodes) / nodes
    vals = np.cos(j * lam) * spectral_density(p, lam)
    return float(vals.sum() * 2.0 * np.pi / nodes)


def exact_second_moment(p, weights: StepSequence, m: int, n: int) -> float:
    """E[(S_n - S_m)**2] for S_j = sum_{k<=j} a_k X_k, in closed form.

    Uses the correlation law: the double sum collapses to a single pass
    with the running convolution c_l = sum_{m<k<l} a_k * alpha**(l-k).
    """
    if not 0 <= m <= n:
        raise ValueError("need 0 <= m <= n")
    if m == n:
        return 0.0
    a = MemoryParameter(_as_p(p)).alpha
    w = weights.terms_array(m + 1, n + 1)
    total = float(np.dot(w, w))
    c, prev = 0.0, float(w[0])
    for wl in w[1:]:
        # c = sum_{m < k < l} a_k * alpha**(l-k) at the current index l
        c = a * (c + prev)
        total += 2.0 * float(wl) * c
        prev = float(wl)
    return total


class Localization(enum.Enum):
    """Almost-sure behavior of the weighted step series sum a_k X_k."""

    CONVERGES = "converges"
    DIVERGES = "diverges"


def localization_class(weights: StepSequence) -> Localization:
    """Converges (a.s. and in L2) iff the weights are square summable."""
    if weights.is_square_summable:
        return Localization.CONVERGES
    return Localization.DIVERGES


# ---------------------------------------------------------------------------
# simulation

# step block and path chunk sized so working arrays stay cache friendly
_BLOCK = 256
_PATH_CHUNK = 2048


def _path_chunks(paths: int):
    for p0 in range(0, paths, _PATH_CHUNK):
        yield p0, min(_PATH_CHUNK, paths - p0)


def iter_sign_blocks(p, n: int, paths: int, seed: int,
                     first_stream: int = 0,
                     block: int = _BLOCK) -> Iterator[tuple[int, np.ndarray]]:
    """Yield (k_offset, signs) with signs[i, j] = step k_offset+j+1 of path i.

    Path ``i`` reads counters 1..n of stream ``first_stream + i``; counter k
    decides step k, so the steps are reproducible independently of ``block``
    and ``paths``.
    """
    mp = MemoryParameter(_as_p(p))
    thr_keep = np.uint64(min(bernoulli_threshold(mp.p), (1 << 64) - 1))
    thr_first = np.uint64(1 << 63)
    keys = stream_keys_np(seed, np.arange(first_stream, first_stream + paths))
    carry = np.zeros(paths, dtype=np.uint8)
    # draw matrix, shift scratch, flip and parity planes reused every block;
    # only the yielded sign array is freshly allocated, so callers may keep it
    zbuf = np.empty((paths, block), dtype=np.uint64)
    sbuf = np.empty_like(zbuf)
    fbuf = np.empty((paths, block), dtype=np.uint8)
    cbuf = np.empty((paths, block), dtype=np.uint8)
    for k_off in range(0, n, block):
        b = min(block, n - k_off)
        z = zbuf[:, :b]
        flips = fbuf[:, :b]
        cs = cbuf[:, :b]
        counters = np.arange(k_off + 1, k_off + b + 1, dtype=np.uint64)
        draw_block(keys, counters, out=z, scratch=sbuf[:, :b])
        thr = np.full(b, thr_keep, dtype=np.uint64)
        if k_off == 0:
            thr[0] = thr_first
        np.greater_equal(z, thr[None, :], out=flips)
        # uint8 cumsum wraps mod 256; parity survives because 256 is even
        np.cumsum(flips, axis=1, dtype=np.uint8, out=cs)
        cs += carry[:, None]
        cs &= 1
        carry = cs[:, -1].copy()
        signs = np.empty((paths, b), dtype=np.uint8)
        np.left_shift(cs, 1, out=signs)
        np.subtract(1, signs, out=signs)
        # 1 - 2*parity mod 256 is 1 or 255, which the int8 view reads as +-1
        yield k_off, signs.view(np.int8)


@dataclass(frozen=True)
class WalkPath:
    """One realization: steps of +-1 and their prefix sums T_0..T_n."""

    p: float
    seed: int
    stream: int
    steps: np.ndarray
    sums: np.ndarray

    @property
    def n(self) -> int:
        return len(self.steps)


def simulate(p, n: int, seed: int, stream: int = 0) -> WalkPath:
    """One walk of n steps on the draw stream ``(seed, stream)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    pf = _as_p(p)
    MemoryParameter(pf)
    steps = np.empty(n, dtype=np.int8)
    for k_off, signs in iter_sign_blocks(pf, n, 1, seed, first_stream=stream):
        steps[k_off:k_off + signs.shape[1]] = signs[0]
    sums = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(steps, dtype=np.int64, out=sums[1:])
    return WalkPath(pf, seed, stream, steps, sums)


def weighted_simulate(p, weights: StepSequence, n: int, seed: int,
                      stream: int = 0) -> np.ndarray:
    """Partial sums S_0..S_n of sum a_k X_k along one walk.

    Reads the same draw stream as :func:`simulate`, so constant weights 1
    reproduce the plain walk sums exactly.
    """
    path = simulate(p, n, seed, stream)
    w = weights.terms_array(1, n + 1)
    out = np.zeros(n + 1)
    np.cumsum(w * path.steps, out=out[1:])
    return out


def final_positions(p, n: int, paths: int, seed: int) -> np.ndarray:
    """T_n for paths on streams 0..paths-1, as int64."""
    total = np.zeros(paths, dtype=np.int64)
    for p0, pc in _path_chunks(paths):
        acc = np.zeros(pc, dtype=np.int64)
        for _, signs in iter_sign_blocks(p, n, pc, seed, first_stream=p0):
            acc += signs.sum(axis=1, dtype=np.int64)
        total[p0:p0 + pc] = acc
    return total


def bridge_sums(p, weights: StepSequence, m: int, n: int, paths: int,
                seed: int) -> np.ndarray:
    """S_n - S_m = sum_{m<k<=n} a_k X_k per path, as float64."""
    if not 0 <= m < n:
        raise ValueError("need 0 <= m < n")
    total = np.zeros(paths)
    for p0, pc in _path_chunks(paths):
        acc = np.zeros(pc)
        for k_off, signs in iter_sign_blocks(p, n, pc, seed,
                                             first_stream=p0):
            b = signs.shape[1]
            lo = max(m - k_off, 0)
            if lo >= b:
                continue
            w = weights.terms_array(k_off + lo + 1, k_off + b + 1)
            acc += signs[:, lo:] @ w
        total[p0:p0 + pc] = acc
    return total


def running_max_statistic(p, n_max: int, paths: int, seed: int,
                          n_min: int = 100) -> np.ndarray:
    """Per path, max over n in [n_min, n_max] of T_n / sqrt(2 n loglog n)."""
    if n_min < 3 or n_max <= n_min:
        raise ValueError("need 3 <= n_min < n_max")
    best = np.full(paths, -np.inf)
    for p0, pc in _path_chunks(paths):
        chunk_best = np.full(pc, -np.inf)
        carry = np.zeros(pc, dtype=np.int64)
        for k_off, signs in iter_sign_blocks(p, n_max, pc, seed,
                                             first_stream=p0):
            b = signs.shape[1]
            sums = signs.cumsum(axis=1, dtype=np.int64)
            sums += carry[:, None]
            carry = sums[:, -1].copy()
            lo = max(n_min - (k_off + 1), 0)
            if lo >= b:
                continue
            ns = np.arange(k_off + lo + 1, k_off + b + 1, dtype=float)
            inv = 1.0 / np.sqrt(2.0 * ns * np.log(np.log(ns)))
            stat = sums[:, lo:] * inv[None, :]
            np.maximum(chunk_best, stat.max(axis=1), out=chunk_best)
        best[p0:p0 + pc] = chunk_best
    return best
