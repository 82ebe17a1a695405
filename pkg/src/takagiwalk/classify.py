"""Differentiability trichotomy for weighted series sum a_k psi_k.

The tail behavior of the weights settles the pointwise differentiability
of the summed function, under the usual summability of |a_k| * r**(1-k):

* limsup |a_k| > 0: no finite derivative anywhere;
* sum a_k**2 < infinity: absolutely continuous, differentiable a.e.;
* a_k -> 0 with sum a_k**2 = infinity: differentiable almost nowhere.

The probes below are numeric companions, not proofs: partial sums of the
slope series stabilize exactly when the series converges, and difference
quotients along shrinking grid increments blow up in the first regime.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .radix import RadixPoint, _as_fraction
from .sequences import StepSequence
from .takagi import PointLike, psi, psi_plus


class DiffLabel(enum.Enum):
    NOWHERE_FINITE_DERIVATIVE = "nowhere_finite_derivative"
    ABSOLUTELY_CONTINUOUS = "absolutely_continuous"
    AE_NONDIFFERENTIABLE = "ae_nondifferentiable"


@dataclass(frozen=True)
class DifferentiabilityClass:
    """Label plus the tail facts it rests on."""

    label: DiffLabel
    evidence: tuple


def classify_sequence(weights: StepSequence,
                      base: Optional[int] = None) -> DifferentiabilityClass:
    """Place a weight sequence in the differentiability trichotomy.

    ``base`` is only used to confirm the series is defined at all (the
    weighted l1 condition); the label itself never depends on it.
    """
    if base is not None and not weights.is_l1_summable(base):
        raise ValueError(f"weights fail summability for base {base}")
    if weights.limsup_abs_positive:
        return DifferentiabilityClass(
            DiffLabel.NOWHERE_FINITE_DERIVATIVE,
            ("limsup |a_k| > 0",))
    if weights.is_square_summable:
        return DifferentiabilityClass(
            DiffLabel.ABSOLUTELY_CONTINUOUS,
            ("a_k -> 0", "sum a_k**2 < infinity"))
    return DifferentiabilityClass(
        DiffLabel.AE_NONDIFFERENTIABLE,
        ("a_k -> 0", "sum a_k**2 = infinity"))


@dataclass(frozen=True)
class SeriesProbe:
    """Partial sums P_j = sum_{k<=j} a_k psi_plus_k(x) and a Cauchy gauge."""

    partial_sums: np.ndarray
    window_fluctuation: float


def derivative_series_probe(base: int, weights: StepSequence, x: PointLike,
                            n: int) -> SeriesProbe:
    """Convergence diagnostic for the formal slope series at x.

    The gauge is ``max |P_j - P_{n/2}|`` over the second half; it tends to
    zero in probability exactly in the square-summable regime.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    sums = np.zeros(n + 1)
    acc = 0.0
    for k in range(1, n + 1):
        acc += weights.term(k) * psi_plus(base, k, x)
        sums[k] = acc
    half = n // 2
    fluct = float(np.max(np.abs(sums[half + 1:] - sums[half])))
    return SeriesProbe(sums, fluct)


def difference_quotient_probe(base: int, weights: StepSequence,
                              x: PointLike,
                              ells: Sequence[int]) -> np.ndarray:
    """Difference quotients of the weighted series at h = base**-ell.

    Uses enough summands for the quotient of the truncated series to be
    within 1/2 of the true one at the finest scale probed.
    """
    quotients = np.empty(len(ells))
    for i, ell in enumerate(ells):
        h = Fraction(1, base**ell)
        # quotient error from truncation at N is 2 * tail_bound / h
        terms = ell + 3
        while float(weights.weighted_tail_bound(base, terms)) \
                * 2 * base**ell > 0.5:
            terms += 1
        if isinstance(x, RadixPoint) and terms > x.depth + 1:
            terms = x.depth + 1
        total = 0.0
        for k in range(1, terms + 1):
            dk = float(psi(base, k, _as_fraction(x) + h)
                       - psi(base, k, x))
            total += weights.term(k) * dk
        quotients[i] = total / float(h)
    return quotients
