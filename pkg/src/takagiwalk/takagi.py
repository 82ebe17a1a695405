"""Takagi-van der Waerden series in exact arithmetic.

With ``d`` the distance to the nearest integer and ``r >= 2`` an integer
base, the summands are ``psi_k(x) = r**(1-k) * d(r**(k-1) * x)`` and the
function is ``f_r = sum_k psi_k``.  Everything here works on exact
rationals; for a :class:`~takagiwalk.radix.RadixPoint` of depth ``D`` the
summands vanish for ``k > D + 1``, so increments and tails are finite sums
evaluated without rounding.

The one-sided slope of ``psi_k`` is ``+1`` where the scaled fractional part
lies in ``[0, 1/2)`` and ``-1`` otherwise; the slope partial sums form the
derivative walk ``s_n``.  For an increment ``h`` with scale index ``m`` the
exact split

    f(x + h) - f(x) = h * s_m(x) + defect + tail

holds, with the defect supported on ``k0_eff < k <= m`` and bounded by
``2 * h * (m - k0_eff)``, and the tail over ``k > m`` bounded by
``h * r**2 / (r - 1)``.  ``k0_eff`` is the digit agreement depth ``k0`` for
even bases and ``min(k0, k0_hat)`` for odd ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .radix import (DepthExhaustedError, RadixPoint, _as_fraction,
                    digit_match_depth, dist_to_int, hat_digit_match_depth,
                    scale_index)
from .sequences import StepSequence

PointLike = Union[RadixPoint, Fraction, int]


@dataclass(frozen=True)
class SeriesTruncation:
    """Truncation of the series after ``terms`` summands."""

    base: int
    terms: int

    def __post_init__(self):
        if self.base < 2 or self.terms < 1:
            raise ValueError("need base >= 2 and terms >= 1")

    @property
    def tail_bound(self) -> Fraction:
        """Upper bound on the discarded mass, ``sup sum_{k>N} psi_k``."""
        r, n = self.base, self.terms
        return Fraction(r, 2 * (r - 1)) * Fraction(1, r) ** n

    @classmethod
    def for_tolerance(cls, base: int,
                      tol=Fraction(1, 2**40)) -> "SeriesTruncation":
        n = 1
        while cls(base, n).tail_bound > tol:
            n += 1
        return cls(base, n)


def _frac_part(q: Fraction) -> Fraction:
    return q - (q.numerator // q.denominator)


def _guard_depth(x: PointLike, k: int):
    if isinstance(x, RadixPoint) and k > x.depth + 1:
        raise DepthExhaustedError(
            f"summand {k} needs digits beyond depth {x.depth}")


def _is_native(base: int, x: PointLike) -> bool:
    return isinstance(x, RadixPoint) and x.base == base


def _summand_numerators(x: RadixPoint, k_from: int, k_to: int) -> list[int]:
    """Numerators of psi_k(x) over base**depth for k in [k_from, k_to]."""
    r = x.base
    p = r ** (x.depth - k_from + 1)
    out = []
    for _ in range(k_from, k_to + 1):
        fr = x.mantissa % p
        out.append(min(fr, p - fr))
        p //= r
    return out


def psi(base: int, k: int, x: PointLike) -> Fraction:
    """The k-th summand ``r**(1-k) * d(r**(k-1) * x)``, exact."""
    if k < 1:
        raise ValueError("k must be >= 1")
    _guard_depth(x, k)
    if _is_native(base, x):
        return Fraction(_summand_numerators(x, k, k)[0], base**x.depth)
    y = _as_fraction(x) * base ** (k - 1)
    return dist_to_int(y) * Fraction(1, base) ** (k - 1)


def psi_plus(base: int, k: int, x: PointLike) -> int:
    """Right-hand slope of the k-th summand, +1 or -1."""
    if k < 1:
        raise ValueError("k must be >= 1")
    _guard_depth(x, k)
    if _is_native(base, x):
        p = base ** (x.depth - k + 1)
        return 1 if 2 * (x.mantissa % p) < p else -1
    fr = _frac_part(_as_fraction(x) * base ** (k - 1))
    return 1 if 2 * fr < 1 else -1


@dataclass(frozen=True)
class DerivativeWalkState:
    """Slopes of the first n summands at a fixed point, and their sum."""

    base: int
    n: int
    signs: tuple
    partial_sum: int

    def prefix_sum(self, j: int) -> int:
        """s_j for 0 <= j <= n."""
        return int(sum(self.signs[:j]))


def derivative_walk(base: int, x: PointLike, n: int) -> DerivativeWalkState:
    """Signs ``psi_plus(base, k, x)`` for k = 1..n and their sum."""
    if n < 0:
        raise ValueError("n must be >= 0")
    signs = []
    if _is_native(base, x):
        if n > x.depth:
            raise DepthExhaustedError(
                f"walk of length {n} exceeds depth {x.depth}")
        p = base**x.depth
        u = x.mantissa % p
        for _ in range(n):
            signs.append(1 if 2 * u < p else -1)
            u = (u * base) % p
    else:
        y = _frac_part(_as_fraction(x))
        for _ in range(n):
            signs.append(1 if 2 * y < 1 else -1)
            y = _frac_part(y * base)
    return DerivativeWalkState(base, n, tuple(signs), int(sum(signs)))


def eval_f(base: int, x: PointLike,
           terms: Optional[int] = None) -> tuple[Fraction, Fraction]:
    """Partial sum of the series and a bound on the discarded tail.

    Returns ``(value, tail_bound)`` with ``value <= f_r(x) <= value +
    tail_bound``.  The default number of terms pushes the bound below
    2**-40.
    """
    if terms is None:
        terms = SeriesTruncation.for_tolerance(base).terms
    trunc = SeriesTruncation(base, terms)
    if _is_native(base, x):
        if terms > x.depth + 1:
            raise DepthExhaustedError(
                f"{terms} terms exceed depth {x.depth} + 1")
        nums = _summand_numerators(x, 1, terms)
        return Fraction(sum(nums), base**x.depth), trunc.tail_bound
    value = Fraction(0)
    y = _as_fraction(x)
    for k in range(1, terms + 1):
        value += dist_to_int(y) * Fraction(1, base) ** (k - 1)
        y *= base
    return value, trunc.tail_bound


def eval_f_weighted(base: int, weights: StepSequence, x: PointLike,
                    terms: int) -> tuple:
    """Partial sum of ``sum_k a_k psi_k(x)`` and a certified tail bound.

    Exact when the weight family is; otherwise the value is a float and the
    bound carries a documented rounding inflation.
    """
    if not weights.is_l1_summable(base):
        raise ValueError("weights fail the summability condition "
                         "sum |a_k| * base**(1-k) < infinity")
    bound = weights.weighted_tail_bound(base, terms)
    if weights.is_exact:
        value = Fraction(0)
        for k in range(1, terms + 1):
            value += weights.term_exact(k) * psi(base, k, x)
        return value, bound
    value = 0.0
    for k in range(1, terms + 1):
        value += weights.term(k) * float(psi(base, k, x))
    return value, float(bound)


@dataclass(frozen=True)
class Enclosure:
    """Certified interval [low, high]."""

    low: Fraction
    high: Fraction

    @property
    def width(self) -> Fraction:
        return self.high - self.low

    def contains(self, q) -> bool:
        return self.low <= q <= self.high


def functional_eq_residual(base: int, x: PointLike,
                           terms: Optional[int] = None) -> Enclosure:
    """Enclosure of ``f(r x mod 1) - r f(x) + r d(x)``, which is zero.

    Both evaluations are truncated at ``terms`` summands; the enclosure
    accounts for both discarded tails, so its width is
    ``(base + 1) * tail_bound``.
    """
    if terms is None:
        terms = SeriesTruncation.for_tolerance(base).terms
    if _is_native(base, x):
        if x.integer_part != 0:
            raise ValueError("x must lie in [0, 1)")
        big = base**x.depth
        scaled = x.with_mantissa((x.mantissa * base) % big)
    else:
        xf = _as_fraction(x)
        if not 0 <= xf < 1:
            raise ValueError("x must lie in [0, 1)")
        scaled = _frac_part(xf * base)
    v_scaled, tail = eval_f(base, scaled, terms)
    v_x, _ = eval_f(base, x, terms)
    center = v_scaled - base * v_x + base * dist_to_int(x)
    return Enclosure(center - base * tail, center + tail)


def is_linear_on(base: int, k: int, x: PointLike, h) -> bool:
    """Whether x and x+h lie on one slope piece of the k-th summand.

    True means ``psi_k(x+h) - psi_k(x) == h * psi_plus(base, k, x)``
    exactly.  The digit agreement depths guarantee this for every
    ``k <= k0_eff``.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    hf = _as_fraction(h)
    if _is_native(base, x) and k <= x.depth + 1:
        scaled = hf * base**x.depth
        if scaled.denominator == 1:
            p = base ** (x.depth - k + 1)
            return (2 * x.mantissa) // p == \
                (2 * (x.mantissa + scaled.numerator)) // p
    y = _as_fraction(x) * base ** (k - 1)
    yh = (_as_fraction(x) + hf) * base ** (k - 1)
    return (2 * y.numerator) // y.denominator == \
        (2 * yh.numerator) // yh.denominator


def total_increment(x: RadixPoint, h) -> Fraction:
    """Exact ``f(x+h) - f(x)`` for a grid point and representable h."""
    hf = _as_fraction(h)
    big = x.base**x.depth
    scaled = hf * big
    if scaled.denominator != 1:
        raise ValueError(f"{h} is not representable at depth {x.depth}")
    shifted = x.with_mantissa(x.mantissa + scaled.numerator)
    n1 = _summand_numerators(x, 1, x.depth + 1)
    n2 = _summand_numerators(shifted, 1, x.depth + 1)
    return Fraction(sum(n2) - sum(n1), big)


@dataclass(frozen=True)
class IncrementDecomposition:
    """Exact split of one increment into walk, defect, and tail parts.

    ``tail`` is the exact sum of the tail summands kept (through
    ``tail_terms``); adding ``tail_halfwidth`` on either side encloses the
    full tail.  ``increment`` is the exact increment of the represented
    rational.
    """

    base: int
    h: Fraction
    m: int
    k0: int
    k0_hat: int
    k0_eff: int
    main: Fraction
    defect: Fraction
    tail: Fraction
    tail_halfwidth: Fraction
    defect_bound: Fraction
    tail_bound: Fraction
    increment: Fraction

    @property
    def low(self) -> Fraction:
        return self.main + self.defect + self.tail - self.tail_halfwidth

    @property
    def high(self) -> Fraction:
        return self.main + self.defect + self.tail + self.tail_halfwidth


def increment_decomposition(x: RadixPoint, h,
                            tail_terms: Optional[int] = None
                            ) -> IncrementDecomposition:
    """Split ``f(x+h) - f(x)`` as main walk term + defect + tail, exactly.

    Requires ``x`` in [0, 1) and ``h`` in ``(0, 1/base)`` representable at
    the depth of ``x``.  Verifies the defect and tail bounds and the pure
    slope identity on ``k <= k0_eff`` before returning.
    """
    r, depth = x.base, x.depth
    big = r**depth
    hf = _as_fraction(h)
    if x.integer_part != 0:
        raise ValueError("x must lie in [0, 1)")
    if not 0 < hf * r < 1:
        raise ValueError(f"h must lie in (0, 1/{r}), got {hf}")
    scaled = hf * big
    if scaled.denominator != 1:
        raise ValueError(f"{h} is not representable at depth {depth}")
    hu = scaled.numerator

    m = scale_index(r, hf)
    k0 = digit_match_depth(x, hf)
    k0_hat = hat_digit_match_depth(x, hf)
    k0_eff = k0 if r % 2 == 0 else min(k0, k0_hat)

    if tail_terms is None:
        tail_terms = depth + 1
    if not m < tail_terms <= depth + 1:
        raise ValueError(f"tail_terms must lie in ({m}, {depth + 1}]")

    shifted = x.with_mantissa(x.mantissa + hu)
    n1 = _summand_numerators(x, 1, depth + 1)
    n2 = _summand_numerators(shifted, 1, depth + 1)
    walk = derivative_walk(r, x, m)

    lo = max(k0_eff, 0)  # summands 1..lo follow the pure slope identity
    linear_span = sum(n2[:lo]) - sum(n1[:lo])
    if linear_span != hu * walk.prefix_sum(lo):
        raise RuntimeError("slope identity violated below the agreement "
                           "depth; this contradicts the digit bound")

    main = hf * walk.partial_sum
    defect_num = sum(n2[lo:m]) - sum(n1[lo:m]) \
        - hu * (walk.partial_sum - walk.prefix_sum(lo))
    defect = Fraction(defect_num, big)
    tail = Fraction(sum(n2[m:tail_terms]) - sum(n1[m:tail_terms]), big)
    halfwidth = SeriesTruncation(r, tail_terms).tail_bound
    increment = Fraction(sum(n2) - sum(n1), big)

    defect_bound = 2 * hf * (m - k0_eff)
    tail_bound = Fraction(r * r, r - 1) * hf
    if abs(defect) > defect_bound:
        raise RuntimeError("defect bound violated")
    if abs(tail) + halfwidth > tail_bound:
        raise RuntimeError("tail bound violated")

    return IncrementDecomposition(
        base=r, h=hf, m=m, k0=k0, k0_hat=k0_hat, k0_eff=k0_eff,
        main=main, defect=defect, tail=tail, tail_halfwidth=halfwidth,
        defect_bound=defect_bound, tail_bound=tail_bound,
        increment=increment)
