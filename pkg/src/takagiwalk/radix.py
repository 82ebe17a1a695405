"""Exact points with finite base-r expansions and digit-agreement depths.

A :class:`RadixPoint` stores an integer mantissa ``u`` and stands for the
rational ``u / r**depth`` in ``[0, 2)``.  All digit queries reduce to integer
floor arithmetic, so every result in this module is exact.

For an increment ``h`` the scale index ``m = m(h)`` is the unique integer
with ``r**-(m+1) < h <= r**-m``.  The agreement depth ``k0(x, h)`` is the
largest ``k`` such that ``x`` and ``x + h`` share digits 0..k (digit 0 being
the integer part); ``k0 = -1`` when already the integer parts differ.  The
hatted variant measures the same depth for ``x + 1/2`` and is what matters
for odd bases, where the tents of the summand functions break at half-integer
multiples of ``r**-k``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .rng import CounterStream

DEFAULT_DEPTH = 48

Rational = Union[Fraction, int]


class DepthExhaustedError(ValueError):
    """A query needs more fractional digits than the point carries."""


def _as_fraction(x) -> Fraction:
    if isinstance(x, RadixPoint):
        return x.value
    return Fraction(x)


@dataclass(frozen=True)
class RadixPoint:
    """A number ``mantissa / base**depth`` in ``[0, 2)``."""

    base: int
    depth: int
    mantissa: int

    def __post_init__(self):
        if self.base < 2:
            raise ValueError(f"base must be >= 2, got {self.base}")
        if self.depth < 1:
            raise ValueError(f"depth must be >= 1, got {self.depth}")
        if not 0 <= self.mantissa < 2 * self.base**self.depth:
            raise ValueError("mantissa out of range for [0, 2)")

    @property
    def unit(self) -> Fraction:
        """Value of one mantissa step, ``base**-depth``."""
        return Fraction(1, self.base**self.depth)

    @property
    def value(self) -> Fraction:
        return Fraction(self.mantissa, self.base**self.depth)

    @property
    def integer_part(self) -> int:
        return self.mantissa // self.base**self.depth

    @property
    def fractional_mantissa(self) -> int:
        return self.mantissa % self.base**self.depth

    def digit(self, k: int) -> int:
        """Digit at index ``k``: the integer part for 0, else the k-th
        fractional digit."""
        if k == 0:
            return self.integer_part
        if not 1 <= k <= self.depth:
            raise DepthExhaustedError(
                f"digit index {k} outside 0..{self.depth}")
        return (self.mantissa // self.base ** (self.depth - k)) % self.base

    def digits(self) -> tuple[int, ...]:
        return tuple(self.digit(k) for k in range(self.depth + 1))

    def digit_string(self) -> str:
        ds = self.digits()
        frac = "".join(str(d) for d in ds[1:])
        return f"{ds[0]}.{frac} (base {self.base})"

    def with_mantissa(self, mantissa: int) -> "RadixPoint":
        return RadixPoint(self.base, self.depth, mantissa)

    def __add__(self, other) -> "RadixPoint":
        if isinstance(other, RadixPoint):
            if (other.base, other.depth) != (self.base, self.depth):
                raise ValueError("mismatched base or depth")
            return self.with_mantissa(self.mantissa + other.mantissa)
        q = Fraction(other) * self.base**self.depth
        if q.denominator != 1:
            raise ValueError(
                f"{other} is not representable at depth {self.depth}")
        return self.with_mantissa(self.mantissa + q.numerator)

    __radd__ = __add__

    @classmethod
    def from_fraction(cls, base: int, depth: int, q) -> "RadixPoint":
        scaled = Fraction(q) * base**depth
        if scaled.denominator != 1:
            raise ValueError(
                f"{q} is not representable in base {base} at depth {depth}")
        return cls(base, depth, scaled.numerator)


def make_point(base: int, depth: int, digits: Sequence[int],
               integer_part: int = 0) -> RadixPoint:
    """Build a point from its digit expansion, zero-padded to ``depth``."""
    if integer_part not in (0, 1):
        raise ValueError("integer part must be 0 or 1")
    if len(digits) > depth:
        raise ValueError(f"{len(digits)} digits exceed depth {depth}")
    u = integer_part
    for d in digits:
        if not 0 <= d < base:
            raise ValueError(f"digit {d} out of range for base {base}")
        u = u * base + d
    u *= base ** (depth - len(digits))
    return RadixPoint(base, depth, u)


def dist_to_int(x) -> Fraction:
    """Distance to the nearest integer, exact."""
    q = _as_fraction(x)
    fr = q - (q.numerator // q.denominator)
    return min(fr, 1 - fr)


def scale_index(base: int, h) -> int:
    """The unique m with ``base**-(m+1) < h <= base**-m``, for h in (0, 1/r]."""
    hf = _as_fraction(h)
    if not 0 < hf * base <= 1:
        raise ValueError(f"h must lie in (0, 1/{base}], got {hf}")
    inv = 1 / hf
    m, power = 0, 1
    while power * base * inv.denominator <= inv.numerator:
        power *= base
        m += 1
    return m


def _floor_agreement_depth(n1: int, n2: int, den: int, base: int,
                           kmax: int) -> int:
    """Largest k <= kmax with floor(n1 b^k / den) == floor(n2 b^k / den),
    or -1; returns kmax + 1 if they agree through kmax."""
    power = 1
    for k in range(kmax + 1):
        if (n1 * power) // den != (n2 * power) // den:
            return k - 1
        power *= base
    return kmax + 1


def _check_increment(x: RadixPoint, h) -> Fraction:
    hf = _as_fraction(h)
    if x.integer_part != 0:
        raise ValueError("x must lie in [0, 1)")
    if not 0 < hf * x.base <= 1:
        raise ValueError(f"h must lie in (0, 1/{x.base}], got {hf}")
    return hf


def digit_match_depth(x: RadixPoint, h) -> int:
    """Largest index through which x and x+h share digits; -1 if none."""
    hf = _check_increment(x, h)
    r, big = x.base, x.base**x.depth
    units = hf * big
    if units.denominator == 1:  # h on the grid: pure mantissa arithmetic
        n1, n2, den = x.mantissa, x.mantissa + units.numerator, big
    else:
        n1 = x.mantissa * hf.denominator
        n2 = n1 + hf.numerator * big
        den = big * hf.denominator
    k0 = _floor_agreement_depth(n1, n2, den, r, x.depth)
    if k0 > x.depth:
        raise DepthExhaustedError(
            f"digits agree beyond depth {x.depth}; increase the depth")
    return k0


def hat_digit_match_depth(x: RadixPoint, h) -> int:
    """Largest index through which x+1/2 and x+h+1/2 share digits.

    Exact for any base; raises :class:`DepthExhaustedError` when the answer
    would reach depth-1, where a truncated expansion stops being trustworthy
    as a stand-in for an ideal point.
    """
    hf = _check_increment(x, h)
    r, big = x.base, x.base**x.depth
    units = hf * big
    if units.denominator == 1:
        n1 = 2 * x.mantissa + big
        n2 = n1 + 2 * units.numerator
        den = 2 * big
    else:
        n1 = (2 * x.mantissa + big) * hf.denominator
        n2 = n1 + 2 * hf.numerator * big
        den = 2 * big * hf.denominator
    k0h = _floor_agreement_depth(n1, n2, den, r, x.depth)
    if k0h >= x.depth - 1:
        raise DepthExhaustedError(
            f"hatted agreement depth {k0h} too close to depth {x.depth}")
    return k0h


@dataclass(frozen=True)
class DigitDepthResult:
    """Scale index and agreement depths for one increment."""

    m: int
    k0: int
    k0_hat: int
    k0_min: int


def digit_depth_profile(x: RadixPoint, h) -> DigitDepthResult:
    m = scale_index(x.base, h)
    k0 = digit_match_depth(x, h)
    k0_hat = hat_digit_match_depth(x, h)
    return DigitDepthResult(m, k0, k0_hat, min(k0, k0_hat))


def sample_point(base: int, depth: int, seed: int,
                 stream: int = 0) -> RadixPoint:
    """Uniform point of the depth-``depth`` grid in [0, 1).

    Drawn by block rejection on the counter stream ``(seed, stream)``; the
    result has the law of ``depth`` independent uniform digits.
    """
    cs = CounterStream(seed, stream)
    return RadixPoint(base, depth, cs.next_below(base**depth))


def sample_points(base: int, depth: int, count: int,
                  seed: int) -> list[RadixPoint]:
    """Independent uniform grid points on streams 0..count-1 of ``seed``."""
    return [sample_point(base, depth, seed, i) for i in range(count)]
