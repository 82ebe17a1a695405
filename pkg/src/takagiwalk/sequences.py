"""Weight sequences a_1, a_2, ... used by series and localized walks.

Four families cover the regimes of interest: constant, power ``k**-gamma``,
geometric ``q**k``, and explicit finite lists extended by zeros.  Each family
answers the tail questions the theory needs (square summability, decay to
zero, weighted l1 tails) with certified bounds, exactly in ``Fraction``
arithmetic whenever the parameters allow.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

# safety inflation for upper bounds computed in floating point
_FLOAT_SLACK = 1.0 + 1e-9


def _unit_weighted_tail(base: int, n: int) -> Fraction:
    """Exact value of (1/2) * sum_{k>n} base**(1-k)."""
    return Fraction(base, 2 * (base - 1)) * Fraction(1, base) ** n


class StepSequence(ABC):
    """Sequence of real weights indexed from k = 1."""

    family: str

    @abstractmethod
    def term_exact(self, k: int) -> Optional[Fraction]:
        """The k-th weight as a Fraction, or None when it is irrational."""

    def term(self, k: int) -> float:
        t = self.term_exact(k)
        if t is None:
            raise NotImplementedError
        return float(t)

    @property
    def is_exact(self) -> bool:
        return self.term_exact(1) is not None

    def terms_array(self, k_from: int, k_to: int) -> np.ndarray:
        """Weights for k in [k_from, k_to) as float64."""
        return np.array([self.term(k) for k in range(k_from, k_to)])

    @property
    @abstractmethod
    def is_square_summable(self) -> bool:
        """Whether sum a_k**2 converges."""

    @property
    @abstractmethod
    def limsup_abs_positive(self) -> bool:
        """Whether limsup |a_k| > 0."""

    @property
    def tends_to_zero(self) -> bool:
        return not self.limsup_abs_positive

    def is_l1_summable(self, base: int) -> bool:
        """Whether sum |a_k| * base**(1-k) converges."""
        return True

    @abstractmethod
    def weighted_tail_bound(self, base: int, n: int):
        """Upper bound on (1/2) * sum_{k>n} |a_k| * base**(1-k)."""

    def sq_partial(self, n: int) -> float:
        """sum_{k<=n} a_k**2 in floating point."""
        if n <= 0:
            return 0.0
        return float(np.sum(self.terms_array(1, n + 1) ** 2))

    @abstractmethod
    def sq_tail_bound(self, n: int) -> float:
        """Upper bound on sum_{k>n} a_k**2; only for square-summable
        sequences."""

    def with_prefix(self, values: Sequence) -> "StepSequence":
        """Same sequence with the first ``len(values)`` terms replaced."""
        return PrefixedSequence(tuple(Fraction(v) for v in values), self)

    @abstractmethod
    def describe(self) -> dict:
        """JSON-friendly family and parameters."""


@dataclass(frozen=True)
class ConstantSequence(StepSequence):
    value: Fraction = Fraction(1)
    family = "constant"

    def term_exact(self, k):
        return Fraction(self.value)

    def terms_array(self, k_from, k_to):
        return np.full(k_to - k_from, float(self.value))

    @property
    def is_square_summable(self):
        return self.value == 0

    @property
    def limsup_abs_positive(self):
        return self.value != 0

    def weighted_tail_bound(self, base, n):
        return abs(Fraction(self.value)) * _unit_weighted_tail(base, n)

    def sq_partial(self, n):
        return float(Fraction(self.value) ** 2 * n)

    def sq_tail_bound(self, n):
        if self.value != 0:
            raise ValueError("constant nonzero sequence is not square summable")
        return 0.0

    def describe(self):
        return {"family": "constant", "value": str(self.value)}


@dataclass(frozen=True)
class PowerSequence(StepSequence):
    """a_k = k**-gamma; gamma may be negative (growing weights)."""

    gamma: float
    family = "power"

    def term_exact(self, k):
        g = self.gamma
        if float(g).is_integer():
            g = int(g)
            return Fraction(1, k**g) if g >= 0 else Fraction(k ** (-g))
        return None

    def term(self, k):
        return float(k) ** -self.gamma

    def terms_array(self, k_from, k_to):
        return np.arange(k_from, k_to, dtype=float) ** -self.gamma

    @property
    def is_square_summable(self):
        return self.gamma > 0.5

    @property
    def limsup_abs_positive(self):
        return self.gamma <= 0

    def weighted_tail_bound(self, base, n):
        if self.gamma >= 0:
            cap = self.term_exact(n + 1)
            if cap is not None:
                return cap * _unit_weighted_tail(base, n)
            return float(n + 1) ** -self.gamma \
                * float(_unit_weighted_tail(base, n)) * _FLOAT_SLACK
        # growing weights: geometric-ratio bound, the term ratio
        # ((k+1)/k)**|gamma| / base decreases in k
        g = -self.gamma
        k = n + 1
        total = 0.0
        while ((k + 1) / k) ** g / base > 0.8:
            total += k**g * float(base) ** (1 - k)
            k += 1
            if k > n + 10_000:
                raise ValueError("weighted tail bound did not stabilize")
        ratio = ((k + 1) / k) ** g / base
        total += k**g * float(base) ** (1 - k) / (1.0 - ratio)
        return 0.5 * total * _FLOAT_SLACK

    def sq_partial(self, n):
        if n <= 0:
            return 0.0
        return float(np.sum(np.arange(1.0, n + 1) ** (-2 * self.gamma)))

    def sq_tail_bound(self, n):
        if not self.is_square_summable:
            raise ValueError(f"k**-{self.gamma} is not square summable")
        # sum_{k>n} k**-2g <= integral_n^inf x**-2g dx
        return float(n) ** (1 - 2 * self.gamma) / (2 * self.gamma - 1) \
            * _FLOAT_SLACK

    def describe(self):
        return {"family": "power", "gamma": float(self.gamma)}


@dataclass(frozen=True)
class GeometricSequence(StepSequence):
    """a_k = ratio**k."""

    ratio: Fraction
    family = "geometric"

    def term_exact(self, k):
        return Fraction(self.ratio) ** k

    def terms_array(self, k_from, k_to):
        return float(self.ratio) ** np.arange(k_from, k_to)

    @property
    def is_square_summable(self):
        return abs(self.ratio) < 1

    @property
    def limsup_abs_positive(self):
        return abs(self.ratio) >= 1

    def is_l1_summable(self, base):
        return abs(Fraction(self.ratio)) < base

    def weighted_tail_bound(self, base, n):
        rho = abs(Fraction(self.ratio)) / base
        if rho >= 1:
            raise ValueError("weighted series diverges for |ratio| >= base")
        return Fraction(base, 2) * rho ** (n + 1) / (1 - rho)

    def sq_tail_bound(self, n):
        q = abs(Fraction(self.ratio))
        if q >= 1:
            raise ValueError(f"{self.ratio}**k is not square summable")
        return float(q ** (2 * (n + 1)) / (1 - q**2))

    def describe(self):
        return {"family": "geometric", "ratio": str(Fraction(self.ratio))}


@dataclass(frozen=True)
class ExplicitSequence(StepSequence):
    """Finitely many explicit weights, zero from there on."""

    values: tuple
    family = "explicit"

    def __post_init__(self):
        object.__setattr__(self, "values",
                           tuple(Fraction(v) for v in self.values))

    def term_exact(self, k):
        return self.values[k - 1] if k <= len(self.values) else Fraction(0)

    @property
    def is_square_summable(self):
        return True

    @property
    def limsup_abs_positive(self):
        return False

    def weighted_tail_bound(self, base, n):
        total = Fraction(0)
        for k in range(n + 1, len(self.values) + 1):
            total += abs(self.values[k - 1]) * Fraction(1, base) ** (k - 1)
        return total / 2

    def sq_tail_bound(self, n):
        return float(sum(v**2 for v in self.values[n:]))

    def describe(self):
        return {"family": "explicit",
                "values": [str(v) for v in self.values]}


@dataclass(frozen=True)
class PrefixedSequence(StepSequence):
    """A base sequence with finitely many leading terms overridden.

    Tail behavior is by construction that of the base sequence.
    """

    prefix: tuple
    base_seq: StepSequence
    family = "prefixed"

    def term_exact(self, k):
        if k <= len(self.prefix):
            return Fraction(self.prefix[k - 1])
        return self.base_seq.term_exact(k)

    def term(self, k):
        if k <= len(self.prefix):
            return float(self.prefix[k - 1])
        return self.base_seq.term(k)

    def terms_array(self, k_from, k_to):
        out = self.base_seq.terms_array(k_from, k_to)
        for i, k in enumerate(range(k_from, k_to)):
            if k <= len(self.prefix):
                out[i] = float(self.prefix[k - 1])
        return out

    @property
    def is_square_summable(self):
        return self.base_seq.is_square_summable

    @property
    def limsup_abs_positive(self):
        return self.base_seq.limsup_abs_positive

    def is_l1_summable(self, base):
        return self.base_seq.is_l1_summable(base)

    def weighted_tail_bound(self, base, n):
        ell = len(self.prefix)
        if n >= ell:
            return self.base_seq.weighted_tail_bound(base, n)
        head = Fraction(0)
        for k in range(n + 1, ell + 1):
            head += abs(Fraction(self.prefix[k - 1])) \
                * Fraction(1, base) ** (k - 1)
        tail = self.base_seq.weighted_tail_bound(base, ell)
        if isinstance(tail, Fraction):
            return head / 2 + tail
        return float(head) / 2 + tail

    def sq_partial(self, n):
        ell = min(len(self.prefix), n)
        head = float(sum(Fraction(v) ** 2 for v in self.prefix[:ell]))
        if n <= len(self.prefix):
            return head
        return head + self.base_seq.sq_partial(n) \
            - self.base_seq.sq_partial(len(self.prefix))

    def sq_tail_bound(self, n):
        ell = len(self.prefix)
        if n >= ell:
            return self.base_seq.sq_tail_bound(n)
        head = float(sum(Fraction(v) ** 2 for v in self.prefix[n:ell]))
        return head + self.base_seq.sq_tail_bound(ell)

    def describe(self):
        return {"family": "prefixed",
                "prefix": [str(Fraction(v)) for v in self.prefix],
                "base": self.base_seq.describe()}


def step_sequence(family: str, **params) -> StepSequence:
    """Factory used by the command line: family name plus its parameter."""
    if family == "constant":
        return ConstantSequence(Fraction(params.get("value", 1)))
    if family == "power":
        return PowerSequence(float(params["gamma"]))
    if family == "geometric":
        return GeometricSequence(Fraction(params["ratio"]))
    if family == "explicit":
        return ExplicitSequence(tuple(params["values"]))
    raise ValueError(f"unknown sequence family: {family!r}")
