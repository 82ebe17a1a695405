"""Limit-theorem experiments with certified pass/fail reports.

Each experiment draws a deterministic sample ensemble (counter RNG, one
stream per sample), reduces it to a few statistics, and evaluates them
against configured bands.  The result is an :class:`ExperimentReport` that
serializes bit-identically for identical seeds, as JSON or one-row-per-entry
CSV.

Statistics used here: the one-sample Kolmogorov-Smirnov distance against a
target CDF, empirical quantiles, and tail frequencies with binomial
3-sigma margins.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .version import __version__
from .elephant import (MemoryParameter, bridge_sums, exact_second_moment,
                       final_positions, localization_class,
                       memory_param_of_base, running_max_statistic)
from .radix import RadixPoint, digit_match_depth, hat_digit_match_depth
from .rng import CounterStream, draw_block, stream_keys_np
from .sequences import StepSequence
from .takagi import total_increment

TOOL_NAME = "takagiwalk"

DEFAULT_TOLERANCES = {
    "walk_clt_ks": 0.02,
    "walk_clt_negative_ks": 0.2,
    "takagi_clt_ks": 0.05,
    "takagi_clt_negative_ks": 0.1,
    "lil_band": (0.6, 1.3),
    "tail_sigmas": 3.0,
}


def normal_cdf(y: float) -> float:
    """Standard normal CDF via the complementary error function."""
    return 0.5 * math.erfc(-y / math.sqrt(2.0))


def ks_distance(samples: np.ndarray,
                cdf: Callable[[float], float] = normal_cdf) -> float:
    """One-sample Kolmogorov-Smirnov distance sup |F_n - F|."""
    xs = np.sort(np.asarray(samples, dtype=float))
    n = len(xs)
    if n == 0:
        raise ValueError("need at least one sample")
    f = np.array([cdf(v) for v in xs])
    grid = np.arange(1, n + 1) / n
    d_plus = float(np.max(grid - f))
    d_minus = float(np.max(f - (grid - 1.0 / n)))
    return max(d_plus, d_minus)


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Sorted sample with distribution queries."""

    samples: np.ndarray

    @classmethod
    def from_samples(cls, values) -> "EmpiricalDistribution":
        return cls(np.sort(np.asarray(values, dtype=float)))

    @property
    def n(self) -> int:
        return len(self.samples)

    def ks(self, cdf: Callable[[float], float] = normal_cdf) -> float:
        return ks_distance(self.samples, cdf)

    def quantile(self, q: float) -> float:
        return float(np.quantile(self.samples, q))

    def mean(self) -> float:
        return float(self.samples.mean())

    def var(self) -> float:
        return float(self.samples.var())


@dataclass(frozen=True)
class BoundCheck:
    """One named value checked against [low, high] (None = unbounded)."""

    name: str
    value: float
    low: Optional[float]
    high: Optional[float]
    passed: bool

    @classmethod
    def of(cls, name: str, value: float, low: Optional[float] = None,
           high: Optional[float] = None) -> "BoundCheck":
        ok = (low is None or low <= value) and (high is None or value <= high)
        return cls(name, float(value), low, high, bool(ok))


def render_rational(q: Fraction) -> str:
    """Exact p/q text with a 17-significant-digit decimal alongside."""
    return f"{q.numerator}/{q.denominator} ({float(q):.17g})"


@dataclass
class ExperimentReport:
    """Named statistics plus bound checks, serializable reproducibly."""

    experiment: str
    seed: int
    config: dict
    statistics: dict
    checks: list
    samples: Optional[np.ndarray] = field(default=None, compare=False,
                                          repr=False)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "tool": {"name": TOOL_NAME, "version": __version__},
            "experiment": self.experiment,
            "seed": self.seed,
            "config": self.config,
            "statistics": self.statistics,
            "checks": [{"name": c.name, "value": c.value, "low": c.low,
                        "high": c.high, "passed": c.passed}
                       for c in self.checks],
            "passed": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ExperimentReport":
        obj = json.loads(text)
        checks = [BoundCheck(c["name"], c["value"], c["low"], c["high"],
                             c["passed"]) for c in obj["checks"]]
        return cls(obj["experiment"], obj["seed"], obj["config"],
                   obj["statistics"], checks)

    def to_csv(self) -> str:
        def cell(v) -> str:
            if v is None:
                return ""
            if isinstance(v, bool):
                return "true" if v else "false"
            if isinstance(v, float):
                return repr(float(v))  # normalizes numpy scalars
            return str(v)

        out = io.StringIO()
        out.write(f"# {TOOL_NAME} {__version__}\n")
        out.write(f"# experiment={self.experiment}\n")
        out.write(f"# seed={self.seed}\n")
        for key in sorted(self.config):
            out.write(f"# config {key}={cell(self.config[key])}\n")
        out.write("section,name,value,low,high,passed\n")
        for key in sorted(self.statistics):
            out.write(f"statistic,{key},{cell(self.statistics[key])},,,\n")
        for c in self.checks:
            out.write(f"check,{c.name},{cell(c.value)},{cell(c.low)},"
                      f"{cell(c.high)},{cell(c.passed)}\n")
        out.write(f"summary,passed,{cell(self.passed)},,,\n")
        return out.getvalue()

    def write(self, path, fmt: str = "csv"):
        text = self.to_json() if fmt == "json" else self.to_csv()
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def gaussian_samples(count: int, seed: int) -> np.ndarray:
    """iid standard normals, one per stream, by the polar-free Box-Muller."""
    keys = stream_keys_np(seed, np.arange(count))
    z = draw_block(keys, np.arange(1, 3))
    u = (z >> np.uint64(11)) * 2.0**-53
    radius = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
    return radius * np.cos(2.0 * np.pi * u[:, 1])


# ---------------------------------------------------------------------------
# experiments


def walk_clt_experiment(p, n: int, samples: int, seed: int,
                        rescale: bool = True,
                        ks_tol: Optional[float] = None,
                        keep_samples: bool = False) -> ExperimentReport:
    """KS distance of T_n / sqrt(n p/(1-p)) from the standard normal.

    With ``rescale=False`` the variance factor is omitted (negative control
    away from p = 1/2); the check then demands a LARGE distance.
    """
    mp = MemoryParameter(p if not isinstance(p, MemoryParameter) else p.p)
    finals = final_positions(mp.p, n, samples, seed).astype(float)
    scale = math.sqrt(n * mp.variance_factor) if rescale else math.sqrt(n)
    values = finals / scale
    emp = EmpiricalDistribution.from_samples(values)
    ks = emp.ks(normal_cdf)
    if rescale:
        tol = DEFAULT_TOLERANCES["walk_clt_ks"] if ks_tol is None else ks_tol
        checks = [BoundCheck.of("ks_normal", ks, high=tol)]
    else:
        tol = DEFAULT_TOLERANCES["walk_clt_negative_ks"] if ks_tol is None \
            else ks_tol
        checks = [BoundCheck.of("ks_normal_negative_control", ks, low=tol)]
    report = ExperimentReport(
        experiment="walk_clt",
        seed=seed,
        config={"p": mp.p, "n": n, "samples": samples, "rescale": rescale,
                "ks_tol": tol},
        statistics={"ks": ks, "mean": emp.mean(), "var": emp.var()},
        checks=checks,
        samples=values if keep_samples else None)
    return report


def takagi_clt_experiment(base: int, ell: int, samples: int, seed: int,
                          depth: Optional[int] = None, side: str = "right",
                          parity_factor: bool = True,
                          ks_tol: Optional[float] = None,
                          negative_tol: Optional[float] = None,
                          keep_samples: bool = False) -> ExperimentReport:
    """Normalized increments of f_r at uniform points against the normal.

    The statistic at scale ``h = base**-ell`` is ``(f(x+h) - f(x)) /
    (h sqrt(ell * vf))`` with the parity variance factor ``vf``: 1 for even
    bases, (base+1)/(base-1) for odd ones.  ``side='left'`` uses the
    increment to the left (computed at x - h mod 1, same law).  For odd
    bases the report also carries the KS distance with the factor omitted,
    which must stay LARGE (negative control).
    """
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    if depth is None:
        depth = 2 * ell + 16
    if depth < 2 * ell:
        raise ValueError(f"depth {depth} too small for scale {ell}; "
                         f"need at least {2 * ell}")
    mp = memory_param_of_base(base)
    vf = mp.variance_factor if parity_factor else 1.0
    big = base**depth
    hu = base ** (depth - ell)  # h in mantissa units
    norm = 1.0 / math.sqrt(ell)

    values = np.empty(samples)
    moduli = [base**j for j in range(depth, 0, -1)]
    for i in range(samples):
        cs = CounterStream(seed, i)
        u = cs.next_below(big)
        if side == "left":
            u = (u - hu) % big
        u2 = u + hu
        delta = 0
        for p_k in moduli:
            fr1 = u % p_k
            fr2 = u2 % p_k
            delta += min(fr2, p_k - fr2) - min(fr1, p_k - fr1)
        values[i] = delta / hu * norm

    raw = EmpiricalDistribution.from_samples(values)
    ks_raw = raw.ks(normal_cdf)
    if parity_factor and vf != 1.0:
        emp = EmpiricalDistribution.from_samples(values / math.sqrt(vf))
        ks = emp.ks(normal_cdf)
    else:
        emp, ks = raw, ks_raw

    tol = DEFAULT_TOLERANCES["takagi_clt_ks"] if ks_tol is None else ks_tol
    checks = [BoundCheck.of("ks_normal", ks, high=tol)]
    statistics = {"ks": ks, "mean": emp.mean(), "var": emp.var()}
    if base % 2 == 1 and parity_factor:
        ntol = DEFAULT_TOLERANCES["takagi_clt_negative_ks"] \
            if negative_tol is None else negative_tol
        checks.append(BoundCheck.of("ks_without_parity_factor", ks_raw,
                                    low=ntol))
        statistics["ks_without_parity_factor"] = ks_raw
    report = ExperimentReport(
        experiment="takagi_clt",
        seed=seed,
        config={"base": base, "ell": ell, "samples": samples, "depth": depth,
                "side": side, "parity_factor": parity_factor, "ks_tol": tol},
        statistics=statistics,
        checks=checks,
        samples=emp.samples if keep_samples else None)
    return report


def lil_tracker(p, n_max: int, paths: int, seed: int, n_min: int = 100,
                band: Optional[tuple] = None,
                keep_samples: bool = False) -> ExperimentReport:
    """Running maxima of T_n / sqrt(2 n loglog n) against sqrt(p/(1-p)).

    The median of the per-path running maxima must land inside
    ``band * sqrt(p/(1-p))``; the iterated-logarithm limit for each path is
    exactly that square root.
    """
    mp = MemoryParameter(p if not isinstance(p, MemoryParameter) else p.p)
    if band is None:
        band = DEFAULT_TOLERANCES["lil_band"]
    target = math.sqrt(mp.variance_factor)
    maxima = running_max_statistic(mp.p, n_max, paths, seed, n_min=n_min)
    emp = EmpiricalDistribution.from_samples(maxima)
    med = emp.quantile(0.5)
    checks = [BoundCheck.of("median_running_max", med,
                            low=band[0] * target, high=band[1] * target)]
    report = ExperimentReport(
        experiment="lil",
        seed=seed,
        config={"p": mp.p, "n_max": n_max, "paths": paths, "n_min": n_min,
                "band_low": band[0], "band_high": band[1]},
        statistics={"median": med, "q10": emp.quantile(0.1),
                    "q90": emp.quantile(0.9), "limit": target},
        checks=checks,
        samples=maxima if keep_samples else None)
    return report


def k0_tail_experiment(base: int, ell: int, samples: int, seed: int,
                       depth: Optional[int] = None, j_max: int = 10,
                       sigmas: Optional[float] = None) -> ExperimentReport:
    """Tail frequencies of the digit agreement deficit m - k0.

    For uniform x and h = base**-ell the event {m - k0 >= j} has probability
    at most base**-(j-1), and {m - min(k0, k0_hat) >= j} at most twice that.
    Frequencies must stay below bound + sigmas * sqrt(bound(1-bound)/N).
    """
    if depth is None:
        depth = 2 * ell + 16
    if depth < 2 * ell:
        raise ValueError(f"depth {depth} too small for scale {ell}")
    if sigmas is None:
        sigmas = DEFAULT_TOLERANCES["tail_sigmas"]
    big = base**depth
    h = Fraction(1, base**ell)
    m = ell
    counts = np.zeros(j_max + 1, dtype=np.int64)
    counts_hat = np.zeros(j_max + 1, dtype=np.int64)
    for i in range(samples):
        u = CounterStream(seed, i).next_below(big)
        x = RadixPoint(base, depth, u)
        k0 = digit_match_depth(x, h)
        k0h = hat_digit_match_depth(x, h)
        gap = min(m - k0, j_max)
        gap_hat = min(m - min(k0, k0h), j_max)
        counts[:gap + 1] += 1
        counts_hat[:gap_hat + 1] += 1

    statistics = {}
    checks = []
    for j in range(1, j_max + 1):
        for label, cnt, factor in (("k0", counts, 1), ("k0_min", counts_hat,
                                                       2)):
            freq = float(cnt[j]) / samples
            bound = min(factor * float(base) ** (1 - j), 1.0)
            sigma = math.sqrt(bound * (1.0 - bound) / samples)
            statistics[f"freq_{label}_ge_{j}"] = freq
            checks.append(BoundCheck.of(f"tail_{label}_ge_{j}", freq,
                                        high=bound + sigmas * sigma))
    report = ExperimentReport(
        experiment="k0_tail",
        seed=seed,
        config={"base": base, "ell": ell, "samples": samples, "depth": depth,
                "j_max": j_max, "sigmas": sigmas},
        statistics=statistics,
        checks=checks)
    return report


def localization_experiment(p, weights: StepSequence, n_values, paths: int,
                            seed: int,
                            sigmas: float = 3.0) -> ExperimentReport:
    """Monte Carlo bridge moments E[(S_n - S_{n/2})**2] against exact law.

    For each n the sample mean of the squared bridge must sit within
    ``sigmas`` standard errors of the closed-form moment, and above the
    sandwich lower bound sum(a_k**2)/K.
    """
    mp = MemoryParameter(p if not isinstance(p, MemoryParameter) else p.p)
    label = localization_class(weights)
    statistics = {"class": label.value}
    checks = []
    for idx, n in enumerate(n_values):
        mid = n // 2
        vals = bridge_sums(mp.p, weights, mid, n, paths,
                           seed + idx) ** 2
        mean = float(vals.mean())
        stderr = float(vals.std(ddof=1)) / math.sqrt(paths)
        exact = exact_second_moment(mp.p, weights, mid, n)
        sq = weights.sq_partial(n) - weights.sq_partial(mid)
        lower = sq / mp.K
        statistics[f"mc_{n}"] = mean
        statistics[f"exact_{n}"] = exact
        statistics[f"lower_{n}"] = lower
        checks.append(BoundCheck.of(f"mc_matches_exact_{n}", mean,
                                    low=exact - sigmas * stderr,
                                    high=exact + sigmas * stderr))
        checks.append(BoundCheck.of(f"mc_above_sandwich_{n}",
                                    mean + sigmas * stderr, low=lower))
    report = ExperimentReport(
        experiment="localization",
        seed=seed,
        config={"p": mp.p, "weights": json.dumps(weights.describe(),
                                                 sort_keys=True),
                "n_values": list(n_values), "paths": paths,
                "sigmas": sigmas},
        statistics=statistics,
        checks=checks)
    return report
