"""Static matplotlib renderings for the report path of the CLI.

Every function writes one PNG next to the delimited report file and returns
the path.  Rendering is headless (Agg) and optional everywhere; nothing in
the numeric pipeline depends on it.
"""

from __future__ import annotations

import math

import matplotlib
matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .elephant import MemoryParameter, WalkPath, spectral_density
from .experiments import ExperimentReport, normal_cdf


def _normal_pdf(t: np.ndarray) -> np.ndarray:
    return np.exp(-0.5 * t * t) / math.sqrt(2.0 * math.pi)


def _save(fig, path) -> str:
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return str(path)


def takagi_curve(base: int, n_points: int = 2048,
                 terms: int = 48) -> tuple[np.ndarray, np.ndarray]:
    """Float samples of the function graph on [0, 1] for plotting."""
    xs = np.linspace(0.0, 1.0, n_points + 1)
    total = np.zeros_like(xs)
    for k in range(1, terms + 1):
        y = xs * float(base) ** (k - 1)
        total += np.abs(y - np.round(y)) * float(base) ** (1 - k)
    return xs, total


def save_eval_figure(base: int, x_value: float, f_value: float,
                     path) -> str:
    xs, ys = takagi_curve(base)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(xs, ys, lw=0.8)
    ax.plot([x_value], [f_value], "o", ms=6, color="crimson")
    ax.set_xlabel("x")
    ax.set_ylabel(f"f_{base}(x)")
    ax.set_title(f"base {base} series, evaluated point marked")
    return _save(fig, path)


def save_distribution_figure(report: ExperimentReport, path) -> str:
    """Histogram + normal density, and empirical CDF against the normal."""
    if report.samples is None:
        raise ValueError("report carries no samples to draw")
    xs = np.sort(np.asarray(report.samples, dtype=float))
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4.2))
    ax1.hist(xs, bins=80, density=True, alpha=0.65)
    grid = np.linspace(min(-4.0, xs[0]), max(4.0, xs[-1]), 400)
    ax1.plot(grid, _normal_pdf(grid), "k-", lw=1.2)
    ax1.set_title("normalized samples vs N(0,1) density")
    ecdf = np.arange(1, len(xs) + 1) / len(xs)
    ax2.plot(xs, ecdf, lw=1.0, label="empirical")
    ax2.plot(grid, [normal_cdf(g) for g in grid], "k--", lw=1.0,
             label="normal")
    ks = report.statistics.get("ks")
    ax2.set_title(f"CDFs (KS = {ks:.4f})" if ks is not None else "CDFs")
    ax2.legend(loc="lower right")
    fig.suptitle(report.experiment)
    return _save(fig, path)


def save_walk_figure(walk: WalkPath, path) -> str:
    fig, ax = plt.subplots(figsize=(8, 4.2))
    ax.step(np.arange(walk.n + 1), walk.sums, where="post", lw=0.8)
    ax.set_xlabel("n")
    ax.set_ylabel("T_n")
    ax.set_title(f"walk, p = {walk.p}, seed = {walk.seed}")
    return _save(fig, path)


def save_ensemble_figure(finals: np.ndarray, p: float, n: int, path) -> str:
    mp = MemoryParameter(p)
    sd = math.sqrt(n * mp.variance_factor)
    fig, ax = plt.subplots(figsize=(7, 4.2))
    ax.hist(finals, bins=60, density=True, alpha=0.65)
    grid = np.linspace(finals.min(), finals.max(), 400)
    ax.plot(grid, _normal_pdf(grid / sd) / sd, "k-", lw=1.2)
    ax.set_title(f"T_n over {len(finals)} paths vs N(0, n p/(1-p))")
    return _save(fig, path)


def save_lil_figure(report: ExperimentReport, path) -> str:
    if report.samples is None:
        raise ValueError("report carries no samples to draw")
    limit = report.statistics["limit"]
    fig, ax = plt.subplots(figsize=(7, 4.2))
    ax.hist(report.samples, bins=40, alpha=0.65)
    ax.axvline(limit, color="crimson", lw=1.4, label="sqrt(p/(1-p))")
    lo = report.config["band_low"] * limit
    hi = report.config["band_high"] * limit
    ax.axvspan(lo, hi, color="green", alpha=0.12, label="accepted band")
    ax.set_xlabel("running max of T_n / sqrt(2 n loglog n)")
    ax.legend()
    ax.set_title("iterated-logarithm running maxima")
    return _save(fig, path)


def save_k0_figure(report: ExperimentReport, path) -> str:
    js, freq, freq_hat = [], [], []
    j = 1
    while f"freq_k0_ge_{j}" in report.statistics:
        js.append(j)
        freq.append(report.statistics[f"freq_k0_ge_{j}"])
        freq_hat.append(report.statistics[f"freq_k0_min_ge_{j}"])
        j += 1
    base = report.config["base"]
    js = np.array(js, dtype=float)
    fig, ax = plt.subplots(figsize=(7, 4.2))
    ax.semilogy(js, np.maximum(freq, 1e-12), "o-", label="m - k0 >= j")
    ax.semilogy(js, np.maximum(freq_hat, 1e-12), "s-",
                label="m - min(k0, k0_hat) >= j")
    ax.semilogy(js, float(base) ** (1 - js), "k--", label="bound r^(1-j)")
    ax.semilogy(js, np.minimum(2 * float(base) ** (1 - js), 1.0), "k:",
                label="bound 2 r^(1-j)")
    ax.set_xlabel("j")
    ax.set_ylabel("frequency")
    ax.legend()
    ax.set_title(f"digit agreement tails, base {base}")
    return _save(fig, path)


def save_spectral_figure(p: float, path) -> str:
    mp = MemoryParameter(p)
    lam = np.linspace(-math.pi, math.pi, 801)
    fig, ax = plt.subplots(figsize=(7, 4.2))
    ax.plot(lam, spectral_density(mp.p, lam), lw=1.2)
    ax.axhline(1.0 / (2 * math.pi * mp.K), color="k", ls="--", lw=0.9,
               label="1/(2 pi K)")
    ax.axhline(mp.K / (2 * math.pi), color="k", ls=":", lw=0.9,
               label="K/(2 pi)")
    ax.set_xlabel("frequency")
    ax.set_ylabel("density")
    ax.legend()
    ax.set_title(f"step spectral density, p = {mp.p}")
    return _save(fig, path)


def save_localization_figure(report: ExperimentReport, path) -> str:
    ns = report.config["n_values"]
    mc = [report.statistics[f"mc_{n}"] for n in ns]
    exact = [report.statistics[f"exact_{n}"] for n in ns]
    lower = [report.statistics[f"lower_{n}"] for n in ns]
    fig, ax = plt.subplots(figsize=(7, 4.2))
    ax.loglog(ns, mc, "o", label="Monte Carlo")
    ax.loglog(ns, exact, "-", label="exact")
    ax.loglog(ns, lower, "--", label="sandwich lower bound")
    ax.set_xlabel("n")
    ax.set_ylabel("E[(S_n - S_{n/2})^2]")
    ax.legend()
    ax.set_title(f"bridge second moments ({report.statistics['class']})")
    return _save(fig, path)


def save_probe_figure(partial_sums: np.ndarray, label: str, path) -> str:
    fig, ax = plt.subplots(figsize=(7, 4.2))
    ax.plot(np.arange(len(partial_sums)), partial_sums, lw=0.9)
    ax.set_xlabel("terms")
    ax.set_ylabel("partial sum of slope series")
    ax.set_title(label)
    return _save(fig, path)
