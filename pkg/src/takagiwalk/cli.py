"""Command line driver.

Subcommands evaluate the series exactly, simulate walks, and run the
statistical experiments, writing delimited reports (CSV or JSON) plus
matplotlib figures alongside.  Every stochastic command requires an explicit
--seed; rerunning with the same arguments reproduces the report bytes.

Exit status is 0 exactly when every configured check passes.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .version import __version__
from . import classify as classify_mod
from .elephant import (MemoryParameter, correlation,
                       correlation_by_quadrature, final_positions, simulate)
from .experiments import (BoundCheck, ExperimentReport, k0_tail_experiment,
                          lil_tracker, localization_experiment,
                          render_rational, takagi_clt_experiment,
                          walk_clt_experiment)
from .radix import sample_point
from .sequences import step_sequence
from .takagi import SeriesTruncation, eval_f, eval_f_weighted, \
    functional_eq_residual

OUT_DIR_ENV = "TAKAGIWALK_OUT"


@dataclass(frozen=True)
class RunConfig:
    """Validated output options shared by all subcommands."""

    command: str
    seed: Optional[int]
    out: Optional[str]
    fmt: str
    figures: bool


def _parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from exc


def _parse_point(text: str, base: int) -> Fraction:
    """Rational ``p/q`` or base-``base`` digit string ``i.d1d2...``."""
    if "/" in text or "." not in text:
        return _parse_rational(text)
    whole, _, frac = text.partition(".")
    if whole not in ("0", "1") or not frac:
        raise SystemExit(f"digit string must look like 0.d1d2...: {text!r}")
    value = Fraction(int(whole))
    scale = Fraction(1, base)
    for ch in frac:
        digit = int(ch)
        if digit >= base:
            raise SystemExit(f"digit {digit} out of range for base {base}")
        value += digit * scale
        scale /= base
    return value


def _add_output_args(sp):
    sp.add_argument("--out", help="report file path; relative paths resolve "
                    f"against ${OUT_DIR_ENV} when set")
    sp.add_argument("--format", choices=("csv", "json"), default="csv",
                    help="report format (default csv)")
    sp.add_argument("--no-figures", action="store_true",
                    help="skip the PNG rendered next to the report")


def _add_weight_args(sp):
    sp.add_argument("--family",
                    choices=("constant", "power", "geometric", "explicit"),
                    default="constant", help="weight family")
    sp.add_argument("--value", type=_parse_rational, default=Fraction(1),
                    help="constant family value")
    sp.add_argument("--gamma", type=float, help="power family exponent")
    sp.add_argument("--ratio", type=_parse_rational,
                    help="geometric family ratio")
    sp.add_argument("--values", help="explicit family, comma separated")


def _weights_from_args(args):
    if args.family == "constant":
        return step_sequence("constant", value=args.value)
    if args.family == "power":
        if args.gamma is None:
            raise SystemExit("--family power requires --gamma")
        return step_sequence("power", gamma=args.gamma)
    if args.family == "geometric":
        if args.ratio is None:
            raise SystemExit("--family geometric requires --ratio")
        return step_sequence("geometric", ratio=args.ratio)
    if args.values is None:
        raise SystemExit("--family explicit requires --values")
    vals = [_parse_rational(v) for v in args.values.split(",") if v.strip()]
    return step_sequence("explicit", values=vals)


def _run_config(args) -> RunConfig:
    out = args.out if hasattr(args, "out") else None
    if out:
        out = os.path.expanduser(out)
        base_dir = os.environ.get(OUT_DIR_ENV)
        if base_dir and not os.path.isabs(out):
            out = os.path.join(base_dir, out)
    figures = bool(out) and not getattr(args, "no_figures", False)
    return RunConfig(args.command, getattr(args, "seed", None), out,
                     getattr(args, "format", "csv"), figures)


def _figure_path(cfg: RunConfig) -> str:
    stem, _ = os.path.splitext(cfg.out)
    return stem + ".png"


def _emit(report: ExperimentReport, cfg: RunConfig,
          figure_fn=None) -> int:
    print(f"{report.experiment}: "
          + ("PASS" if report.passed else "FAIL")
          + f" ({len(report.checks)} checks)")
    for key in sorted(report.statistics):
        print(f"  {key} = {report.statistics[key]}")
    for c in report.checks:
        if not c.passed:
            lo = "-inf" if c.low is None else repr(c.low)
            hi = "inf" if c.high is None else repr(c.high)
            print(f"FAILED {c.name}: value {c.value!r} outside "
                  f"[{lo}, {hi}]", file=sys.stderr)
    if cfg.out:
        report.write(cfg.out, cfg.fmt)
        print(f"report: {cfg.out}")
        if cfg.figures and figure_fn is not None:
            print(f"figure: {figure_fn(_figure_path(cfg))}")
    return 0 if report.passed else 1


# ---------------------------------------------------------------------------
# subcommands


def cmd_eval(args) -> int:
    cfg = _run_config(args)
    base = args.base
    x = _parse_point(args.x, base)
    if not 0 <= x < 1:
        raise SystemExit("--x must lie in [0, 1)")
    terms = args.terms or SeriesTruncation.for_tolerance(base).terms
    weights = _weights_from_args(args) if args.family != "constant" \
        or args.value != 1 else None
    statistics = {}
    if weights is None:
        value, bound = eval_f(base, x, terms)
        res = functional_eq_residual(base, x, terms)
        statistics["value"] = render_rational(value)
        statistics["value_decimal"] = float(value)
        statistics["tail_bound"] = float(bound)
        statistics["residual_low"] = float(res.low)
        statistics["residual_high"] = float(res.high)
        checks = [BoundCheck.of("functional_equation_residual_contains_0",
                                0.0, low=float(res.low),
                                high=float(res.high))]
        f_for_figure = float(value)
    else:
        value, bound = eval_f_weighted(base, weights, x, terms)
        if isinstance(value, Fraction):
            statistics["value"] = render_rational(value)
            statistics["value_decimal"] = float(value)
        else:
            statistics["value_decimal"] = value
        statistics["tail_bound"] = float(bound)
        checks = []
        f_for_figure = float(value)
    report = ExperimentReport(
        experiment="eval", seed=0,
        config={"base": base, "x": str(x), "terms": terms,
                "weights": "standard" if weights is None
                else str(weights.describe())},
        statistics=statistics, checks=checks)

    def fig(path):
        from .figures import save_eval_figure
        return save_eval_figure(base, float(x), f_for_figure, path)

    return _emit(report, cfg, fig if weights is None else None)


def cmd_simulate(args) -> int:
    cfg = _run_config(args)
    mp = MemoryParameter(args.p)
    if args.paths == 1:
        walk = simulate(mp.p, args.n, args.seed)
        flips = int((walk.steps[1:] != walk.steps[:-1]).sum())
        statistics = {
            "t_n": int(walk.sums[-1]),
            "flips": flips,
            "flip_rate": flips / (args.n - 1) if args.n > 1 else 0.0,
            "expected_flip_rate": 1.0 - mp.p,
        }
        report = ExperimentReport(
            experiment="simulate", seed=args.seed,
            config={"p": mp.p, "n": args.n, "paths": 1},
            statistics=statistics, checks=[])
        if cfg.out:
            _write_path_table(walk, cfg)

        def fig(path):
            from .figures import save_walk_figure
            return save_walk_figure(walk, path)

        print(f"simulate: T_n = {statistics['t_n']}, "
              f"flip rate {statistics['flip_rate']:.6f} "
              f"(expected {statistics['expected_flip_rate']:.6f})")
        if cfg.out:
            print(f"path table: {cfg.out}")
            if cfg.figures:
                print(f"figure: {fig(_figure_path(cfg))}")
        return 0
    finals = final_positions(mp.p, args.n, args.paths, args.seed)
    var_ratio = float(finals.var()) / (args.n * mp.variance_factor)
    report = ExperimentReport(
        experiment="simulate_ensemble", seed=args.seed,
        config={"p": mp.p, "n": args.n, "paths": args.paths},
        statistics={"mean": float(finals.mean()),
                    "var_over_n": float(finals.var()) / args.n,
                    "variance_factor": mp.variance_factor,
                    "var_ratio": var_ratio},
        checks=[])

    def fig(path):
        from .figures import save_ensemble_figure
        return save_ensemble_figure(finals.astype(float), mp.p, args.n, path)

    return _emit(report, cfg, fig)


def _write_path_table(walk, cfg: RunConfig):
    with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
        if cfg.fmt == "json":
            import json
            json.dump({"tool": {"name": "takagiwalk",
                                "version": __version__},
                       "experiment": "simulate", "seed": walk.seed,
                       "config": {"p": walk.p, "n": walk.n},
                       "steps": walk.steps.tolist(),
                       "sums": walk.sums.tolist()}, fh, sort_keys=True,
                      indent=2)
            fh.write("\n")
            return
        fh.write(f"# takagiwalk {__version__}\n")
        fh.write("# experiment=simulate\n")
        fh.write(f"# seed={walk.seed}\n")
        fh.write(f"# config p={walk.p!r}\n")
        fh.write(f"# config n={walk.n}\n")
        fh.write("k,step,sum\n")
        fh.write("0,,0\n")
        for k in range(walk.n):
            fh.write(f"{k + 1},{int(walk.steps[k])},{int(walk.sums[k + 1])}\n")


def cmd_clt(args) -> int:
    cfg = _run_config(args)
    report = walk_clt_experiment(args.p, args.n, args.samples, args.seed,
                                 rescale=not args.no_rescale,
                                 ks_tol=args.ks_tol,
                                 keep_samples=cfg.figures)

    def fig(path):
        from .figures import save_distribution_figure
        return save_distribution_figure(report, path)

    return _emit(report, cfg, fig)


def cmd_takagi_clt(args) -> int:
    cfg = _run_config(args)
    report = takagi_clt_experiment(args.base, args.ell, args.samples,
                                   args.seed, depth=args.depth,
                                   side=args.side,
                                   parity_factor=not args.no_parity_factor,
                                   ks_tol=args.ks_tol,
                                   negative_tol=args.negative_tol,
                                   keep_samples=cfg.figures)

    def fig(path):
        from .figures import save_distribution_figure
        return save_distribution_figure(report, path)

    return _emit(report, cfg, fig)


def cmd_lil(args) -> int:
    cfg = _run_config(args)
    band = tuple(args.band) if args.band else None
    report = lil_tracker(args.p, args.n_max, args.paths, args.seed,
                         n_min=args.n_min, band=band,
                         keep_samples=cfg.figures)

    def fig(path):
        from .figures import save_lil_figure
        return save_lil_figure(report, path)

    return _emit(report, cfg, fig)


def cmd_k0tail(args) -> int:
    cfg = _run_config(args)
    report = k0_tail_experiment(args.base, args.ell, args.samples, args.seed,
                                depth=args.depth, j_max=args.j_max,
                                sigmas=args.sigmas)

    def fig(path):
        from .figures import save_k0_figure
        return save_k0_figure(report, path)

    return _emit(report, cfg, fig)


def cmd_localize(args) -> int:
    cfg = _run_config(args)
    weights = _weights_from_args(args)
    report = localization_experiment(args.p, weights, args.n, args.paths,
                                     args.seed, sigmas=args.sigmas)

    def fig(path):
        from .figures import save_localization_figure
        return save_localization_figure(report, path)

    return _emit(report, cfg, fig)


def cmd_classify(args) -> int:
    cfg = _run_config(args)
    weights = _weights_from_args(args)
    result = classify_mod.classify_sequence(weights, base=args.base)
    statistics = {"label": result.label.value,
                  "evidence": "; ".join(result.evidence)}
    probe = None
    if args.probe_n:
        if args.seed is None:
            raise SystemExit("--probe-n requires --seed")
        x = sample_point(args.base, max(2 * args.probe_n, 48), args.seed)
        probe = classify_mod.derivative_series_probe(
            args.base, weights, x, args.probe_n)
        statistics["probe_fluctuation"] = probe.window_fluctuation
    report = ExperimentReport(
        experiment="classify", seed=args.seed or 0,
        config={"base": args.base,
                "weights": str(weights.describe()),
                "probe_n": args.probe_n or 0},
        statistics=statistics, checks=[])

    def fig(path):
        from .figures import save_probe_figure
        return save_probe_figure(probe.partial_sums,
                                 f"slope series, {result.label.value}", path)

    return _emit(report, cfg, fig if probe is not None else None)


def cmd_spectral(args) -> int:
    cfg = _run_config(args)
    mp = MemoryParameter(args.p)
    statistics = {}
    worst = 0.0
    for j in range(args.j_max + 1):
        closed = correlation(mp.p, j)
        quad = correlation_by_quadrature(mp.p, j, nodes=args.nodes)
        statistics[f"corr_{j}"] = closed
        statistics[f"quad_{j}"] = quad
        worst = max(worst, abs(closed - quad))
    statistics["max_abs_diff"] = worst
    report = ExperimentReport(
        experiment="spectral", seed=0,
        config={"p": mp.p, "j_max": args.j_max, "nodes": args.nodes},
        statistics=statistics,
        checks=[BoundCheck.of("closed_form_matches_quadrature", worst,
                              high=args.tol)])

    def fig(path):
        from .figures import save_spectral_figure
        return save_spectral_figure(mp.p, path)

    return _emit(report, cfg, fig)


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="takagiwalk",
        description="Takagi-van der Waerden series and short-memory walks")
    ap.add_argument("--version", action="version",
                    version=f"takagiwalk {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("eval", help="evaluate the series exactly")
    sp.add_argument("--base", "--r", type=int, required=True)
    sp.add_argument("--x", required=True,
                    help="rational in [0,1) like 1/3, or digit string 0.0101")
    sp.add_argument("--terms", type=int)
    _add_weight_args(sp)
    _add_output_args(sp)
    sp.set_defaults(fn=cmd_eval)

    sp = sub.add_parser("simulate", help="simulate walks")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--paths", type=int, default=1)
    sp.add_argument("--seed", type=int, required=True)
    _add_output_args(sp)
    sp.set_defaults(fn=cmd_simulate)

    sp = sub.add_parser("clt", help="walk central limit experiment")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--n", type=int, default=10_000)
    sp.add_argument("--samples", type=int, default=100_000)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--ks-tol", type=float)
    sp.add_argument("--no-rescale", action="store_true",
                    help="omit the variance factor (negative control)")
    _add_output_args(sp)
    sp.set_defaults(fn=cmd_clt)

    sp = sub.add_parser("takagi-clt",
                        help="normalized increment distribution experiment")
    sp.add_argument("--base", "--r", type=int, required=True)
    sp.add_argument("--ell", type=int, required=True,
                    help="increment scale, h = base**-ell")
    sp.add_argument("--samples", type=int, default=100_000)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--depth", type=int)
    sp.add_argument("--side", choices=("right", "left"), default="right")
    sp.add_argument("--ks-tol", type=float)
    sp.add_argument("--negative-tol", type=float)
    sp.add_argument("--no-parity-factor", action="store_true")
    _add_output_args(sp)
    sp.set_defaults(fn=cmd_takagi_clt)

    sp = sub.add_parser("lil", help="iterated-logarithm running maxima")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--n-max", type=int, default=1_000_000)
    sp.add_argument("--paths", type=int, default=100)
    sp.add_argument("--n-min", type=int, default=100)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--band", type=float, nargs=2,
                    metavar=("LOW", "HIGH"))
    _add_output_args(sp)
    sp.set_defaults(fn=cmd_lil)

    sp = sub.add_parser("k0tail", help="digit agreement tail frequencies")
    sp.add_argument("--base", "--r", type=int, required=True)
    sp.add_argument("--ell", type=int, default=16)
    sp.add_argument("--samples", type=int, default=100_000)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--depth", type=int)
    sp.add_argument("--j-max", type=int, default=10)
    sp.add_argument("--sigmas", type=float, default=3.0)
    _add_output_args(sp)
    sp.set_defaults(fn=cmd_k0tail)

    sp = sub.add_parser("localize",
                        help="weighted bridge moments vs exact law")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--n", type=int, nargs="+", required=True)
    sp.add_argument("--paths", type=int, default=10_000)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--sigmas", type=float, default=3.0)
    _add_weight_args(sp)
    _add_output_args(sp)
    sp.set_defaults(fn=cmd_localize)

    sp = sub.add_parser("classify",
                        help="differentiability class of a weight family")
    sp.add_argument("--base", "--r", type=int, default=2)
    sp.add_argument("--probe-n", type=int,
                    help="also run the slope series probe to n terms")
    sp.add_argument("--seed", type=int)
    _add_weight_args(sp)
    _add_output_args(sp)
    sp.set_defaults(fn=cmd_classify)

    sp = sub.add_parser("spectral",
                        help="correlations vs spectral quadrature")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--j-max", "--j", type=int, default=20)
    sp.add_argument("--nodes", type=int, default=8192)
    sp.add_argument("--tol", type=float, default=1e-8)
    _add_output_args(sp)
    sp.set_defaults(fn=cmd_spectral)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
