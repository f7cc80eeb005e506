"""Command line front end.

Exit codes: 0 success, 2 config error, 3 numeric failure, 4 I/O error.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .bounds import BoundKind, asymptotic_slope, bound_curve
from .errors import ConfigError, NumericError
from .experiments import (
    fit_to_json,
    load_config,
    read_ccdf_csv,
    reproduce,
    run_experiment,
    write_rows_csv,
    FIGURES,
    SCALES,
)
from .finite import FiniteModelParams
from .distributions import ExponentialPackets
from .stability import classify_finite, classify_slotted
from .tailfit import CcdfPoints, DEFAULT_WINDOW, fit_loglog_slope


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="aloha",
        description="Random-access delay simulator and tail analysis toolkit",
    )
    sub = p.add_subparsers(dest="command", required=True)

    for name in ("finite-sim", "slotted-sim"):
        s = sub.add_parser(name, help=f"run a {name.split('-')[0]} experiment config")
        s.add_argument("--config", required=True, help="JSON experiment config")
        s.add_argument("--out", required=True, help="output directory")
        s.add_argument("--workers", type=int, default=None)

    s = sub.add_parser("bounds", help="tabulate the analytic delay bound curves")
    s.add_argument("--M", type=int, required=True)
    s.add_argument("--lambda", dest="lam", type=float, required=True)
    s.add_argument("--nu", type=float, required=True)
    s.add_argument("--mu", type=float, required=True)
    s.add_argument("--n-max", type=int, required=True)
    s.add_argument("--out", required=True, help="output directory")

    s = sub.add_parser("fit", help="fit a log-log tail slope to a ccdf.csv")
    s.add_argument("ccdf", help="path to a ccdf.csv file")
    s.add_argument(
        "--window",
        default=None,
        help="survival window as lo:hi, e.g. 1e-3:1e-1",
    )

    s = sub.add_parser("classify", help="throughput stability verdict")
    s.add_argument("--M", type=int)
    s.add_argument("--lambda", dest="lam", type=float)
    s.add_argument("--nu", type=float, required=True)
    s.add_argument("--mu", type=float)
    s.add_argument("--alpha", type=float)

    s = sub.add_parser("reproduce", help="run a preset figure experiment")
    s.add_argument("figure", choices=FIGURES)
    s.add_argument("--scale", choices=SCALES, default="desk")
    s.add_argument("--out", required=True, help="output root directory")
    s.add_argument("--workers", type=int, default=None)
    return p


def _cmd_sim(args, engine: str) -> int:
    config = load_config(args.config)
    if config.engine != engine:
        raise ConfigError(
            f"config engine is {config.engine!r}; use the matching subcommand"
        )
    result = run_experiment(config, args.out, workers=args.workers)
    print(f"wrote {result.n_samples} samples to {result.out_dir}")
    if result.fit is not None:
        print(
            f"fitted slope {result.fit.slope:.4f} "
            f"(stderr {result.fit.stderr:.4f}, {result.fit.points_used} points)"
        )
    return 0


def _cmd_bounds(args) -> int:
    from pathlib import Path

    params = FiniteModelParams(
        M=args.M, lam=args.lam, nu=args.nu, packet=ExponentialPackets(rate=args.mu)
    )
    if args.n_max < 1:
        raise ConfigError(f"--n-max must be >= 1, got {args.n_max}")
    ns = np.unique(
        np.round(np.geomspace(1, args.n_max, min(400, args.n_max))).astype(np.int64)
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    lower = bound_curve(BoundKind.LOWER_N, ns, params)
    upper = bound_curve(BoundKind.UPPER_N, ns, params)
    write_rows_csv(
        out / "bounds.csv",
        ["n", "lower", "upper"],
        ([int(n), float(lo), float(hi)] for n, lo, hi in zip(ns, lower, upper)),
    )
    for kind, label in ((BoundKind.LOWER_N, "lower"), (BoundKind.UPPER_N, "upper")):
        slope = asymptotic_slope(kind, M=args.M, lam=args.lam, nu=args.nu, mu=args.mu)
        print(f"{label}: asymptotic slope {slope:.6f}")
    return 0


def _cmd_fit(args) -> int:
    x, surv = read_ccdf_csv(args.ccdf)
    window = DEFAULT_WINDOW
    if args.window is not None:
        try:
            a, b = (float(v) for v in args.window.split(":"))
        except ValueError:
            raise ConfigError(f"--window must be lo:hi, got {args.window!r}")
        window = (max(a, b), min(a, b))
    points = CcdfPoints(x=x, survival=surv, sample_count=len(x))
    fit = fit_loglog_slope(points, window)
    print(json.dumps(fit_to_json(fit, None, None), indent=2, sort_keys=True))
    return 0


def _cmd_classify(args) -> int:
    if args.alpha is not None:
        if args.M is not None or args.mu is not None:
            raise ConfigError("--alpha form takes only --alpha and --nu")
        verdict = classify_slotted(args.alpha, args.nu)
    else:
        if args.M is None or args.lam is None or args.mu is None:
            raise ConfigError(
                "classify needs --M --lambda --nu --mu, or --alpha --nu"
            )
        verdict = classify_finite(args.M, args.lam, args.nu, args.mu)
    print(
        json.dumps(
            {"verdict": verdict.verdict.value, "rule": verdict.rule},
            indent=2,
            sort_keys=True,
        )
    )
    return 0


def _cmd_reproduce(args) -> int:
    results = reproduce(args.figure, args.scale, args.out, workers=args.workers)
    for name, res in sorted(results.items()):
        slope = "n/a" if res.fit is None else f"{res.fit.slope:.4f}"
        ref = "n/a" if res.reference_slope is None else f"{res.reference_slope:.4f}"
        print(f"{name}: slope {slope} (reference {ref}), {res.n_samples} samples")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "finite-sim":
            return _cmd_sim(args, "finite")
        if args.command == "slotted-sim":
            return _cmd_sim(args, "slotted")
        if args.command == "bounds":
            return _cmd_bounds(args)
        if args.command == "fit":
            return _cmd_fit(args)
        if args.command == "classify":
            return _cmd_classify(args)
        if args.command == "reproduce":
            return _cmd_reproduce(args)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
