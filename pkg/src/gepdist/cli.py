"""Command-line interface: ``gepdist <command> [options]``.

Exit status: 0 success, 2 usage error, 3 data/parse error, 4 optimization
failure, 5 numerical validation failure, 6 invalid values or insufficient data.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from ._optim import FitConfig
from .core import GepParams, cdf, hazard, pdf, quantile, sample as draw
from .data import DATASETS, builtin_dataset, load_sample
from .entropy import renyi_entropy, shannon_entropy
from .errors import (
    DataError,
    DomainError,
    GepError,
    OptimizationError,
    QuadratureError,
    SeriesTruncationError,
    ValidationError,
)
from .report import format_report, run_fit_report
from .series import gep_raw_moment, order_stat_raw_moment
from .stress_strength import fit_ss

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_OPTIMIZATION, EXIT_VALIDATION, EXIT_DOMAIN = 0, 2, 3, 4, 5, 6

GRID_OPS = {"pdf": pdf, "cdf": cdf, "hazard": hazard}


def emit_grid(params: GepParams, op: str, x_min: float, x_max: float, steps: int) -> str:
    """CSV text with header ``x,<op>`` and steps+1 uniformly spaced rows."""
    if op not in GRID_OPS:
        raise DomainError(f"grid op must be one of {sorted(GRID_OPS)}")
    if not (0.0 <= x_min < x_max) or steps < 2:
        raise DomainError("grid needs 0 <= min < max and steps >= 2")
    xs = np.linspace(x_min, x_max, steps + 1)
    ys = np.asarray(GRID_OPS[op](params, xs))
    rows = [f"x,{op}"] + [f"{x:.17g},{y:.17g}" for x, y in zip(xs, ys)]
    return "\n".join(rows) + "\n"


def _write_json(path, payload: str):
    Path(path).write_text(payload, encoding="utf-8")


def _add_data_args(p, positional="path"):
    p.add_argument(positional, nargs="?", help="text file with one value per line (or CSV with --column)")
    p.add_argument("--dataset", choices=sorted(DATASETS), help="use an embedded dataset instead of a file")
    p.add_argument("--column", type=int, default=None, help="zero-based CSV column")
    p.add_argument("--skip-header", action="store_true", help="ignore the first non-comment line")


def _add_fit_args(p):
    p.add_argument("--level", type=float, default=0.95, help="confidence level for Wald intervals")
    p.add_argument("--seed", type=int, default=0, help="seed for the jittered multistart points")
    p.add_argument("--json", metavar="PATH", help="write the machine-readable report here")


def _add_param_args(p):
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--alpha", type=float, default=1.0)


def _params(args) -> GepParams:
    return GepParams(args.lam, args.beta, args.alpha)


def _resolve_sample(args, parser):
    if args.dataset and args.path:
        parser.error("give either a file or --dataset, not both")
    if args.dataset:
        return builtin_dataset(args.dataset), {"name": args.dataset, "kind": "builtin"}
    if not args.path:
        parser.error("a data file or --dataset is required")
    return load_sample(args.path, args.column, args.skip_header), {"path": args.path, "kind": "file"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gepdist", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"gepdist {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="maximum-likelihood fit of EP and/or GEP")
    _add_data_args(p)
    p.add_argument("--model", choices=("ep", "gep", "both"), default="both")
    _add_fit_args(p)

    p = sub.add_parser("lr-test", help="likelihood-ratio test of alpha = 1")
    _add_data_args(p)
    _add_fit_args(p)

    p = sub.add_parser("ss-fit", help="joint fit of two samples and R = P(Y < X)")
    p.add_argument("x_path", help="strength sample X")
    p.add_argument("y_path", help="stress sample Y")
    p.add_argument("--column", type=int, default=None)
    p.add_argument("--skip-header", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", metavar="PATH")

    p = sub.add_parser("eval", help="pdf, cdf, hazard or quantile at one point")
    _add_param_args(p)
    p.add_argument("--op", choices=("pdf", "cdf", "hazard", "quantile"), required=True)
    p.add_argument("--at", type=float, required=True, help="x, or q for the quantile")

    p = sub.add_parser("moments", help="raw moment E(X^r), or of the order statistic X_{i:n}")
    _add_param_args(p)
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--i", type=int, default=None, help="order-statistic rank (with --n)")
    p.add_argument("--n", type=int, default=None, help="order-statistic sample size")

    p = sub.add_parser("entropy", help="Shannon entropy, or Rényi entropy with --gamma")
    _add_param_args(p)
    p.add_argument("--gamma", type=float, default=None)

    p = sub.add_parser("sample", help="draw a seeded random sample")
    _add_param_args(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("grid", help="CSV grid of pdf, cdf or hazard values")
    _add_param_args(p)
    p.add_argument("--op", choices=sorted(GRID_OPS), required=True)
    p.add_argument("--min", dest="x_min", type=float, default=0.0)
    p.add_argument("--max", dest="x_max", type=float, required=True)
    p.add_argument("--steps", type=int, default=100)

    p = sub.add_parser("dataset", help="print an embedded dataset")
    p.add_argument("name", choices=sorted(DATASETS))
    return parser


def _run(args, parser, out) -> int:
    cmd = args.command
    if cmd in ("fit", "lr-test"):
        data, source = _resolve_sample(args, parser)
        config = FitConfig(seed=args.seed)
        model = "both" if cmd == "lr-test" else args.model
        report = run_fit_report(data, model, args.level, config, source)
        out.write(format_report(report))
        if args.json:
            _write_json(args.json, report.to_json())
    elif cmd == "ss-fit":
        x = load_sample(args.x_path, args.column, args.skip_header)
        y = load_sample(args.y_path, args.column, args.skip_header)
        res = fit_ss(x, y, FitConfig(seed=args.seed))
        out.write(
            f"lam={res.lam:.6g}  beta={res.beta:.6g}  alpha1={res.alpha1:.6g}  alpha2={res.alpha2:.6g}\n"
            f"R-hat = P(Y < X) = {res.r_hat:.6g}   loglik={res.loglik:.6g}\n"
        )
        if args.json:
            doc = {
                "tool": "gepdist",
                "version": __version__,
                "seed": args.seed,
                "x_path": args.x_path,
                "y_path": args.y_path,
                "n": len(x),
                "m": len(y),
                **{k: getattr(res, k) for k in ("lam", "beta", "alpha1", "alpha2", "r_hat", "loglik", "converged")},
            }
            _write_json(args.json, json.dumps(doc, sort_keys=True, indent=2) + "\n")
    elif cmd == "eval":
        fn = {"pdf": pdf, "cdf": cdf, "hazard": hazard, "quantile": quantile}[args.op]
        out.write(f"{fn(_params(args), args.at):.17g}\n")
    elif cmd == "moments":
        p = _params(args)
        if (args.i is None) != (args.n is None):
            parser.error("--i and --n go together")
        value = gep_raw_moment(p, args.r) if args.i is None else order_stat_raw_moment(p, args.i, args.n, args.r)
        out.write(f"{value:.17g}\n")
    elif cmd == "entropy":
        p = _params(args)
        if args.gamma is None:
            res = shannon_entropy(p)
            out.write(f"{res.value:.17g}\n")
        else:
            out.write(f"{renyi_entropy(p, args.gamma):.17g}\n")
    elif cmd == "sample":
        s = draw(_params(args), args.n, seed=args.seed)
        out.write("".join(f"{v:.17g}\n" for v in s))
    elif cmd == "grid":
        out.write(emit_grid(_params(args), args.op, args.x_min, args.x_max, args.steps))
    elif cmd == "dataset":
        out.write("".join(f"{v:g}\n" for v in builtin_dataset(args.name)))
    return EXIT_OK


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args, parser, out)
    except DataError as exc:
        print(f"gepdist: data error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OptimizationError as exc:
        print(f"gepdist: optimization failed: {exc}", file=sys.stderr)
        return EXIT_OPTIMIZATION
    except (ValidationError, SeriesTruncationError, QuadratureError) as exc:
        print(f"gepdist: numerical validation failed: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (DomainError, GepError) as exc:
        print(f"gepdist: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def main_exit():
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
