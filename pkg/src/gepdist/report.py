"""Fit reports: a self-describing, JSON-serializable record of one run."""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from ._optim import FitConfig
from .core import Sample
from .inference import PARAM_NAMES, FitResult, LrResult, fit_ep, fit_gep, lr_test

__all__ = ["FitReport", "run_fit_report", "format_report"]


def _clean(obj):
    """Convert numpy values and non-finite floats into plain JSON-safe values."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def _fit_dict(fit: FitResult) -> dict:
    return _clean(
        {
            "model": fit.model,
            "estimates": fit.estimates,
            "loglik": fit.loglik,
            "converged": fit.converged,
            "iterations": fit.iterations,
            "n": fit.n,
            "level": fit.level,
            "intervals": {k: (list(v) if v is not None else None) for k, v in fit.intervals.items()},
            "covariance": fit.covariance,
            "diagnostics": fit.diagnostics,
        }
    )


@dataclass
class FitReport:
    model: str
    source: dict
    seed: int
    config: dict
    level: float
    fits: list = field(default_factory=list)
    lr: dict | None = None
    tool: str = "gepdist"
    version: str = __version__

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, allow_nan=False) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> FitReport:
        names = {f.name for f in dataclasses.fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in names})

    @classmethod
    def from_json(cls, text: str) -> FitReport:
        return cls.from_dict(json.loads(text))

    def fit(self, model: str) -> dict:
        for f in self.fits:
            if f["model"] == model:
                return f
        raise KeyError(model)


def run_fit_report(
    sample, model: str = "both", level: float = 0.95, config: FitConfig = FitConfig(), source: dict | None = None
) -> FitReport:
    """Run the requested fits (and the LR test for ``model='both'``)."""
    sample = Sample.coerce(sample)
    if model not in ("ep", "gep", "both"):
        raise ValueError(f"model must be ep, gep or both, got {model!r}")
    report = FitReport(
        model=model,
        source=_clean({"n": len(sample), **(source or {})}),
        seed=config.seed,
        config=_clean(dataclasses.asdict(config)),
        level=level,
    )
    if model == "both":
        lr: LrResult = lr_test(sample, config, level)
        report.fits = [_fit_dict(lr.ep), _fit_dict(lr.gep)]
        report.lr = _clean({"statistic": lr.statistic, "df": lr.df, "p_value": lr.p_value, "null": "alpha = 1"})
    elif model == "gep":
        report.fits = [_fit_dict(fit_gep(sample, config, level))]
    else:
        report.fits = [_fit_dict(fit_ep(sample, config, level))]
    return report


def _g(v, digits=6):
    return "n/a" if v is None else f"{v:.{digits}g}"


def format_report(report: FitReport) -> str:
    lines = [f"source: {report.source.get('name', report.source.get('path', 'sample'))}  n={report.source['n']}"]
    pct = f"{100 * report.level:g}%"
    for f in report.fits:
        lines.append("")
        lines.append(f"{f['model'].upper()} fit  loglik={_g(f['loglik'])}  converged={f['converged']}")
        lines.append(f"  {'param':<6} {'estimate':>12} {pct + ' lower':>14} {pct + ' upper':>14}")
        free = PARAM_NAMES if f["model"] == "gep" else PARAM_NAMES[:2]
        for name in free:
            iv = f["intervals"].get(name)
            lo, hi = (iv if iv is not None else (None, None))
            lines.append(f"  {name:<6} {_g(f['estimates'][name]):>12} {_g(lo):>14} {_g(hi):>14}")
        boundary = f["diagnostics"].get("boundary")
        if boundary:
            lines.append(f"  note: {', '.join(boundary)} at the edge of the parameter space (exponential limit)")
    if report.lr is not None:
        lines.append("")
        lines.append(
            f"LR test H0: alpha = 1   w={_g(report.lr['statistic'])}  df={report.lr['df']}  p={_g(report.lr['p_value'])}"
        )
    return "\n".join(lines) + "\n"
