"""Generalized exponential-Poisson (GEP) distribution: evaluation, moments,
entropies, likelihood inference and stress-strength estimation."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    GepParams,
    HazardShape,
    Sample,
    ShapeTag,
    cdf,
    classify_hazard_shape,
    eta_prime_sign,
    hazard,
    logpdf,
    median,
    pdf,
    quantile,
    sample,
    survival,
)
from .errors import GepError  # noqa: E402
from .series import SeriesControl, gep_raw_moment, order_stat_raw_moment  # noqa: E402
from .entropy import renyi_entropy, shannon_entropy  # noqa: E402
from .inference import FitConfig, fisher_info, fit_ep, fit_gep, lr_test, score, total_loglik  # noqa: E402
from .stress_strength import fit_ss, stress_strength_R  # noqa: E402
from .data import builtin_dataset, load_sample  # noqa: E402

__all__ = [
    "GepParams",
    "HazardShape",
    "Sample",
    "ShapeTag",
    "cdf",
    "classify_hazard_shape",
    "eta_prime_sign",
    "hazard",
    "logpdf",
    "median",
    "pdf",
    "quantile",
    "sample",
    "survival",
    "GepError",
    "SeriesControl",
    "gep_raw_moment",
    "order_stat_raw_moment",
    "renyi_entropy",
    "shannon_entropy",
    "FitConfig",
    "fisher_info",
    "fit_ep",
    "fit_gep",
    "lr_test",
    "score",
    "total_loglik",
    "fit_ss",
    "stress_strength_R",
    "builtin_dataset",
    "load_sample",
]
