"""Closed-form evaluation of the generalized exponential-Poisson distribution.

A random variable X ~ GEP(lam, beta, alpha) has cdf

    F(x) = ((1 - exp(-lam + lam*exp(-beta*x))) / (1 - exp(-lam))) ** alpha

for x > 0.  ``alpha == 1`` is the exponential-Poisson (EP) law and
``lam -> 0`` with ``alpha == 1`` tends to the exponential law with rate beta.

Every function accepts a scalar or an array for ``x`` and returns the same
shape.  Internally everything is expressed through

    w = lam * (1 - exp(-beta*x))        so that  exp(-lam + lam*exp(-beta*x)) = exp(-w)

which keeps the large-``lam`` fits (lam ~ 30) free of overflow.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ParameterDomainError, TailOverflowError, TailUnderflowError

__all__ = [
    "GepParams",
    "Sample",
    "HazardShape",
    "ShapeTag",
    "logpdf",
    "pdf",
    "cdf",
    "survival",
    "log_survival",
    "hazard",
    "quantile",
    "median",
    "sample",
    "eta",
    "eta_prime",
    "eta_prime_sign",
    "classify_hazard_shape",
]


@dataclass(frozen=True)
class GepParams:
    """Parameter triple (lam, beta, alpha); all strictly positive and finite."""

    lam: float
    beta: float
    alpha: float = 1.0

    def __post_init__(self):
        for name in ("lam", "beta", "alpha"):
            value = getattr(self, name)
            try:
                value = float(value)
            except (TypeError, ValueError):
                raise ParameterDomainError(f"{name} must be a real number, got {value!r}") from None
            if not math.isfinite(value) or value <= 0.0:
                raise ParameterDomainError(f"{name} must be positive and finite, got {value!r}")
            object.__setattr__(self, name, value)

    @property
    def is_ep(self) -> bool:
        return self.alpha == 1.0

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.lam, self.beta, self.alpha)

    def with_alpha(self, alpha: float) -> GepParams:
        return GepParams(self.lam, self.beta, alpha)


@dataclass(frozen=True)
class Sample:
    """An ordered collection of strictly positive, finite observations."""

    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.array(self.values, dtype=float).ravel()
        if arr.size == 0:
            raise DomainError("a sample needs at least one observation")
        bad = ~np.isfinite(arr) | (arr <= 0.0)
        if bad.any():
            idx = int(np.flatnonzero(bad)[0])
            raise DomainError(f"observation {idx} is not a positive finite number: {arr[idx]!r}")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @classmethod
    def coerce(cls, data) -> Sample:
        return data if isinstance(data, cls) else cls(data)

    def __len__(self):
        return self.values.size

    def __iter__(self):
        return iter(self.values.tolist())

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    def __repr__(self):
        return f"Sample(n={len(self)}, mean={self.values.mean():.6g})"


class ShapeTag(str, enum.Enum):
    DECREASING = "Decreasing"
    INCREASING = "Increasing"
    UPSIDE_DOWN_BATHTUB = "UpsideDownBathtub"
    UNDETERMINED = "Undetermined"


@dataclass(frozen=True)
class HazardShape:
    tag: ShapeTag
    grid_size: int = 0
    sign_changes: int = 0
    by_theorem: bool = False


# -- numerically careful building blocks ----------------------------------


def _log1mexp(w):
    """log(1 - exp(-w)) for w >= 0."""
    w = np.asarray(w, dtype=float)
    with np.errstate(divide="ignore"):
        return np.where(w < math.log(2.0), np.log(-np.expm1(-w)), np.log1p(-np.exp(-w)))


def _logexpm1_of_log(logy):
    """log(exp(y) - 1) given log(y); exact in the tiny-y regime."""
    logy = np.asarray(logy, dtype=float)
    y = np.exp(np.minimum(logy, 700.0))
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        small = logy + 0.5 * y
        mid = np.log(np.expm1(y))
        big = y + np.log1p(-np.exp(-y))
    return np.where(logy < -40.0, small, np.where(y < 30.0, mid, big))


def _as_x(x):
    arr = np.asarray(x, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < 0.0):
        raise DomainError(f"x must be nonnegative, got {x!r}")
    return arr


def _out(arr, like):
    return float(arr) if np.ndim(like) == 0 else arr


def _w(params: GepParams, x):
    return params.lam * -np.expm1(-params.beta * x)


def _log_ep_cdf_sf(params: GepParams, x):
    """(log G_EP(x), log S_EP(x)) computed without cancellation at either end."""
    lam, beta = params.lam, params.beta
    w = _w(params, x)
    log_norm = float(_log1mexp(lam))
    # 1 - G_EP = expm1(lam*exp(-beta x)) / expm1(lam)
    log_sf = _logexpm1_of_log(math.log(lam) - beta * x) - _logexpm1_of_log(math.log(lam))
    with np.errstate(divide="ignore"):
        log_cdf_left = _log1mexp(w) - log_norm
        log_cdf_right = np.log1p(-np.exp(np.minimum(log_sf, 0.0)))
    log_cdf = np.where(log_sf < math.log(0.5), log_cdf_right, log_cdf_left)
    return np.minimum(log_cdf, 0.0), np.minimum(log_sf, 0.0)


# -- distribution functions -------------------------------------------------


def logpdf(params: GepParams, x):
    xa = _as_x(x)
    lam, beta, alpha = params.as_tuple()
    w = _w(params, xa)
    base = math.log(alpha * lam * beta) - alpha * float(_log1mexp(lam)) - w - beta * xa
    if alpha == 1.0:
        return _out(base, x)
    with np.errstate(invalid="ignore"):
        shape_term = (alpha - 1.0) * _log1mexp(w)
    return _out(base + shape_term, x)


def pdf(params: GepParams, x):
    """Density f(x); equals 0 at x=0 when alpha > 1 and diverges there when alpha < 1."""
    return _out(np.exp(np.asarray(logpdf(params, x))), x)


def log_cdf(params: GepParams, x):
    xa = _as_x(x)
    lg, _ = _log_ep_cdf_sf(params, xa)
    return _out(params.alpha * lg, x)


def cdf(params: GepParams, x):
    return _out(np.exp(np.asarray(log_cdf(params, x))), x)


def log_survival(params: GepParams, x):
    xa = _as_x(x)
    alpha = params.alpha
    lg, ls = _log_ep_cdf_sf(params, xa)
    with np.errstate(divide="ignore"):
        direct = np.log(-np.expm1(alpha * lg))
    # deep right tail: 1 - (1-s)^alpha = alpha*s*(1 + O(s))
    tail = math.log(alpha) + ls
    return _out(np.where(ls < -40.0, tail, direct), x)


def survival(params: GepParams, x):
    """1 - F(x), formed so that survival + cdf == 1 to rounding."""
    xa = _as_x(x)
    lg, ls = _log_ep_cdf_sf(params, xa)
    direct = -np.expm1(params.alpha * lg)
    tail = params.alpha * np.exp(ls)
    return _out(np.where(ls < -40.0, tail, direct), x)


def hazard(params: GepParams, x):
    """Failure rate f(x)/s(x), evaluated in log space."""
    xa = _as_x(x)
    ls = np.asarray(log_survival(params, xa))
    if np.any(np.isneginf(ls)):
        bad = np.atleast_1d(xa)[np.atleast_1d(np.isneginf(ls))][0]
        raise TailUnderflowError(float(bad))
    return _out(np.exp(np.asarray(logpdf(params, xa)) - ls), x)


def quantile(params: GepParams, q):
    """Closed-form inverse of the cdf for 0 <= q < 1."""
    qa = np.asarray(q, dtype=float)
    if np.any(np.isnan(qa)) or np.any(qa < 0.0) or np.any(qa >= 1.0):
        raise DomainError(f"q must lie in [0, 1), got {q!r}")
    lam, beta, alpha = params.as_tuple()
    with np.errstate(divide="ignore"):
        q_root = np.exp(np.log(qa) / alpha)
    # log of 1 - q**(1/alpha) * (1 - exp(-lam)), which lies in [-lam, 0]
    inner = np.log1p(-q_root * -math.expm1(-lam))
    ratio = inner / lam
    if np.any(ratio <= -1.0):
        raise TailOverflowError(f"quantile for q={q!r} overflows the representable range")
    return _out(np.maximum(-np.log1p(ratio) / beta, 0.0), q)


def median(params: GepParams) -> float:
    return quantile(params, 0.5)


def sample(params: GepParams, n: int, seed=None, *, rng: np.random.Generator | None = None) -> Sample:
    """Draw ``n`` i.i.d. variates by inverse transform of uniforms on [0, 1)."""
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    if rng is None:
        rng = np.random.default_rng(seed)
    u = rng.random(int(n))
    x = quantile(params, u)
    # u == 0 maps to x == 0, which is not a valid observation
    x = np.where(x > 0.0, x, np.nextafter(0.0, 1.0))
    return Sample(x)


# -- hazard shape ------------------------------------------------------------


def eta(params: GepParams, x):
    """-f'(x)/f(x)."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0.0):
        raise DomainError("eta is defined for x > 0")
    lam, beta, alpha = params.as_tuple()
    z = np.exp(-beta * xa)
    r = 1.0 / np.expm1(_w(params, xa))
    return _out(-lam * beta * (alpha - 1.0) * z * r + beta * (lam * z + 1.0), x)


def eta_prime(params: GepParams, x):
    """Derivative of eta; its sign drives the monotonicity of the failure rate."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0.0):
        raise DomainError("eta_prime is defined for x > 0")
    lam, beta, alpha = params.as_tuple()
    z = np.exp(-beta * xa)
    r = 1.0 / np.expm1(_w(params, xa))
    bracket = (alpha - 1.0) * r * (1.0 + lam * z * (1.0 + r)) - 1.0
    return _out(lam * beta * beta * z * bracket, x)


def eta_prime_sign(params: GepParams, x) -> int:
    xa = float(x)
    if xa <= 0.0:
        raise DomainError("eta_prime_sign is defined for x > 0")
    lam, _, alpha = params.as_tuple()
    z = math.exp(-params.beta * xa)
    r = 1.0 / math.expm1(float(_w(params, xa)))
    bracket = (alpha - 1.0) * r * (1.0 + lam * z * (1.0 + r)) - 1.0
    return int(np.sign(bracket))


def classify_hazard_shape(params: GepParams, grid_size: int = 256) -> HazardShape:
    """Classify the failure-rate shape.

    alpha <= 1 and alpha > exp(lam) are settled analytically; in between the
    hazard is scanned on a log-spaced grid between the 0.001 and 0.999
    quantiles and classified by the sign pattern of successive differences.
    """
    if grid_size < 16:
        raise DomainError("grid_size must be at least 16")
    if params.alpha <= 1.0:
        return HazardShape(ShapeTag.DECREASING, by_theorem=True)
    if params.alpha > math.exp(params.lam):
        return HazardShape(ShapeTag.INCREASING, by_theorem=True)

    lo, hi = quantile(params, 0.001), quantile(params, 0.999)
    xs = np.geomspace(lo, hi, grid_size)
    h = np.asarray(hazard(params, xs))
    d = np.diff(h)
    signs = np.sign(np.where(np.abs(d) <= 1e-12 * np.max(np.abs(h)), 0.0, d))
    signs = signs[signs != 0]
    changes = int(np.count_nonzero(signs[1:] != signs[:-1]))
    if signs.size == 0 or changes > 1:
        tag = ShapeTag.UNDETERMINED
    elif changes == 0:
        tag = ShapeTag.INCREASING if signs[0] > 0 else ShapeTag.DECREASING
    elif signs[0] > 0:
        tag = ShapeTag.UPSIDE_DOWN_BATHTUB
    else:
        tag = ShapeTag.UNDETERMINED
    return HazardShape(tag, grid_size=grid_size, sign_changes=changes)
