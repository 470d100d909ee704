"""Likelihood inference for the GEP distribution and its EP sub-model.

Fits maximize the log-likelihood over (log lam, log beta, log alpha) with
BFGS from a deterministic multistart design, followed by Newton polishing.
The surface is multimodal: EP fits of the same data can sit at lam ~ 30 or
drift to the exponential limit lam -> 0, so a single start is not enough.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaincc, ndtri

from ._optim import FitConfig, multistart
from .core import GepParams, Sample, logpdf
from .errors import DomainError, IntervalUnavailableError
from .quadrature import FISHER_TOL, gep_expectation

__all__ = [
    "FitConfig",
    "FitResult",
    "LrResult",
    "ConditioningWarning",
    "PARAM_NAMES",
    "loglik_terms",
    "total_loglik",
    "score_terms",
    "score",
    "fit_gep",
    "fit_ep",
    "fisher_info",
    "normal_quantile",
    "confidence_interval",
    "confidence_intervals",
    "lr_test",
    "chi2_sf",
]

PARAM_NAMES = ("lam", "beta", "alpha")
LAMBDA_STARTS = (0.5, 2.0, 8.0, 32.0)
ALPHA_STARTS = (0.5, 1.0, 2.5)
# estimates beyond these are treated as sitting on the edge of the parameter space
BOUNDARY_LOW, BOUNDARY_HIGH = 1e-6, 1e6


class ConditioningWarning(UserWarning):
    """The Fisher information is not positive definite."""


@dataclass
class FitResult:
    model: str
    params: GepParams
    loglik: float
    converged: bool
    iterations: int
    n: int
    covariance: np.ndarray
    level: float = 0.95
    intervals: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    @property
    def estimates(self) -> dict:
        return dict(zip(PARAM_NAMES, self.params.as_tuple()))


@dataclass(frozen=True)
class LrResult:
    statistic: float
    df: int
    p_value: float
    gep: FitResult | None = None
    ep: FitResult | None = None


# -- likelihood ------------------------------------------------------------------


def _values(sample) -> np.ndarray:
    return Sample.coerce(sample).values


def loglik_terms(params: GepParams, sample) -> np.ndarray:
    return np.asarray(logpdf(params, _values(sample)))


def total_loglik(params: GepParams, sample) -> float:
    return math.fsum(loglik_terms(params, sample))


def score_terms(params: GepParams, x) -> np.ndarray:
    """Per-observation gradient of the log-density, shape (n, 3) ordered (lam, beta, alpha)."""
    x = np.asarray(x, dtype=float)
    lam, beta, alpha = params.as_tuple()
    z = np.exp(-beta * x)
    one_minus_z = -np.expm1(-beta * x)
    w = lam * one_minus_z
    d = np.expm1(w)  # exp(lam - lam e^{-beta x}) - 1
    shape = (alpha - 1.0) / d
    d_lam = 1.0 / lam - alpha / math.expm1(lam) + one_minus_z * (shape - 1.0)
    d_beta = 1.0 / beta - x + lam * x * z * (shape - 1.0)
    d_alpha = 1.0 / alpha - math.log(-math.expm1(-lam)) + np.log(-np.expm1(-w))
    return np.column_stack([d_lam, d_beta, d_alpha])


def score(params: GepParams, sample) -> np.ndarray:
    t = score_terms(params, _values(sample))
    return np.array([math.fsum(t[:, k]) for k in range(3)])


# -- fitting -----------------------------------------------------------------------


def _starts(x: np.ndarray, config: FitConfig, with_alpha: bool) -> list[np.ndarray]:
    log_beta0 = -math.log(float(np.mean(x)))
    alphas = ALPHA_STARTS if with_alpha else (1.0,)
    starts = []
    for lam0 in LAMBDA_STARTS:
        for a0 in alphas:
            s = [math.log(lam0), log_beta0]
            starts.append(np.array(s + [math.log(a0)] if with_alpha else s))
    rng = np.random.default_rng(config.seed)
    for _ in range(config.multistart_points):
        s = [rng.uniform(math.log(0.05), math.log(50.0)), log_beta0 + rng.normal(0.0, 0.5)]
        if with_alpha:
            s.append(rng.uniform(math.log(0.2), math.log(10.0)))
        starts.append(np.array(s))
    return starts


def _objective(x: np.ndarray, with_alpha: bool):
    def fun(theta):
        lam, beta = math.exp(theta[0]), math.exp(theta[1])
        alpha = math.exp(theta[2]) if with_alpha else 1.0
        p = GepParams(lam, beta, alpha)
        ll = math.fsum(np.asarray(logpdf(p, x)))
        s = score_terms(p, x).sum(axis=0) * np.array([lam, beta, alpha])
        grad = s if with_alpha else s[:2]
        return -ll, -grad

    return fun


def _fit(sample, config: FitConfig, with_alpha: bool, level: float, starts=None) -> FitResult:
    x = _values(sample)
    model = "gep" if with_alpha else "ep"
    need = 3 if with_alpha else 2
    if x.size < need:
        raise DomainError(f"{model} fit needs at least {need} observations, got {x.size}")
    if x.size < 4:
        warnings.warn(f"fitting {model} to only {x.size} observations", stacklevel=3)
    all_starts = list(starts or []) + _starts(x, config, with_alpha)
    best, outcomes = multistart(_objective(x, with_alpha), all_starts, config, f"{model} fit")
    theta = np.exp(best.theta)
    params = GepParams(theta[0], theta[1], theta[2] if with_alpha else 1.0)
    free = params.as_tuple()[:need]
    boundary = [n for n, v in zip(PARAM_NAMES, free) if v < BOUNDARY_LOW or v > BOUNDARY_HIGH]
    diagnostics = {
        "grad_norm": best.grad_norm,
        "starts": len(outcomes),
        "converged_starts": sum(o.converged for o in outcomes),
        "boundary": boundary,
    }
    cov = np.full((3, 3), np.nan)
    if not boundary:
        cov = _covariance(params, x.size, with_alpha, diagnostics)
    else:
        diagnostics["covariance_note"] = "estimate on the edge of the parameter space; Wald covariance not formed"
    fit = FitResult(model, params, -best.value, best.converged, best.iterations, int(x.size), cov, level)
    fit.diagnostics = diagnostics
    fit.intervals = confidence_intervals(fit, level)
    return fit


def _covariance(params, n, with_alpha, diagnostics):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ConditioningWarning)
        info = fisher_info(params, n)
    if caught:
        diagnostics["fisher_warning"] = str(caught[0].message)
    k = 3 if with_alpha else 2
    cov = np.zeros((3, 3))
    try:
        cov[:k, :k] = np.linalg.inv(info[:k, :k])
    except np.linalg.LinAlgError:
        diagnostics["covariance_note"] = "singular Fisher information"
        return np.full((3, 3), np.nan)
    if not with_alpha:
        diagnostics["covariance_note"] = "alpha fixed at 1; (lam, beta) block inverted, alpha row/column zero"
    return 0.5 * (cov + cov.T)


def fit_gep(sample, config: FitConfig = FitConfig(), level: float = 0.95, starts=None) -> FitResult:
    """Maximum-likelihood fit of all three GEP parameters.

    ``starts`` optionally prepends extra (log lam, log beta, log alpha) start points.
    """
    return _fit(sample, config, True, level, starts)


def fit_ep(sample, config: FitConfig = FitConfig(), level: float = 0.95) -> FitResult:
    """Maximum-likelihood fit of the EP sub-model (alpha fixed at 1)."""
    return _fit(sample, config, False, level)


# -- Fisher information ------------------------------------------------------------


def _fisher_closed_form(params: GepParams, tol: float) -> np.ndarray:
    lam, beta, alpha = params.as_tuple()

    def E(g):
        return gep_expectation(params, g, tol).value

    def parts(x):
        z = math.exp(-beta * x)
        one_minus_z = -math.expm1(-beta * x)
        d = math.expm1(lam * one_minus_z)
        # exp(lam) * exp(-lam z) == d + 1
        return z, one_minus_z, d

    def g_ll(x):
        z, omz, d = parts(x)
        return (d + 1.0) * (omz / d) ** 2

    def g_lb(x):
        z, omz, d = parts(x)
        return -x * z * omz * (d + 1.0) / d**2

    def g_bb1(x):
        z, omz, d = parts(x)
        return x * x * z * ((alpha - 1.0) / d - 1.0)

    def g_bb2(x):
        z, omz, d = parts(x)
        return x * x * z * z * (d + 1.0) / d**2

    mean = E(lambda x: x)
    mean_e = E(lambda x: math.exp(-beta * x))
    mean_xe = E(lambda x: x * math.exp(-beta * x))
    em1 = math.expm1(lam)

    k_ll = 1.0 / lam**2 - alpha * math.exp(-lam) / math.expm1(-lam) ** 2 + (alpha - 1.0) * E(g_ll)
    k_lb = -(mean - 1.0 / beta) / lam - lam * (alpha - 1.0) * E(g_lb)
    k_la = 1.0 / em1 - (1.0 + alpha / em1 - 1.0 / lam - mean_e) / (alpha - 1.0)
    k_bb = 1.0 / beta**2 + lam * E(g_bb1) + (alpha - 1.0) * lam**2 * E(g_bb2)
    k_ba = (1.0 / beta - mean - lam * mean_xe) / (alpha - 1.0)
    k_aa = 1.0 / alpha**2
    return np.array([[k_ll, k_lb, k_la], [k_lb, k_bb, k_ba], [k_la, k_ba, k_aa]])


def _fisher_numeric(params: GepParams, tol: float) -> np.ndarray:
    """Expected negative Hessian from central differences of the analytic score."""
    theta = np.array(params.as_tuple())
    h = 1e-5 * theta

    def hessian_row(x, i):
        up, down = theta.copy(), theta.copy()
        up[i] += h[i]
        down[i] -= h[i]
        su = score_terms(GepParams(*up), [x])[0]
        sd = score_terms(GepParams(*down), [x])[0]
        return -(su - sd) / (2 * h[i])

    K = np.empty((3, 3))
    for i in range(3):
        for j in range(i, 3):
            K[i, j] = gep_expectation(params, lambda x, i=i, j=j: float(hessian_row(x, i)[j]), tol).value
            K[j, i] = K[i, j]
    return K


def fisher_info(params: GepParams, n: int = 1, tol: float = FISHER_TOL, method: str = "auto") -> np.ndarray:
    """Expected information K_n(theta) = n * K_1(theta), ordered (lam, beta, alpha).

    ``method='auto'`` uses the closed-form entries except within 1e-3 of
    alpha = 1, where two entries carry a 1/(alpha-1) factor; there the
    expected negative Hessian is integrated directly.
    """
    if int(n) != n or n < 1:
        raise DomainError("n must be a positive integer")
    if method == "auto":
        method = "numeric" if abs(params.alpha - 1.0) < 1e-3 else "closed"
    if method == "closed":
        K = _fisher_closed_form(params, tol)
    elif method == "numeric":
        K = _fisher_numeric(params, tol)
    else:
        raise DomainError(f"unknown method {method!r}")
    K = n * K
    eig = np.linalg.eigvalsh(K)
    if eig[0] <= 0:
        warnings.warn(f"Fisher information is not positive definite (min eigenvalue {eig[0]:.3g})", ConditioningWarning)
    return K


# -- intervals and tests --------------------------------------------------------------


def normal_quantile(p: float) -> float:
    return float(ndtri(p))


def confidence_interval(fit: FitResult, name: str, level: float = 0.95) -> tuple[float, float]:
    if not 0.5 < level < 1.0:
        raise DomainError("level must lie in (0.5, 1)")
    i = PARAM_NAMES.index(name)
    var = fit.covariance[i, i]
    if not math.isfinite(var) or var < 0.0:
        raise IntervalUnavailableError(f"no usable variance for {name} ({var!r})")
    z = normal_quantile(1.0 - (1.0 - level) / 2.0)
    est = fit.params.as_tuple()[i]
    half = z * math.sqrt(var)
    return (est - half, est + half)


def confidence_intervals(fit: FitResult, level: float = 0.95) -> dict:
    """Wald intervals per parameter; ``None`` where the variance is unusable."""
    out = {}
    for name in PARAM_NAMES:
        try:
            out[name] = confidence_interval(fit, name, level)
        except IntervalUnavailableError:
            out[name] = None
    return out


def chi2_sf(w: float, k: int) -> float:
    """Upper tail of chi-square(k) at w via the regularized incomplete gamma Q(k/2, w/2)."""
    if w < 0:
        raise DomainError("w must be nonnegative")
    return float(gammaincc(k / 2.0, w / 2.0))


def lr_test(sample, config: FitConfig = FitConfig(), level: float = 0.95) -> LrResult:
    """Likelihood-ratio test of H0: alpha = 1 (EP) against the full GEP model."""
    ep = fit_ep(sample, config, level)
    gep = fit_gep(sample, config, level)
    if gep.loglik < ep.loglik:
        # nesting guard: the GEP surface contains every EP point, so restart from the EP optimum
        lam, beta, _ = ep.params.as_tuple()
        refit = fit_gep(sample, config, level, starts=[np.array([math.log(lam), math.log(beta), 0.0])])
        if refit.loglik > gep.loglik:
            gep = refit
    w = max(0.0, 2.0 * (gep.loglik - ep.loglik))
    return LrResult(w, 1, chi2_sf(w, 1), gep=gep, ep=ep)
