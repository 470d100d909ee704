"""Rényi and Shannon entropies of the GEP distribution.

Quadrature is the authority for both entropies.  The series representations
are computed alongside and are only handed back after they agree with it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .core import GepParams, logpdf, quantile
from .errors import DomainError, SeriesTruncationError, ValidationError
from .quadrature import ORACLE_TOL, gep_expectation, integrate_unit
from .series import (
    DEFAULT_CONTROL,
    SeriesControl,
    _binomial_weighted_sum,
    _poisson_inverse_power,
    gep_raw_moment,
)

__all__ = [
    "a_j_series",
    "renyi_entropy",
    "renyi_entropy_series",
    "renyi_entropy_quadrature",
    "shannon_entropy",
    "shannon_from_renyi_limit",
    "ShannonEntropy",
    "mean_exp_neg_beta_x",
]

AGREEMENT_TOL = 1e-6


def _check_gamma(gamma):
    if not (gamma > 0) or gamma == 1.0 or not math.isfinite(gamma):
        raise DomainError(f"Rényi order must be positive and different from 1, got {gamma!r}")


def _check_integrable(params: GepParams, gamma: float):
    # near 0, f(x) ~ x**(alpha-1) so f**gamma is integrable iff (alpha-1)*gamma > -1
    if (params.alpha - 1.0) * gamma + 1.0 <= 0.0:
        raise DomainError(
            f"integral of f**gamma diverges for alpha={params.alpha}, gamma={gamma}: need (alpha-1)*gamma + 1 > 0"
        )


def a_j_series(lam: float, gamma: float, j: int, control: SeriesControl = DEFAULT_CONTROL) -> float:
    """A_j(lam, gamma) = sum_k (lam (gamma + j))**k / (k! (k + gamma))."""
    if not (lam > 0 and gamma > 0) or j < 0:
        raise DomainError("a_j_series needs lam > 0, gamma > 0, j >= 0")
    c = lam * (gamma + j)
    term = 1.0 / gamma
    parts = [term]
    total, quiet = term, 0
    for k in range(control.max_terms):
        term *= c / (k + 1.0) * (k + gamma) / (k + 1.0 + gamma)
        parts.append(term)
        total += term
        if not math.isfinite(total):
            raise SeriesTruncationError("A_j series overflowed", partial_sum=total, last_term=term, terms=k + 2)
        quiet = quiet + 1 if control.small(term, total) else 0
        if quiet >= 2:
            return math.fsum(parts)
    raise SeriesTruncationError("A_j series did not converge", partial_sum=total, last_term=term, terms=len(parts))


def _scaled_a_j(lam: float, gamma: float, j: int) -> float:
    """exp(-lam*(gamma + j)) * A_j, i.e. E[1/(K + gamma)] with K ~ Poisson(lam*(gamma + j))."""
    return _poisson_inverse_power(lam * (gamma + j), gamma, 1.0)


def renyi_entropy_series(params: GepParams, gamma: float, control: SeriesControl = DEFAULT_CONTROL) -> float:
    """Rényi entropy from the binomial expansion of {1 - exp(-w)}**((alpha-1) gamma).

    The j-th term carries the factor exp(-lam*j) coming from exp(j(-lam + lam e^{-beta x})).
    """
    _check_gamma(gamma)
    _check_integrable(params, gamma)
    lam, beta, alpha = params.as_tuple()
    g = (alpha - 1.0) * gamma

    def h_mp(j):
        nu = mpmath.mpf(lam) * (gamma + j)
        return mpmath.exp(-nu) * mpmath.hyp1f1(gamma, gamma + 1, nu) / gamma

    s = _binomial_weighted_sum(g, lambda j: _scaled_a_j(lam, gamma, j), h_mp, g + 1.0, control)
    # the exp(lam*gamma) left over from the scaling cancels the exp(-lam*gamma) prefactor
    log_integral = (
        gamma * math.log(alpha * lam * beta) - alpha * gamma * math.log(-math.expm1(-lam)) - math.log(beta) + math.log(s)
    )
    return log_integral / (1.0 - gamma)


def renyi_entropy_quadrature(params: GepParams, gamma: float, tol: float = ORACLE_TOL) -> float:
    """(1/(1-gamma)) log of the integral of f**gamma, taken as E[f(X)**(gamma-1)]."""
    _check_gamma(gamma)
    _check_integrable(params, gamma)
    res = integrate_unit(lambda u: math.exp((gamma - 1.0) * logpdf(params, quantile(params, u))), tol)
    return math.log(res.value) / (1.0 - gamma)


def renyi_entropy(
    params: GepParams, gamma: float, control: SeriesControl = DEFAULT_CONTROL, tol: float = ORACLE_TOL
) -> float:
    """Rényi entropy of order gamma; the series value, confirmed by quadrature to 1e-6."""
    series = renyi_entropy_series(params, gamma, control)
    oracle = renyi_entropy_quadrature(params, gamma, tol)
    if abs(series - oracle) > AGREEMENT_TOL:
        raise ValidationError(
            f"Rényi series {series!r} disagrees with quadrature {oracle!r}", series_value=series, oracle_value=oracle
        )
    return series


def _exp_neg_beta_x_sum(params: GepParams, control: SeriesControl) -> float:
    """sum_{k>=1} z**k / (k (k + alpha)) with z = 1 - exp(-lam)."""
    alpha = params.alpha
    log_z = math.log(-math.expm1(-params.lam))
    parts, total = [], 0.0
    block = 512
    for k0 in range(1, control.max_terms + 1, block):
        k = np.arange(k0, min(k0 + block, control.max_terms + 1), dtype=float)
        t = np.exp(k * log_z) / (k * (k + alpha))
        parts.append(t)
        total += float(t.sum())
        small = np.abs(t) <= control.rel_tol * abs(total) + control.abs_tol
        pair = small[1:] & small[:-1]
        if pair.any():
            stop = int(np.flatnonzero(pair)[0]) + 2
            parts[-1] = t[:stop]
            return math.fsum(np.concatenate(parts))
    raise SeriesTruncationError(
        "series for E(exp(-beta X)) did not converge (lam too large for direct summation)",
        partial_sum=total,
        last_term=float(parts[-1][-1]),
        terms=control.max_terms,
    )


def mean_exp_neg_beta_x(params: GepParams, control: SeriesControl = DEFAULT_CONTROL, tol: float = ORACLE_TOL) -> float:
    """E(exp(-beta X)) = 1 - (alpha/lam) sum_k (1 - e^{-lam})**k / (k (k + alpha)).

    The value is checked against quadrature before being returned.
    """
    beta = params.beta
    oracle = gep_expectation(params, lambda x: math.exp(-beta * x), tol).value
    series = 1.0 - params.alpha / params.lam * _exp_neg_beta_x_sum(params, control)
    if abs(series - oracle) > AGREEMENT_TOL:
        raise ValidationError(
            f"E(exp(-beta X)) series {series!r} disagrees with quadrature {oracle!r}",
            series_value=series,
            oracle_value=oracle,
        )
    return series


@dataclass(frozen=True)
class ShannonEntropy:
    value: float
    series_value: float | None
    discrepancy: float | None
    note: str = ""

    def __float__(self):
        return self.value


def shannon_entropy_series(params: GepParams, control: SeriesControl = DEFAULT_CONTROL) -> float:
    """-log(alpha lam beta) + log(1-e^{-lam}) + (alpha-1)/alpha + alpha*S + beta*E(X)."""
    lam, beta, alpha = params.as_tuple()
    s = _exp_neg_beta_x_sum(params, control)
    mean = gep_raw_moment(params, 1, control)
    return -math.log(alpha * lam * beta) + math.log(-math.expm1(-lam)) + (alpha - 1.0) / alpha + alpha * s + beta * mean


def shannon_entropy(
    params: GepParams, control: SeriesControl = DEFAULT_CONTROL, tol: float = ORACLE_TOL
) -> ShannonEntropy:
    """E[-log f(X)] by quadrature, with the series value reported alongside."""
    value = gep_expectation(params, lambda x: -logpdf(params, x), tol).value
    try:
        series = shannon_entropy_series(params, control)
    except SeriesTruncationError as exc:
        return ShannonEntropy(value, None, None, note=f"series unavailable: {exc}")
    return ShannonEntropy(value, series, series - value)


def shannon_from_renyi_limit(params: GepParams, step: float = 1e-3, control: SeriesControl = DEFAULT_CONTROL) -> float:
    """Symmetric two-point limit of the Rényi entropy at gamma = 1 -/+ step."""
    return 0.5 * (renyi_entropy(params, 1.0 - step, control) + renyi_entropy(params, 1.0 + step, control))
