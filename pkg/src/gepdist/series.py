"""Series machinery: binomial expansion coefficients, the Barnes extended
hypergeometric function, raw moments of EP/GEP variables and of GEP order
statistics, and the EP-mixture representation of the GEP density.

Two kinds of infinite sums appear here.  Positive-term power series (the
Barnes function) are summed term by term with a multiplicative recurrence.
The outer ``j`` sums of the moment formulas have power-law tails when the
shape is not an integer (terms decay like ``j**-(alpha + r + 1)``), so plain
truncation would need millions of terms; those sums are accumulated to a few
geometric checkpoints and the remainder is removed by Richardson
extrapolation with the known tail exponents.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy.special import gammaln, gammasgn

from .core import GepParams, _as_x, _out
from .core import pdf as gep_pdf
from .errors import DomainError, SeriesTruncationError

__all__ = [
    "SeriesControl",
    "HypergeomArgs",
    "expansion_coefficient",
    "binomial_series_coefficients",
    "barnes_F",
    "ep_raw_moment",
    "gep_raw_moment",
    "pdf_as_ep_mixture",
    "order_stat_pdf",
    "order_stat_raw_moment",
]


@dataclass(frozen=True)
class SeriesControl:
    """Truncation policy for every infinite series in the package.

    ``max_condition`` bounds sum(|terms|) / |sum|; beyond it the alternating
    head of a series has cancelled too much precision and the result is
    refused instead of returned.
    """

    rel_tol: float = 1e-12
    abs_tol: float = 1e-300
    max_terms: int = 10000
    max_condition: float = 1e7

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0 and self.max_terms >= 1 and self.max_condition > 1):
            raise DomainError(f"invalid SeriesControl {self!r}")

    def small(self, term: float, partial: float) -> bool:
        return abs(term) <= self.rel_tol * abs(partial) + self.abs_tol


DEFAULT_CONTROL = SeriesControl()


@dataclass(frozen=True)
class HypergeomArgs:
    numerator_params: tuple[float, ...]
    denominator_params: tuple[float, ...]
    argument: float

    def __post_init__(self):
        num = tuple(float(v) for v in self.numerator_params)
        den = tuple(float(v) for v in self.denominator_params)
        for d in den:
            if d == 0.0 or (d < 0 and d == math.floor(d)):
                raise DomainError(f"denominator parameter {d} is zero or a negative integer")
        if not (self.argument >= 0.0):
            raise DomainError("the Barnes function is only evaluated for nonnegative arguments")
        object.__setattr__(self, "numerator_params", num)
        object.__setattr__(self, "denominator_params", den)
        object.__setattr__(self, "argument", float(self.argument))


def _is_integer(a: float) -> bool:
    return abs(a - round(a)) < 1e-12


def expansion_coefficient(gamma: float, j: int) -> float:
    """Coefficient of z**j in (1 - z)**(gamma - 1): (-1)^j Gamma(gamma)/(Gamma(gamma-j) j!)."""
    if not gamma > 0:
        raise DomainError("gamma must be positive")
    if j < 0:
        raise DomainError("j must be nonnegative")
    b = gamma - j
    if _is_integer(gamma) and j >= round(gamma):
        return 0.0
    # Gamma(b) for b <= 0 non-integer: gammaln gives log|Gamma|, gammasgn the sign
    log_mag = gammaln(gamma) - gammaln(b) - gammaln(j + 1.0)
    sign = (-1.0) ** j * gammasgn(gamma) * gammasgn(b)
    return float(sign * math.exp(log_mag))


def binomial_series_coefficients(power: float, count: int) -> np.ndarray:
    """First ``count`` coefficients of (1 - z)**power by the ratio recurrence.

    Exact zeros appear past ``power`` when it is a nonnegative integer.
    """
    c = np.empty(count)
    if count == 0:
        return c
    c[0] = 1.0
    ratios = (np.arange(count - 1) - power) / np.arange(1, count)
    c[1:] = np.cumprod(ratios)
    if _is_integer(power) and power >= 0:
        c[int(round(power)) + 1 :] = 0.0
    return c


def barnes_F(args: HypergeomArgs, control: SeriesControl = DEFAULT_CONTROL) -> float:
    """Barnes extended hypergeometric function F_{p,q}(n, d; x)."""
    x = args.argument
    num, den = args.numerator_params, args.denominator_params
    term, total, comp = 1.0, 1.0, 0.0
    quiet = 0
    for k in range(control.max_terms):
        ratio = x / (k + 1.0)
        for a in num:
            ratio *= a + k
        for d in den:
            ratio /= d + k
        term *= ratio
        # Kahan summation
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        if not math.isfinite(total):
            raise SeriesTruncationError("Barnes series overflowed", partial_sum=total, last_term=term, terms=k + 2)
        quiet = quiet + 1 if control.small(term, total) else 0
        if quiet >= 2:
            return total
    raise SeriesTruncationError(
        f"Barnes series did not converge in {control.max_terms} terms",
        partial_sum=total,
        last_term=term,
        terms=control.max_terms,
    )


def _poisson_inverse_power(mu: float, shift: float, power: float) -> float:
    """E[(K + shift)**-power] for K ~ Poisson(mu).

    This is exp(-mu) times a positive power series in mu, so it stays finite
    for arguments where the series itself would overflow.
    """
    width = 12.0 * math.sqrt(mu) + 40.0
    k = np.arange(max(0, int(mu - width)), int(mu + width) + 1, dtype=float)
    log_w = k * math.log(mu) - mu - gammaln(k + 1.0) - power * np.log(k + shift)
    return math.fsum(np.exp(log_w))


def _scaled_barnes_ones_twos(mu: float, r: int) -> float:
    """exp(-mu) * F_{r+1,r+1}([1,...,1], [2,...,2]; mu)."""
    return _poisson_inverse_power(mu, 1.0, r + 1.0)


def _extrapolate(checkpoints, sums, exponent, ncols):
    J = np.asarray(checkpoints[-ncols:], dtype=float)
    S = np.asarray(sums[-ncols:], dtype=float)
    scale = J[0]
    cols = [np.ones_like(J)] + [(J / scale) ** (-exponent - m) for m in range(ncols - 1)]
    return float(np.linalg.solve(np.column_stack(cols), S)[0])


def _power_tail_sum(term_fn, tail_exponent: float, control: SeriesControl, first_block: int = 64, start: int = 0):
    """Sum t_0 + t_1 + ... where the tail behaves like j**-(tail_exponent+1).

    ``term_fn(j0, j1)`` returns the terms for j0 <= j < j1; summation begins
    at ``start``.  Partial sums at geometrically spaced J are extrapolated in the model
    S_J = S + sum_m b_m J**-(tail_exponent + m).  Returns the sum and the
    sum of absolute values of the terms used, for conditioning checks.
    """
    first = max(first_block, 2 * start)
    terms = np.asarray(term_fn(start, first), dtype=float)
    checkpoints, sums = [first], [math.fsum(terms)]
    estimates = []
    while True:
        total = sums[-1]
        abs_total = math.fsum(np.abs(terms))
        # the neglected tail is about J * t_J / q, not t_J
        remainder = checkpoints[-1] * max(abs(terms[-1]), abs(terms[-2])) / tail_exponent
        if control.small(remainder, total):
            result = total
            break
        if len(checkpoints) >= 4:
            ncols = min(len(checkpoints), 7)
            estimates.append(_extrapolate(checkpoints, sums, tail_exponent, ncols))
            if len(estimates) >= 2 and abs(estimates[-1] - estimates[-2]) <= (
                control.rel_tol * abs(estimates[-1]) + control.abs_tol
            ):
                result = estimates[-1]
                break
        j0, j1 = checkpoints[-1], 2 * checkpoints[-1]
        if j1 > control.max_terms:
            raise SeriesTruncationError(
                f"power-law series did not settle within {control.max_terms} terms",
                partial_sum=estimates[-1] if estimates else total,
                last_term=float(terms[-1]),
                terms=j0,
            )
        terms = np.concatenate([terms, np.asarray(term_fn(j0, j1), dtype=float)])
        checkpoints.append(j1)
        sums.append(math.fsum(terms))
    return result, abs_total


def _check_condition(abs_total, result, control):
    if result == 0.0 or abs_total / abs(result) > control.max_condition:
        raise SeriesTruncationError(
            "series lost too much precision to cancellation between terms",
            partial_sum=result,
        )


def ep_raw_moment(lam: float, beta: float, r: int, control: SeriesControl = DEFAULT_CONTROL) -> float:
    """E(Y**r) for Y ~ EP(lam, beta) through the Barnes function."""
    GepParams(lam, beta)
    if int(r) != r or r < 1:
        raise DomainError("r must be a positive integer")
    r = int(r)
    log_scale = math.lgamma(r + 1) + math.log(lam) - r * math.log(beta)
    if lam < 50.0:
        args = HypergeomArgs((1.0,) * (r + 1), (2.0,) * (r + 1), lam)
        return math.exp(log_scale) * barnes_F(args, control) / math.expm1(lam)
    # exp(lam) / expm1(lam) * [exp(-lam) F]; the plain series would overflow
    return math.exp(log_scale) * _scaled_barnes_ones_twos(lam, r) / -math.expm1(-lam)


# above this condition number the alternating head of a series is redone in extended precision
_REFINE_CONDITION = 1e3


def _alternating_head_mp(power: float, h_mp, m: int):
    """sum_{j<m} c_j h(j) in extended precision, c_j the coefficients of (1 - z)**power.

    For j <= power the coefficients alternate in sign and grow like 2**power,
    so in double precision the head loses about log10(2**power) digits.
    Working precision is raised until the cancellation is covered.
    """
    dps = 30
    while True:
        with mpmath.workdps(dps):
            total, abs_total = mpmath.mpf(0), mpmath.mpf(0)
            for j in range(m):
                t = (-1) ** j * mpmath.binomial(mpmath.mpf(power), j) * h_mp(j)
                total += t
                abs_total += abs(t)
            digits_lost = float(mpmath.log10(abs_total / abs(total))) if total != 0 else dps
            if digits_lost + 20 <= dps:
                return +total
        dps = int(digits_lost) + 30


def _binomial_weighted_sum(power: float, h, h_mp, tail_exponent: float, control: SeriesControl) -> float:
    """sum_j c_j h(j) with c_j the coefficients of (1 - z)**power.

    Finite for integer power >= 0; otherwise the tail is summed with
    :func:`_power_tail_sum`.  Past j = power the coefficients keep one sign,
    so all cancellation sits in the head, which is refined with ``h_mp`` when
    double precision is not enough.
    """

    def terms(j0, j1):
        c = binomial_series_coefficients(power, j1)[j0:]
        return c * np.array([h(j) if c[j - j0] != 0.0 else 0.0 for j in range(j0, j1)])

    if _is_integer(power) and power >= 0:
        t = terms(0, int(round(power)) + 1)
        total = math.fsum(t)
        if total != 0.0 and math.fsum(np.abs(t)) / abs(total) <= _REFINE_CONDITION:
            return total
        return float(_alternating_head_mp(power, h_mp, int(round(power)) + 1))

    total, abs_total = _power_tail_sum(terms, tail_exponent, control)
    if total != 0.0 and abs_total / abs(total) <= _REFINE_CONDITION:
        return total
    m = max(1, math.floor(power) + 1)

    # the first tail terms can cancel the head too, so the extended-precision
    # block grows until the double-precision remainder is negligible
    while True:
        tail, _ = _power_tail_sum(terms, tail_exponent, control, start=m)
        with mpmath.workdps(30):
            result = _alternating_head_mp(power, h_mp, m) + tail
        if result != 0 and abs(tail) <= 1e-4 * abs(result):
            return float(result)
        if 2 * m > control.max_terms:
            raise SeriesTruncationError(
                "alternating series could not be resolved in extended precision",
                partial_sum=float(result),
                terms=m,
            )
        m *= 2


@functools.lru_cache(maxsize=4096)
def _gep_moment_core(lam: float, alpha: float, r: int, control: SeriesControl) -> float:
    """sum_j alpha * c_j * exp(-lam(j+1)) F_{r+1,r+1}(lam(j+1)), c_j from (1-z)**(alpha-1)."""

    def h(j):
        return alpha * _scaled_barnes_ones_twos(lam * (j + 1.0), r)

    def h_mp(j):
        mu = mpmath.mpf(lam) * (j + 1)
        return alpha * mpmath.exp(-mu) * mpmath.hyper([1] * (r + 1), [2] * (r + 1), mu)

    return _binomial_weighted_sum(alpha - 1.0, h, h_mp, alpha + r, control)


def gep_raw_moment(params: GepParams, r: int, control: SeriesControl = DEFAULT_CONTROL) -> float:
    """E(X**r) for X ~ GEP as a mixture of EP moments over the binomial expansion."""
    if int(r) != r or r < 1:
        raise DomainError("r must be a positive integer")
    r = int(r)
    lam, beta, alpha = params.as_tuple()
    if alpha == 1.0:
        return ep_raw_moment(lam, beta, r, control)
    scale = math.exp(math.lgamma(r + 1) + math.log(lam) - r * math.log(beta) - alpha * math.log(-math.expm1(-lam)))
    return scale * _gep_moment_core(lam, alpha, r, control)


# the mixture's terms shrink geometrically with ratio exp(-lam(1 - e^{-beta x})), which tends
# to 1 as x -> 0, so it gets a budget far beyond the default term limit
MIXTURE_MAX_TERMS = 50_000_000


def _ep_mixture_scalar(params: GepParams, x: float, control: SeriesControl) -> float:
    lam, beta, alpha = params.as_tuple()
    if x == 0.0:
        # every f_EP is finite at 0 but the mixture converges to the boundary value of f
        return gep_pdf(params, 0.0)
    log_norm = math.lgamma(alpha + 1.0) - alpha * math.log(-math.expm1(-lam)) - math.lgamma(alpha)

    def weight(j, coef):
        # (-1)^j Gamma(alpha+1) {1 - e^{-mu}} / (Gamma(alpha-j) (j+1)!) / (1 - e^{-lam})^alpha
        return math.exp(log_norm) * coef / (j + 1) * -np.expm1(-lam * (j + 1))

    if _is_integer(alpha):
        n = int(round(alpha))
        parts = [
            weight(j, expansion_coefficient(alpha, j)) * gep_pdf(GepParams(lam * (j + 1), beta, 1.0), x)
            for j in range(n)
        ]
        return math.fsum(parts)

    s = -math.expm1(-beta * x)
    one_minus_q = -math.expm1(-lam * s)
    log_ep_common = math.log(beta) - beta * x
    budget = max(control.max_terms, MIXTURE_MAX_TERMS)
    tail_tol = min(control.rel_tol, 1e-16)
    sums, j0, chunk, coef0 = [], 0, 1024, 1.0
    while j0 < budget:
        j = np.arange(j0, j0 + chunk, dtype=float)
        ratios = np.concatenate([[1.0], (j[:-1] - (alpha - 1.0)) / (j[:-1] + 1.0)])
        coef = coef0 * np.cumprod(ratios)
        mu = lam * (j + 1.0)
        # f_EP(x; mu, beta) = mu beta e^{-beta x - mu s} / (1 - e^{-mu})
        f_ep = mu * np.exp(log_ep_common - mu * s) / -np.expm1(-mu)
        terms = weight(j, coef) * f_ep
        sums.append(float(np.sum(terms)))
        total = math.fsum(sums)
        last = j0 + chunk - 1
        # past j = alpha the term ratio is at most q, so the tail is below |t| q / (1 - q);
        # as an oracle the sum is carried to machine precision whatever rel_tol asks
        if last >= alpha and abs(terms[-1]) / one_minus_q <= tail_tol * abs(total) + control.abs_tol:
            return total
        coef0 = coef[-1] * (last - (alpha - 1.0)) / (last + 1.0)
        j0 += chunk
        chunk = min(2 * chunk, 1 << 20)
    raise SeriesTruncationError(
        f"EP-mixture series did not converge at x={x}", partial_sum=math.fsum(sums), last_term=float(terms[-1]), terms=j0
    )


def pdf_as_ep_mixture(params: GepParams, x, control: SeriesControl = DEFAULT_CONTROL):
    """GEP density written as a signed linear combination of EP densities.

    Exists as an independent cross-check of :func:`gepdist.core.pdf`.
    Convergence is geometric with ratio exp(-lam*(1-exp(-beta*x))), so very
    small x needs many terms.
    """
    xa = _as_x(x)
    vals = np.array([_ep_mixture_scalar(params, float(v), control) for v in np.atleast_1d(xa)])
    return _out(vals.reshape(np.shape(xa)), x)


def _order_stat_weights(i: int, n: int):
    """(k, shape multiplier i+k, signed weight) for the rank-mixture representation."""
    if int(i) != i or int(n) != n or not (1 <= i <= n):
        raise DomainError(f"need 1 <= i <= n, got i={i}, n={n}")
    i, n = int(i), int(n)
    log_lead = math.lgamma(n + 1) - math.lgamma(i) - math.lgamma(n - i + 1)
    out = []
    for k in range(n - i + 1):
        log_binom = math.lgamma(n - i + 1) - math.lgamma(k + 1) - math.lgamma(n - i - k + 1)
        w = (-1.0) ** k * math.exp(log_lead + log_binom - math.log(i + k))
        out.append((k, i + k, w))
    return out


def order_stat_pdf(params: GepParams, i: int, n: int, x):
    """Density of the i-th smallest of n i.i.d. GEP draws.

    Written as a finite signed sum of GEP densities with shapes alpha*(i+k).
    """
    xa = _as_x(x)
    parts = [w * np.asarray(gep_pdf(params.with_alpha(params.alpha * m), xa)) for _, m, w in _order_stat_weights(i, n)]
    return _out(np.sum(parts, axis=0), x)


def order_stat_raw_moment(
    params: GepParams, i: int, n: int, r: int, control: SeriesControl = DEFAULT_CONTROL
) -> float:
    """E(X_{i:n}**r): the rank-mixture of GEP raw moments with shapes alpha*(i+k)."""
    weights = _order_stat_weights(i, n)
    parts = [w * gep_raw_moment(params.with_alpha(params.alpha * m), r, control) for _, m, w in weights]
    total = math.fsum(parts)
    _check_condition(math.fsum(abs(p) for p in parts), total, control)
    return total
