"""Entropy series checked against quadrature and analytic limits."""

import math

import numpy as np
import pytest
from scipy import integrate

from gepdist import core
from gepdist.core import GepParams
from gepdist.entropy import (
    a_j_series,
    mean_exp_neg_beta_x,
    renyi_entropy,
    renyi_entropy_quadrature,
    renyi_entropy_series,
    shannon_entropy,
    shannon_entropy_series,
    shannon_from_renyi_limit,
)
from gepdist.errors import DomainError, ValidationError
from gepdist.quadrature import gep_expectation

LAMBDAS = (0.5, 1.0, 2.0, 5.0)
BETAS = (0.5, 1.0, 3.0)
ALPHAS = (0.5, 1.0, 2.5, 7.0)
GRID = [GepParams(l, b, a) for l in LAMBDAS for b in BETAS for a in ALPHAS]
GAMMAS = (0.5, 2.0, 3.0)


def defined(p, gamma):
    return (p.alpha - 1) * gamma + 1 > 0


def a_j_by_quadrature(lam, gamma, j):
    # A_j = integral_0^inf gamma e^{-gamma x + lam (gamma+j) e^{-x}} dx scaled; here via t = e^{-x}
    c = lam * (gamma + j)
    val, _ = integrate.quad(lambda t: t ** (gamma - 1) * math.exp(c * t), 0, 1, epsabs=0, epsrel=1e-13, limit=200)
    return val


class TestAjSeries:
    def test_tiny_lambda(self):
        assert a_j_series(1e-15, 2.5, 3) == pytest.approx(1 / 2.5, rel=1e-12)

    def test_term_sum(self):
        ref = math.fsum(2**k / (math.factorial(k) * (k + 2)) for k in range(50))
        assert a_j_series(1, 2, 0) == pytest.approx(ref, rel=1e-14)

    @pytest.mark.parametrize("lam,gamma,j", [(1, 2, 0), (2, 0.5, 3), (0.3, 3, 10)])
    def test_defining_integral(self, lam, gamma, j):
        assert a_j_series(lam, gamma, j) == pytest.approx(a_j_by_quadrature(lam, gamma, j), rel=1e-8)

    def test_rejects_bad_input(self):
        with pytest.raises(DomainError):
            a_j_series(0, 1, 0)


class TestRenyi:
    def test_exponential_limit(self):
        assert renyi_entropy(GepParams(1e-8, 1, 1), 2) == pytest.approx(math.log(2), abs=1e-7)

    def test_ep_example(self):
        p = GepParams(1, 2, 1)
        assert renyi_entropy_series(p, 2) == pytest.approx(renyi_entropy_quadrature(p, 2), abs=1e-6)
        assert renyi_entropy(p, 2) == pytest.approx(-0.35113112, abs=1e-8)

    def test_fractional_order(self):
        p = GepParams(1, 1, 2.5)
        assert renyi_entropy_series(p, 0.5) == pytest.approx(renyi_entropy_quadrature(p, 0.5), abs=1e-6)

    @pytest.mark.parametrize("p", GRID, ids=str)
    @pytest.mark.parametrize("gamma", GAMMAS)
    def test_series_matches_quadrature(self, p, gamma):
        if not defined(p, gamma):
            with pytest.raises(DomainError):
                renyi_entropy(p, gamma)
            return
        assert abs(renyi_entropy_series(p, gamma) - renyi_entropy_quadrature(p, gamma)) < 1e-6

    def test_independent_integral(self):
        # log of the integral of f**gamma done directly on the half-line
        p, gamma = GepParams(2, 0.5, 3), 2.0
        cuts = [0, 1, 3, 8, 20, np.inf]
        val = sum(
            integrate.quad(lambda x: core.pdf(p, x) ** gamma, a, b, epsabs=1e-14, epsrel=1e-13)[0]
            for a, b in zip(cuts[:-1], cuts[1:])
        )
        assert renyi_entropy(p, gamma) == pytest.approx(math.log(val) / (1 - gamma), abs=1e-9)

    @pytest.mark.parametrize("p", GRID[::2], ids=str)
    def test_nonincreasing_in_order(self, p):
        vals = [renyi_entropy(p, g) for g in GAMMAS if defined(p, g)]
        assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))

    @pytest.mark.parametrize("p", [GepParams(1, 1, 2.5), GepParams(3, 0.7, 0.8)], ids=str)
    def test_scale_law(self, p):
        c = 3.7
        scaled = GepParams(p.lam, p.beta * c, p.alpha)
        assert renyi_entropy(scaled, 2) == pytest.approx(renyi_entropy(p, 2) - math.log(c), abs=1e-6)

    @pytest.mark.parametrize("gamma", [1.0, 0.0, -1.0, math.nan])
    def test_order_validation(self, gamma):
        with pytest.raises(DomainError):
            renyi_entropy(GepParams(1, 1, 1), gamma)

    def test_divergent_integral(self):
        # f ~ x**(alpha-1) at 0, so f**3 is not integrable for alpha = 0.5
        with pytest.raises(DomainError):
            renyi_entropy_quadrature(GepParams(1, 1, 0.5), 3)

    def test_disagreement_raises(self, monkeypatch):
        import gepdist.entropy as ent

        monkeypatch.setattr(ent, "renyi_entropy_series", lambda p, g, c=None: 10.0)
        with pytest.raises(ValidationError) as info:
            ent.renyi_entropy(GepParams(1, 1, 2), 2)
        assert info.value.series_value == 10.0


class TestMeanExpNegBetaX:
    def test_unit_point_closed_form(self):
        v = mean_exp_neg_beta_x(GepParams(1, 1, 1))
        assert abs(v - math.exp(-1) / (1 - math.exp(-1))) < 1e-8

    def test_printed_form_is_refuted(self):
        # without the leading "1 -" the series lands near 0.418, far from the oracle
        p = GepParams(1, 1, 1)
        oracle = gep_expectation(p, lambda x: math.exp(-x)).value
        z = 1 - math.exp(-1)
        printed = math.fsum(z**k / (k * (k + 1)) for k in range(1, 400))
        assert printed == pytest.approx(0.4180, abs=1e-3)
        assert abs(printed - oracle) > 0.1

    def test_exponential_limit(self):
        assert mean_exp_neg_beta_x(GepParams(1e-6, 2, 1)) == pytest.approx(0.5, abs=1e-6)

    def test_example_point(self):
        p = GepParams(2, 3, 2)
        oracle = gep_expectation(p, lambda x: math.exp(-3 * x)).value
        assert mean_exp_neg_beta_x(p) == pytest.approx(oracle, abs=1e-8)

    @pytest.mark.parametrize("p", GRID, ids=str)
    def test_grid(self, p):
        v = mean_exp_neg_beta_x(p)
        assert 0 < v < 1
        oracle = gep_expectation(p, lambda x: math.exp(-p.beta * x)).value
        assert abs(v - oracle) < 1e-8


class TestShannon:
    def test_exponential_limit(self):
        assert shannon_entropy(GepParams(1e-8, 2, 1)).value == pytest.approx(1 - math.log(2), abs=1e-7)

    def test_renyi_limit(self):
        p = GepParams(1, 1, 1)
        h = shannon_entropy(p).value
        assert abs(h - shannon_from_renyi_limit(p)) < 1e-4

    def test_corrected_series_confirmed(self):
        res = shannon_entropy(GepParams(2, 0.5, 3))
        assert res.series_value is not None
        assert abs(res.discrepancy) < 1e-6

    @pytest.mark.parametrize("p", GRID[::3], ids=str)
    def test_series_across_grid(self, p):
        assert shannon_entropy_series(p) == pytest.approx(shannon_entropy(p).value, abs=1e-6)

    @pytest.mark.parametrize("p", [GepParams(1, 1, 2.5), GepParams(0.5, 3, 7)], ids=str)
    def test_scale_law(self, p):
        c = 0.4
        scaled = GepParams(p.lam, p.beta * c, p.alpha)
        assert shannon_entropy(scaled).value == pytest.approx(shannon_entropy(p).value - math.log(c), abs=1e-8)

    @pytest.mark.parametrize("p", [GepParams(0.8, 1.3, 2.2), GepParams(3, 0.5, 1.5)], ids=str)
    def test_renyi_limit_elsewhere(self, p):
        assert abs(shannon_entropy(p).value - shannon_from_renyi_limit(p)) < 1e-4
