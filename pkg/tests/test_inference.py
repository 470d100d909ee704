"""Likelihood, score, information and fitting checks."""

import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gepdist import core
from gepdist.core import GepParams
from gepdist.data import builtin_dataset
from gepdist.errors import DomainError
from gepdist.inference import (
    FitConfig,
    chi2_sf,
    confidence_interval,
    fisher_info,
    fit_ep,
    fit_gep,
    lr_test,
    normal_quantile,
    score,
    score_terms,
    total_loglik,
)
from gepdist.quadrature import gep_expectation

PRECIP = builtin_dataset("precipitation")
TOYS = builtin_dataset("toys")
PUBLISHED_GEP = GepParams(0.8003, 0.7336, 2.7329)
PUBLISHED_EP = GepParams(31.9785, 0.0186, 1.0)
IDENTITY_POINTS = [
    GepParams(1, 1, 2),
    GepParams(0.5, 2, 0.7),
    GepParams(2, 0.5, 3),
    GepParams(5, 1, 1),
    GepParams(1.3, 3, 7),
]


def fd_gradient(params, x, rel=1e-5):
    theta = np.array(params.as_tuple())
    g = np.empty(3)
    for i in range(3):
        h = rel * theta[i]
        up, down = theta.copy(), theta.copy()
        up[i] += h
        down[i] -= h
        g[i] = (total_loglik(GepParams(*up), x) - total_loglik(GepParams(*down), x)) / (2 * h)
    return g


def fit_se(fit):
    return np.sqrt(np.diag(fit.covariance))


class TestLoglik:
    def test_published_gep_point(self):
        assert abs(total_loglik(PUBLISHED_GEP, PRECIP) - (-39.7229)) < 0.005

    def test_published_ep_point(self):
        assert abs(total_loglik(PUBLISHED_EP, PRECIP) - (-45.7935)) < 0.005

    @pytest.mark.parametrize("p", IDENTITY_POINTS, ids=str)
    def test_single_point_is_logpdf(self, p):
        assert total_loglik(p, [1.7]) == pytest.approx(math.log(core.pdf(p, 1.7)), abs=1e-12)

    def test_sum_of_terms(self):
        p = GepParams(1, 1, 2)
        x = core.sample(p, 40, seed=3)
        assert total_loglik(p, x) == pytest.approx(sum(core.logpdf(p, v) for v in x.values), abs=1e-11)


class TestScore:
    def test_matches_finite_differences(self):
        p = GepParams(1, 1, 2)
        x = core.sample(p, 50, seed=11)
        np.testing.assert_allclose(score(p, x), fd_gradient(p, x), rtol=1e-6)

    @settings(max_examples=20, deadline=None)
    @given(
        lam=st.floats(0.1, 10),
        beta=st.floats(0.2, 5),
        alpha=st.floats(0.3, 8),
        seed=st.integers(0, 2**31),
    )
    def test_random_pairs(self, lam, beta, alpha, seed):
        p = GepParams(lam, beta, alpha)
        x = core.sample(p, 30, seed=seed)
        s, fd = score(p, x), fd_gradient(p, x)
        # components that nearly cancel get an absolute floor scaled by the per-term size
        scale = np.abs(score_terms(p, x.values)).sum(axis=0)
        assert np.all(np.abs(s - fd) <= 1e-6 * np.maximum(np.abs(fd), 1e-3 * scale))

    @pytest.mark.xfail(
        strict=True,
        reason="the published estimates are not a stationary point; max-norm of the score there is about 10.9",
    )
    def test_published_mle_is_nearly_stationary(self):
        assert np.max(np.abs(score(PUBLISHED_GEP, PRECIP))) < 0.05

    @pytest.mark.parametrize("p", [GepParams(1, 1, 2), GepParams(3, 0.5, 0.8)], ids=str)
    def test_monte_carlo_mean_is_zero(self, p):
        x = core.sample(p, 100_000, seed=5).values
        t = score_terms(p, x)
        mean = t.mean(axis=0)
        se = t.std(axis=0, ddof=1) / math.sqrt(len(x))
        assert np.all(np.abs(mean) < 3 * se)


class TestScoreIdentities:
    """Expectations implied by a zero-mean score, computed by quadrature."""

    @staticmethod
    def parts(p, x):
        z = math.exp(-p.beta * x)
        d = math.expm1(p.lam * -math.expm1(-p.beta * x))
        return z, d

    @pytest.mark.parametrize("p", IDENTITY_POINTS, ids=str)
    def test_alpha_identity(self, p):
        lhs = gep_expectation(p, lambda x: math.log(-math.expm1(-p.lam * -math.expm1(-p.beta * x)))).value
        rhs = math.log(-math.expm1(-p.lam)) - 1 / p.alpha
        assert abs(lhs - rhs) < 1e-6

    @pytest.mark.parametrize("p", IDENTITY_POINTS, ids=str)
    def test_lambda_identity(self, p):
        def g(x):
            z, d = self.parts(p, x)
            return (z - 1) * (1 - (p.alpha - 1) / d)

        lhs = gep_expectation(p, g).value
        corrected = p.alpha / math.expm1(p.lam) - 1 / p.lam
        assert abs(lhs - corrected) < 1e-6
        # the printed right side carries an extra +1
        assert abs(lhs - (corrected + 1)) > 0.5

    @pytest.mark.parametrize("p", IDENTITY_POINTS, ids=str)
    def test_beta_identity(self, p):
        def g(x):
            z, d = self.parts(p, x)
            return z * x * ((p.alpha - 1) / d - 1)

        lhs = gep_expectation(p, g).value
        mean = gep_expectation(p, lambda x: x).value
        assert abs(lhs - (mean - 1 / p.beta) / p.lam) < 1e-6
        printed = (mean - p.beta) / p.lam
        if p.beta != 1:
            # the printed (E X - beta) form only coincides when beta = 1
            assert abs(lhs - printed) > 1e-3


class TestFisher:
    def test_alpha_alpha_entry(self):
        assert fisher_info(GepParams(1, 1, 2))[2, 2] == 0.25
        assert fisher_info(GepParams(2, 0.5, 4), n=10)[2, 2] == pytest.approx(10 / 16, rel=1e-15)

    def test_symmetric_positive_definite(self):
        K = fisher_info(GepParams(1, 1, 2))
        np.testing.assert_array_equal(K, K.T)
        assert np.all(np.linalg.eigvalsh(K) > 0)

    def test_scales_with_n(self):
        p = GepParams(1, 1, 2)
        np.testing.assert_allclose(fisher_info(p, n=7), 7 * fisher_info(p), rtol=1e-14)

    @pytest.mark.slow
    @pytest.mark.parametrize("p", [GepParams(1, 1, 2), GepParams(2, 0.5, 0.6)], ids=str)
    def test_information_identity(self, p):
        x = core.sample(p, 1_000_000, seed=2024).values
        t = score_terms(p, x)
        prods = t[:, :, None] * t[:, None, :]
        cov = prods.mean(axis=0)
        se = prods.std(axis=0, ddof=1) / math.sqrt(len(x))
        K = fisher_info(p)
        assert np.all(np.abs(K - cov) < 3 * se)

    @pytest.mark.parametrize("p", [GepParams(1, 1, 2), GepParams(3, 2, 0.5)], ids=str)
    def test_matches_differenced_hessian(self, p):
        closed = fisher_info(p, method="closed")
        numeric = fisher_info(p, method="numeric")
        assert np.max(np.abs(closed - numeric)) < 1e-4

    def test_switches_near_alpha_one(self):
        near = GepParams(1, 1, 1 + 5e-4)
        np.testing.assert_array_equal(fisher_info(near), fisher_info(near, method="numeric"))
        # the information is continuous through alpha = 1
        away = fisher_info(GepParams(1, 1, 1.01), method="closed")
        assert np.max(np.abs(fisher_info(GepParams(1, 1, 1)) - away)) < 0.02

    def test_rejects_bad_n(self):
        with pytest.raises(DomainError):
            fisher_info(GepParams(1, 1, 2), n=0)


class TestIntervals:
    def test_z_value(self):
        assert abs(normal_quantile(0.975) - 1.959964) < 1e-6

    @pytest.fixture(scope="class")
    @staticmethod
    def fit():
        return fit_gep(core.sample(GepParams(1, 1, 2), 400, seed=8))

    def test_width_scales_with_root_n(self, fit):
        from dataclasses import replace

        cov2 = np.linalg.inv(fisher_info(fit.params, n=2 * fit.n))
        doubled = replace(fit, covariance=cov2)
        cov1 = np.linalg.inv(fisher_info(fit.params, n=fit.n))
        single = replace(fit, covariance=cov1)
        for name in ("lam", "beta", "alpha"):
            lo1, hi1 = confidence_interval(single, name)
            lo2, hi2 = confidence_interval(doubled, name)
            assert (hi1 - lo1) / (hi2 - lo2) == pytest.approx(math.sqrt(2), abs=1e-10)

    def test_zero_variance_collapses(self, fit):
        from dataclasses import replace

        degenerate = replace(fit, covariance=np.zeros((3, 3)))
        lo, hi = confidence_interval(degenerate, "beta")
        assert lo == hi == fit.params.beta

    def test_level_validation(self, fit):
        with pytest.raises(DomainError):
            confidence_interval(fit, "lam", 0.4)

    def test_interval_contains_estimate(self, fit):
        for name, (lo, hi) in fit.intervals.items():
            assert lo < fit.estimates[name] < hi


class TestChi2:
    def test_zero(self):
        assert chi2_sf(0.0, 1) == 1.0

    def test_five_percent_point(self):
        assert abs(chi2_sf(3.8415, 1) - 0.05) < 1e-4

    def test_published_statistic(self):
        assert chi2_sf(12.1412, 1) == pytest.approx(4.9e-4, rel=0.05)

    def test_two_df_closed_form(self):
        assert chi2_sf(3.0, 2) == pytest.approx(math.exp(-1.5), rel=1e-14)

    def test_negative_rejected(self):
        with pytest.raises(DomainError):
            chi2_sf(-1.0, 1)


class TestFitting:
    @pytest.fixture(scope="class")
    @staticmethod
    def sim_fit():
        truth = GepParams(1, 1, 2)
        return truth, fit_gep(core.sample(truth, 5000, seed=1), FitConfig(seed=7))

    def test_simulated_gep_recovery(self, sim_fit):
        truth, fit = sim_fit
        assert fit.converged
        est, se = np.array(fit.params.as_tuple()), fit_se(fit)
        assert np.all(np.abs(est - np.array(truth.as_tuple())) < 3 * se)

    def test_converged_fit_is_stationary(self, sim_fit):
        _, fit = sim_fit
        transformed = score(fit.params, core.sample(GepParams(1, 1, 2), 5000, seed=1)) * np.array(
            fit.params.as_tuple()
        )
        assert np.max(np.abs(transformed)) <= 10 * FitConfig().gradient_tolerance

    def test_covariance_psd(self, sim_fit):
        _, fit = sim_fit
        np.testing.assert_allclose(fit.covariance, fit.covariance.T)
        assert np.all(np.linalg.eigvalsh(fit.covariance) >= 0)

    def test_simulated_ep_recovery(self):
        truth = GepParams(2, 1, 1)
        fit = fit_ep(core.sample(truth, 5000, seed=99))
        assert fit.params.alpha == 1.0
        se = fit_se(fit)
        assert abs(fit.params.lam - 2) < 3 * se[0]
        assert abs(fit.params.beta - 1) < 3 * se[1]
        assert np.all(fit.covariance[2] == 0) and np.all(fit.covariance[:, 2] == 0)

    def test_deterministic(self):
        x = core.sample(GepParams(1, 1, 2), 200, seed=4)
        a, b = fit_gep(x, FitConfig(seed=3)), fit_gep(x, FitConfig(seed=3))
        assert a.params == b.params and a.loglik == b.loglik

    def test_refit_is_idempotent(self):
        x = core.sample(GepParams(1.5, 0.8, 3), 300, seed=21)
        first = fit_gep(x)
        theta = np.log(first.params.as_tuple())
        second = fit_gep(x, starts=[theta])
        assert abs(second.loglik - first.loglik) < 1e-6

    @pytest.mark.parametrize("data", [PRECIP, TOYS], ids=["precipitation", "toys"])
    def test_nesting(self, data):
        assert fit_gep(data).loglik >= fit_ep(data).loglik - 1e-9

    def test_insufficient_data(self):
        with pytest.raises(DomainError):
            fit_ep([1.0])
        with pytest.raises(DomainError):
            fit_gep([1.0, 2.0])

    def test_few_points_warn(self):
        with pytest.warns(UserWarning):
            fit_gep([0.5, 1.0, 2.0])

    def test_optimum_beats_published_points(self):
        # our maximizer finds strictly higher likelihood than the published estimates
        assert fit_gep(PRECIP).loglik > total_loglik(PUBLISHED_GEP, PRECIP) + 1.0
        assert fit_ep(PRECIP).loglik > total_loglik(PUBLISHED_EP, PRECIP) + 0.3

    @pytest.mark.xfail(strict=True, reason="higher-likelihood optimum lies elsewhere; see the acceptance suite")
    def test_published_precipitation_estimates(self):
        fit = fit_gep(PRECIP)
        np.testing.assert_allclose(fit.params.as_tuple(), PUBLISHED_GEP.as_tuple(), rtol=0.02)


class TestLrTest:
    def test_ep_data(self):
        x = core.sample(GepParams(2, 1, 1), 200, seed=31)
        res = lr_test(x)
        assert res.statistic >= 0 and 0 <= res.p_value <= 1
        assert res.df == 1
        assert res.p_value == chi2_sf(res.statistic, 1)

    def test_statistic_matches_fits(self):
        res = lr_test(PRECIP)
        assert res.statistic == pytest.approx(2 * (res.gep.loglik - res.ep.loglik), abs=1e-12)
        assert res.p_value < 1e-3

    @pytest.mark.xfail(strict=True, reason="our fits give w = 14.7702 on the precipitation data")
    def test_published_statistic(self):
        assert abs(lr_test(PRECIP).statistic - 12.1412) < 0.05

    def test_no_warnings_on_clean_fit(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            fit_gep(core.sample(GepParams(1, 1, 2), 500, seed=2))
