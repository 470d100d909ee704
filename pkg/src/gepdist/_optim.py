"""Multistart quasi-Newton maximization in log-parameter space."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .errors import GepError, OptimizationError


@dataclass(frozen=True)
class FitConfig:
    max_iterations: int = 500
    gradient_tolerance: float = 1e-8
    multistart_points: int = 8
    seed: int = 0

    def __post_init__(self):
        if self.max_iterations < 1 or self.gradient_tolerance <= 0 or self.multistart_points < 0:
            raise ValueError(f"invalid FitConfig {self!r}")


@dataclass
class StartOutcome:
    start: np.ndarray
    theta: np.ndarray
    value: float
    grad_norm: float
    iterations: int
    converged: bool
    message: str = ""
    extra: dict = field(default_factory=dict)


def _newton_polish(fun, theta, tol, max_steps=25):
    """Newton steps on the negative log-likelihood using a differenced Hessian."""
    value, grad = fun(theta)
    steps = 0
    for steps in range(1, max_steps + 1):
        if np.max(np.abs(grad)) < 0.1 * tol:
            break
        h = 1e-5 * np.maximum(1.0, np.abs(theta))
        H = np.empty((theta.size, theta.size))
        for i in range(theta.size):
            e = np.zeros_like(theta)
            e[i] = h[i]
            H[:, i] = (fun(theta + e)[1] - fun(theta - e)[1]) / (2 * h[i])
        H = 0.5 * (H + H.T)
        try:
            if np.min(np.linalg.eigvalsh(H)) <= 0:
                break
            step = -np.linalg.solve(H, grad)
        except np.linalg.LinAlgError:
            break
        trial = theta + step
        t_value, t_grad = fun(trial)
        if not math.isfinite(t_value) or t_value > value + 1e-12 * (1 + abs(value)):
            break
        theta, value, grad = trial, t_value, t_grad
    return theta, value, grad, steps


def _safe(fun):
    def wrapped(theta):
        try:
            value, grad = fun(theta)
        except (GepError, FloatingPointError, ValueError, OverflowError):
            return math.inf, np.zeros_like(theta)
        if not math.isfinite(value) or not np.all(np.isfinite(grad)):
            return math.inf, np.zeros_like(theta)
        return value, grad

    return wrapped


def run_start(fun, start, config: FitConfig) -> StartOutcome:
    """Minimize ``fun`` (value, gradient) from one start, then polish with Newton steps."""
    fun = _safe(fun)
    with np.errstate(all="ignore"):
        res = minimize(
            fun,
            np.asarray(start, dtype=float),
            jac=True,
            method="BFGS",
            options={"gtol": config.gradient_tolerance, "maxiter": config.max_iterations},
        )
        theta, value, grad, polish_steps = _newton_polish(fun, res.x, config.gradient_tolerance)
    grad_norm = float(np.max(np.abs(grad))) if math.isfinite(value) else math.inf
    converged = math.isfinite(value) and grad_norm < config.gradient_tolerance
    if not converged and math.isfinite(value) and res.status == 2:
        # precision loss: BFGS could not make progress, so the objective has stalled
        prev = float(res.fun)
        converged = abs(prev - value) <= 1e-12 * max(1.0, abs(value)) and grad_norm < math.sqrt(config.gradient_tolerance)
    return StartOutcome(
        start=np.asarray(start, dtype=float),
        theta=theta,
        value=value,
        grad_norm=grad_norm,
        iterations=int(res.nit) + polish_steps,
        converged=bool(converged),
        message=str(res.message),
    )


def multistart(fun, starts, config: FitConfig, label: str) -> tuple[StartOutcome, list[StartOutcome]]:
    outcomes = [run_start(fun, s, config) for s in starts]
    good = [o for o in outcomes if o.converged]
    if not good:
        finite = [o for o in outcomes if math.isfinite(o.value)]
        best = min(finite, key=lambda o: o.value) if finite else None
        raise OptimizationError(
            f"{label}: none of {len(outcomes)} starts converged",
            best=best,
            diagnostics={"outcomes": outcomes},
        )
    # lowest objective wins; ties (to 1e-9) go to the lexicographically smallest parameters
    best = min(good, key=lambda o: (round(o.value, 9), tuple(np.round(o.theta, 8))))
    return best, outcomes
