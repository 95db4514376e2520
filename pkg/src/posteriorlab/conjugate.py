"""Closed-form conjugate updating, prior construction helpers, and beta-prior
elicitation from two quantiles."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import optimize
from scipy import special as sc

from .distributions import Beta, Gamma, Normal, quantile
from .exceptions import DecompositionUndefinedError, InfeasibleAssessmentError

__all__ = [
    "ConjugatePosterior", "QuantileAssessment", "gamma_poisson_update",
    "posterior_mean_decomposition", "prior_from_mean_and_size",
    "beta_binomial_update", "normal_normal_update", "conjugate_predictive_pmf",
    "beta_from_quantiles",
]


@dataclass(frozen=True)
class ConjugatePosterior:
    """A conjugate update: prior parameters, data sufficient statistics, and
    the resulting posterior parameters."""

    family: str  # gamma_poisson | beta_binomial | normal_normal
    prior_params: tuple[float, float]
    posterior_params: tuple[float, float]
    suffstats: dict

    def posterior_dist(self):
        a, b = self.posterior_params
        if self.family == "gamma_poisson":
            return Gamma(a, b)
        if self.family == "beta_binomial":
            return Beta(a, b)
        if self.family == "normal_normal":
            return Normal(a, b)
        raise ValueError(f"unknown family {self.family}")

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "prior": list(self.prior_params),
            "posterior": list(self.posterior_params),
            "suffstats": dict(self.suffstats),
        }


@dataclass(frozen=True)
class QuantileAssessment:
    """Two stated prior quantiles (p1, q1) and (p2, q2) on a beta support."""

    p1: float
    q1: float
    p2: float
    q2: float

    def __post_init__(self):
        if not (0.0 < self.p1 < self.p2 < 1.0):
            raise ValueError(f"need 0 < p1 < p2 < 1, got ({self.p1}, {self.p2})")
        if not (0.0 < self.q1 < self.q2 < 1.0):
            raise ValueError(f"need 0 < q1 < q2 < 1, got ({self.q1}, {self.q2})")


def gamma_poisson_update(alpha: float, beta: float,
                         data: Sequence[int]) -> ConjugatePosterior:
    """Gamma(alpha, beta) prior + Poisson counts -> Gamma(alpha + sum y, beta + n)."""
    Gamma(alpha, beta)  # validate hyperparameters
    y = np.asarray(data, dtype=float)
    if y.size and (np.any(y < 0) or np.any(y != np.round(y))):
        raise ValueError("data must be nonnegative integer counts")
    n = int(y.size)
    sum_y = float(y.sum())
    return ConjugatePosterior(
        family="gamma_poisson",
        prior_params=(alpha, beta),
        posterior_params=(alpha + sum_y, beta + n),
        suffstats={"n": n, "sum_y": sum_y},
    )


def posterior_mean_decomposition(cp: ConjugatePosterior) -> dict:
    """Posterior mean as a weighted average of sample mean and prior mean."""
    if cp.family != "gamma_poisson":
        raise ValueError("decomposition defined for the gamma_poisson family")
    n = cp.suffstats["n"]
    alpha, beta = cp.prior_params
    if n == 0:
        raise DecompositionUndefinedError(
            f"no data: posterior mean equals the prior mean {alpha / beta}")
    sum_y = cp.suffstats["sum_y"]
    ybar = sum_y / n
    mu = alpha / beta
    data_weight = n / (n + beta)
    prior_weight = beta / (n + beta)
    return {
        "mean": data_weight * ybar + prior_weight * mu,
        "data_weight": data_weight,
        "prior_weight": prior_weight,
        "sample_mean": ybar,
        "prior_mean": mu,
    }


def prior_from_mean_and_size(mu: float, beta: float) -> Gamma:
    """Gamma prior with stated mean mu and prior sample size beta."""
    if mu <= 0 or beta <= 0:
        raise ValueError("mu and beta must be positive")
    return Gamma(mu * beta, beta)


def beta_binomial_update(a: float, b: float, y: int, n: int) -> ConjugatePosterior:
    """Beta(a, b) prior + y successes in n trials -> Beta(a + y, b + n - y)."""
    Beta(a, b)
    if not (0 <= y <= n):
        raise ValueError(f"need 0 <= y <= n, got y={y}, n={n}")
    return ConjugatePosterior(
        family="beta_binomial",
        prior_params=(a, b),
        posterior_params=(a + y, b + n - y),
        suffstats={"n": int(n), "y": int(y)},
    )


def normal_normal_update(mu0: float, tau0: float, sigma: float,
                         data: Sequence[float]) -> ConjugatePosterior:
    """Normal mean update with known sampling sd sigma; prior N(mu0, tau0).

    Posterior precision is 1/tau0^2 + n/sigma^2; posterior mean is the
    precision-weighted average of mu0 and the sample mean.
    """
    if tau0 <= 0 or sigma <= 0:
        raise ValueError("tau0 and sigma must be positive")
    y = np.asarray(data, dtype=float)
    if y.size == 0:
        raise ValueError("data must be nonempty")
    n = y.size
    prec = 1.0 / tau0**2 + n / sigma**2
    mean = (mu0 / tau0**2 + y.sum() / sigma**2) / prec
    return ConjugatePosterior(
        family="normal_normal",
        prior_params=(mu0, tau0),
        posterior_params=(float(mean), 1.0 / math.sqrt(prec)),
        suffstats={"n": int(n), "sum_y": float(y.sum())},
    )


def conjugate_predictive_pmf(cp: ConjugatePosterior, y_star: int) -> float:
    """Exact gamma-Poisson predictive mass: a negative binomial evaluated via
    log-gamma functions to stay finite at large shape parameters."""
    if cp.family != "gamma_poisson":
        raise ValueError("closed-form predictive implemented for gamma_poisson")
    if y_star < 0:
        return 0.0
    a1, b1 = cp.posterior_params
    log_p = (sc.gammaln(y_star + a1) - sc.gammaln(a1) - sc.gammaln(y_star + 1)
             + a1 * math.log(b1 / (b1 + 1.0)) - y_star * math.log(b1 + 1.0))
    return float(math.exp(log_p))


def _quantile_residuals(log_ab: np.ndarray, qa: QuantileAssessment) -> np.ndarray:
    a, b = np.exp(log_ab)
    d = Beta(float(a), float(b))
    return np.array([quantile(d, qa.p1) - qa.q1, quantile(d, qa.p2) - qa.q2])


def beta_from_quantiles(qa: QuantileAssessment) -> tuple[float, float]:
    """Solve for the Beta(a, b) whose p1/p2 quantiles match q1/q2.

    Works over (ln a, ln b): a derivative-free simplex localizes the solution,
    then damped Newton on the residuals polishes it to 1e-6 quantile accuracy.
    """
    def sq_loss(log_ab):
        r = _quantile_residuals(log_ab, qa)
        return float(r @ r)

    res = optimize.minimize(sq_loss, x0=np.zeros(2), method="Nelder-Mead",
                            options={"xatol": 1e-8, "fatol": 1e-14, "maxiter": 2000})
    x = res.x
    for _ in range(50):
        r = _quantile_residuals(x, qa)
        if np.max(np.abs(r)) <= 1e-9:
            break
        # finite-difference Jacobian in log space
        J = np.empty((2, 2))
        h = 1e-6
        for j in range(2):
            xp = x.copy()
            xp[j] += h
            J[:, j] = (_quantile_residuals(xp, qa) - r) / h
        try:
            step = np.linalg.solve(J, r)
        except np.linalg.LinAlgError:
            break
        lam = 1.0
        base = float(r @ r)
        while lam > 1e-8:
            x_new = x - lam * step
            if sq_loss(x_new) < base:
                x = x_new
                break
            lam /= 2.0
        else:
            break
    a, b = np.exp(x)
    if not (1e-3 < a < 1e4 and 1e-3 < b < 1e4):
        raise InfeasibleAssessmentError(
            f"no beta shapes in (1e-3, 1e4)^2 match the assessment {qa}")
    d = Beta(float(a), float(b))
    if (abs(quantile(d, qa.p1) - qa.q1) > 1e-6
            or abs(quantile(d, qa.p2) - qa.q2) > 1e-6):
        raise InfeasibleAssessmentError(
            f"quantile matching failed to reach 1e-6 for assessment {qa}")
    return float(a), float(b)
