"""Posterior-mode finding, finite-difference Hessians, normal (Laplace)
approximation with marginal extraction, the built-in two-group logistic model,
and grid-quadrature marginals for comparison."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import optimize

from .discrete import GridPosterior
from .distributions import Cauchy, Normal, log_density
from .exceptions import ContradictionError, OptimizationError, SaddlePointError, StencilError

__all__ = [
    "LogPosterior", "NormalApprox", "TwoGroupData", "two_group_logistic_logpost",
    "two_group_log_posterior", "find_mode", "hessian_fd", "laplace_fit",
    "marginal", "grid_marginal", "transform_draws",
]


@dataclass(frozen=True)
class LogPosterior:
    """A log posterior density known up to an additive constant.

    ``eval`` must return -inf (never raise) off the support.
    """

    dim: int
    eval: Callable[[np.ndarray], float]
    support_note: str = ""

    def __call__(self, x) -> float:
        return float(self.eval(np.atleast_1d(np.asarray(x, dtype=float))))


@dataclass(frozen=True)
class NormalApprox:
    """Laplace fit: posterior mode, covariance, and the log posterior there."""

    mode: np.ndarray
    cov: np.ndarray
    logpost_at_mode: float

    def to_json(self) -> dict:
        return {"mode": self.mode.tolist(), "cov": self.cov.tolist()}


@dataclass(frozen=True)
class TwoGroupData:
    """Success/trial counts for the two groups of the logistic model."""

    y_m: int
    n_m: int
    y_w: int
    n_w: int

    def __post_init__(self):
        if not (0 <= self.y_m <= self.n_m and 0 <= self.y_w <= self.n_w):
            raise ValueError(f"need 0 <= y <= n in each group, got {self}")


def two_group_logistic_logpost(d: TwoGroupData, beta) -> float:
    """Log posterior of (beta0, beta1) in the two-group logistic model.

    Binomial log likelihood for both groups plus log Cauchy(0, 0.5) on the
    slope and log Normal(0, sd 100) on the intercept, with full constants.
    """
    b0, b1 = float(beta[0]), float(beta[1])
    # log p and log(1-p) via stable softplus: p = logistic(lp)
    def loglik(lp: float, y: int, n: int) -> float:
        # y*log p + (n-y)*log(1-p) = y*lp - n*log(1+exp(lp))
        return y * lp - n * (math.log1p(math.exp(-abs(lp))) + max(lp, 0.0))

    out = loglik(b0, d.y_m, d.n_m) + loglik(b0 + b1, d.y_w, d.n_w)
    out += log_density(Cauchy(0.0, 0.5), b1)
    out += log_density(Normal(0.0, 100.0), b0)
    return out


def two_group_log_posterior(d: TwoGroupData) -> LogPosterior:
    return LogPosterior(dim=2, eval=lambda b: two_group_logistic_logpost(d, b))


def _fd_gradient(lp: LogPosterior, x: np.ndarray) -> np.ndarray:
    g = np.empty(lp.dim)
    for i in range(lp.dim):
        h = 1e-5 * (1.0 + abs(x[i]))
        xp, xm = x.copy(), x.copy()
        xp[i] += h
        xm[i] -= h
        g[i] = (lp(xp) - lp(xm)) / (2 * h)
    return g


def find_mode(lp: LogPosterior, init) -> np.ndarray:
    """Locate the posterior mode: simplex descent, then Newton polish.

    Converged when the central-difference gradient has max-norm <= 1e-6.
    """
    x0 = np.atleast_1d(np.asarray(init, dtype=float))
    if not math.isfinite(lp(x0)):
        raise ValueError("log posterior must be finite at init")
    evals = [0]

    def neg(x):
        evals[0] += 1
        return -lp(x)

    res = optimize.minimize(neg, x0, method="Nelder-Mead",
                            options={"xatol": 1e-10, "fatol": 1e-12,
                                     "maxiter": 5000, "maxfev": 5000})
    x = np.atleast_1d(res.x)
    if not (np.all(np.isfinite(x)) and math.isfinite(lp(x))):
        # simplex diverged: the posterior is unbounded along some direction
        raise OptimizationError("mode search diverged; log posterior appears "
                                "unbounded above", best=x0)
    best = x.copy()
    # Newton polish with finite-difference derivatives
    for _ in range(100):
        g = _fd_gradient(lp, x)
        if np.max(np.abs(g)) <= 1e-6:
            return x
        H = hessian_fd(lp, x)
        try:
            step = np.linalg.solve(H, g)
        except np.linalg.LinAlgError:
            break
        lam = 1.0
        fx = lp(x)
        while lam > 1e-10:
            x_new = x - lam * step
            if lp(x_new) >= fx:
                x = x_new
                break
            lam /= 2.0
        else:
            break
        if lp(x) > lp(best):
            best = x.copy()
        if evals[0] > 10_000:
            break
    if np.max(np.abs(_fd_gradient(lp, x))) <= 1e-6:
        return x
    raise OptimizationError("mode search did not reach gradient tolerance 1e-6",
                            best=best)


def hessian_fd(lp: LogPosterior, x) -> np.ndarray:
    """Symmetrized central-difference Hessian, step 1e-4 * (1 + |x_i|)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    n = x.size
    h = 1e-4 * (1.0 + np.abs(x))
    H = np.empty((n, n))
    f0 = lp(x)
    if not math.isfinite(f0):
        raise StencilError(f"log posterior not finite at {x}")
    for i in range(n):
        for j in range(i, n):
            if i == j:
                xp, xm = x.copy(), x.copy()
                xp[i] += h[i]
                xm[i] -= h[i]
                fp, fm = lp(xp), lp(xm)
                if not (math.isfinite(fp) and math.isfinite(fm)):
                    raise StencilError(f"non-finite evaluation in stencil at {x}")
                H[i, i] = (fp - 2 * f0 + fm) / h[i] ** 2
            else:
                fpp = lp(x + _e(n, i, h[i]) + _e(n, j, h[j]))
                fpm = lp(x + _e(n, i, h[i]) - _e(n, j, h[j]))
                fmp = lp(x - _e(n, i, h[i]) + _e(n, j, h[j]))
                fmm = lp(x - _e(n, i, h[i]) - _e(n, j, h[j]))
                vals = (fpp, fpm, fmp, fmm)
                if not all(math.isfinite(v) for v in vals):
                    raise StencilError(f"non-finite evaluation in stencil at {x}")
                H[i, j] = H[j, i] = (fpp - fpm - fmp + fmm) / (4 * h[i] * h[j])
    return (H + H.T) / 2.0


def _e(n: int, i: int, scale: float) -> np.ndarray:
    v = np.zeros(n)
    v[i] = scale
    return v


def laplace_fit(lp: LogPosterior, init) -> NormalApprox:
    """Normal approximation: mode plus inverse of the negated Hessian."""
    mode = find_mode(lp, init)
    H = hessian_fd(lp, mode)
    neg_h = -H
    eigvals = np.linalg.eigvalsh(neg_h)
    if np.any(eigvals <= 0):
        raise SaddlePointError(
            f"negated Hessian at the mode is not positive-definite "
            f"(eigenvalues {eigvals.tolist()})", eigenvalues=eigvals)
    cov = np.linalg.inv(neg_h)
    cov = (cov + cov.T) / 2.0
    return NormalApprox(mode=mode, cov=cov, logpost_at_mode=lp(mode))


def marginal(na: NormalApprox, coef) -> Normal:
    """Normal marginal of a linear combination coef . theta."""
    coef = np.asarray(coef, dtype=float)
    if coef.size != na.mode.size:
        raise ValueError("coef length must match the parameter dimension")
    var = float(coef @ na.cov @ coef)
    if var <= 0:
        raise ValueError("degenerate marginal: coefficient vector gives zero variance")
    return Normal(float(coef @ na.mode), math.sqrt(var))


def grid_marginal(lp: LogPosterior, box: Sequence[tuple[float, float]],
                  steps: int, coord: int) -> GridPosterior:
    """Quadrature marginal of one coordinate of a 2-d log posterior.

    Evaluates lp on the product grid, max-subtracts, sums out the other
    coordinate, and returns the normalized marginal of ``coord``.
    """
    if lp.dim != 2:
        raise ValueError("grid_marginal supports dim=2 only")
    if steps < 50:
        raise ValueError("need steps >= 50")
    axes = [np.linspace(lo, hi, steps) for lo, hi in box]
    L = np.empty((steps, steps))
    for i, a in enumerate(axes[0]):
        for j, b in enumerate(axes[1]):
            L[i, j] = lp(np.array([a, b]))
    finite = np.isfinite(L)
    if not finite.any():
        raise ContradictionError("log posterior is -inf on the whole grid")
    W = np.where(finite, np.exp(np.where(finite, L - L[finite].max(), 0.0)), 0.0)
    m = W.sum(axis=1 - coord)
    grid = axes[coord]
    probs = m / m.sum()
    log_post = np.where(m > 0, np.log(np.where(m > 0, m, 1.0)), -np.inf)
    return GridPosterior(grid=grid, log_post=log_post, probs=probs,
                         step=float(grid[1] - grid[0]))


def transform_draws(draws: np.ndarray, h: Callable[[np.ndarray], float]) -> np.ndarray:
    """Apply a scalar function of the parameter vector to each draw row."""
    draws = np.atleast_2d(np.asarray(draws, dtype=float))
    if draws.size == 0:
        raise ValueError("draws must be nonempty")
    return np.array([h(row) for row in draws], dtype=float)
