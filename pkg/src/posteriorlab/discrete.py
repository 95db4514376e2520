"""Discrete Bayes tables, probability-bin credible sets, discrete predictive
mass functions, and continuous-parameter grid posteriors with resampling."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .distributions import RngStream
from .exceptions import ContradictionError, DegeneratePriorError

__all__ = [
    "BayesTable", "GridPosterior", "weights_to_prior", "update_table",
    "credible_set", "predictive_mass", "grid_posterior", "grid_summary",
    "grid_sample", "GridSummary",
]


@dataclass(frozen=True)
class BayesTable:
    """Columns of a discrete Bayes table: model values, prior, likelihood,
    prior-times-likelihood products, and normalized posterior."""

    values: np.ndarray
    prior: np.ndarray
    likelihood: np.ndarray
    product: np.ndarray
    posterior: np.ndarray
    normalizer: float

    def to_json(self) -> dict:
        return {
            "values": self.values.tolist(),
            "prior": self.prior.tolist(),
            "likelihood": self.likelihood.tolist(),
            "product": self.product.tolist(),
            "posterior": self.posterior.tolist(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "BayesTable":
        product = np.asarray(obj["product"], dtype=float)
        return cls(
            values=np.asarray(obj["values"], dtype=float),
            prior=np.asarray(obj["prior"], dtype=float),
            likelihood=np.asarray(obj["likelihood"], dtype=float),
            product=product,
            posterior=np.asarray(obj["posterior"], dtype=float),
            normalizer=float(product.sum()),
        )


@dataclass(frozen=True)
class GridPosterior:
    """Uniform-grid discrete approximation to a continuous posterior."""

    grid: np.ndarray
    log_post: np.ndarray
    probs: np.ndarray
    step: float


def weights_to_prior(weights: Sequence[float]) -> np.ndarray:
    """Convert nonnegative weights to prior probabilities (w_j / sum w)."""
    w = np.asarray(weights, dtype=float)
    if w.size == 0 or np.any(w < 0):
        raise ValueError("weights must be a nonempty nonnegative vector")
    total = w.sum()
    if total == 0:
        raise DegeneratePriorError("all weights are zero")
    return w / total


def update_table(values: Sequence[float], prior: Sequence[float],
                 loglik: Callable[[float], float]) -> BayesTable:
    """Populate a Bayes table from model values, prior, and a log-likelihood.

    The likelihood column keeps the natural scale exp(loglik) whenever that is
    representable; otherwise everything is carried in log space (shifted by the
    max) and the posterior is unchanged.
    """
    values = np.asarray(values, dtype=float)
    prior = np.asarray(prior, dtype=float)
    if values.shape != prior.shape:
        raise ValueError("values and prior must have the same length")
    ll = np.array([loglik(v) for v in values], dtype=float)
    finite = np.isfinite(ll)
    if not finite.any():
        raise ContradictionError("all likelihood values are zero")
    m = ll[finite].max()
    if abs(m) < 700.0:  # exp(m) representable in double precision
        lik = np.where(finite, np.exp(np.where(finite, ll, 0.0)), 0.0)
    else:
        lik = np.where(finite, np.exp(np.where(finite, ll, 0.0) - m), 0.0)
    product = prior * lik
    normalizer = product.sum()
    if normalizer == 0:
        raise ContradictionError("posterior normalizer is zero")
    return BayesTable(values=values, prior=prior, likelihood=lik,
                      product=product, posterior=product / normalizer,
                      normalizer=float(normalizer))


def credible_set(t: BayesTable, level: float) -> tuple[list[float], float]:
    """Greedy probability-bin credible set.

    Values enter in decreasing posterior order (ties toward the smaller value)
    until the cumulative posterior reaches ``level``.  Returns the selected
    values sorted ascending, with the exact coverage attained.
    """
    if not (0.0 < level < 1.0):
        raise ValueError(f"level must be in (0,1), got {level}")
    order = sorted(range(len(t.values)), key=lambda j: (-t.posterior[j], t.values[j]))
    chosen: list[float] = []
    coverage = 0.0
    for j in order:
        chosen.append(float(t.values[j]))
        coverage += float(t.posterior[j])
        if coverage >= level:
            break
    return sorted(chosen), coverage


def predictive_mass(t: BayesTable, sampling_pmf: Callable[[int, float], float],
                    y_star: int) -> float:
    """Posterior predictive mass: sum_j posterior_j * pmf(y_star | value_j)."""
    return float(sum(p * sampling_pmf(y_star, v)
                     for p, v in zip(t.posterior, t.values)))


def grid_posterior(lo: float, hi: float, step: float,
                   logpost: Callable[[float], float]) -> GridPosterior:
    """Evaluate an unnormalized log posterior on a uniform inclusive grid and
    normalize after subtracting the max."""
    if not (lo < hi) or step <= 0:
        raise ValueError("need lo < hi and step > 0")
    n = int(round((hi - lo) / step))
    grid = lo + step * np.arange(n + 1)
    lp = np.array([logpost(x) for x in grid], dtype=float)
    finite = np.isfinite(lp)
    if not finite.any():
        raise ContradictionError("log posterior is -inf on the whole grid")
    shifted = np.where(finite, lp - lp[finite].max(), -np.inf)
    w = np.where(finite, np.exp(np.where(finite, shifted, 0.0)), 0.0)
    return GridPosterior(grid=grid, log_post=lp, probs=w / w.sum(), step=step)


@dataclass(frozen=True)
class GridSummary:
    mean: float
    sd: float

    grid: GridPosterior = None  # type: ignore[assignment]

    def prob_above(self, x: float) -> float:
        return float(self.grid.probs[self.grid.grid > x].sum())

    def central_interval(self, level: float) -> tuple[float, float]:
        """Central interval from the step-function CDF (no interpolation)."""
        tail = (1.0 - level) / 2.0
        cum = np.cumsum(self.grid.probs)
        lo = self.grid.grid[np.searchsorted(cum, tail)]
        hi = self.grid.grid[np.searchsorted(cum, 1.0 - tail)]
        return float(lo), float(hi)


def grid_summary(g: GridPosterior) -> GridSummary:
    """Moments and tail probabilities of the discrete grid approximation."""
    mean = float(np.dot(g.probs, g.grid))
    var = float(np.dot(g.probs, (g.grid - mean) ** 2))
    return GridSummary(mean=mean, sd=math.sqrt(max(var, 0.0)), grid=g)


def grid_sample(g: GridPosterior, rng: RngStream, S: int) -> np.ndarray:
    """S i.i.d. draws (with replacement) from the grid's discrete law."""
    if S < 1:
        raise ValueError(f"sample count must be >= 1, got {S}")
    cum = np.cumsum(g.probs)
    cum[-1] = 1.0
    u = rng.generator.random(S)
    return g.grid[np.searchsorted(cum, u)]
