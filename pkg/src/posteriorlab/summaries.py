"""Monte Carlo posterior summarization, transformation of draws, and
posterior predictive checking."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .distributions import Gamma, RngStream

__all__ = ["PosteriorSummary", "PpcResult", "mc_summary", "mc_expectation_of",
           "ppc_mean_check"]


@dataclass(frozen=True)
class PosteriorSummary:
    mean: float
    sd: float
    quantiles: dict[float, float]
    n_draws: int


@dataclass(frozen=True)
class PpcResult:
    """Replicated test statistics, the observed statistic, and a two-sided
    tail area (doubled min tail, capped at 1)."""

    replicated_stats: np.ndarray
    observed_stat: float
    tail_area: float

    def to_json(self) -> dict:
        return {
            "replicated": self.replicated_stats.tolist(),
            "observed": self.observed_stat,
            "tail_area": self.tail_area,
        }


def mc_summary(draws: Sequence[float], levels: Sequence[float]) -> PosteriorSummary:
    """Mean, sd (denominator S-1), and interpolated empirical quantiles."""
    x = np.asarray(draws, dtype=float)
    if x.size == 0:
        raise ValueError("draws must be nonempty")
    for p in levels:
        if not (0.0 < p < 1.0):
            raise ValueError(f"quantile level must be in (0,1), got {p}")
    sd = float(x.std(ddof=1)) if x.size > 1 else 0.0
    qs = {float(p): float(np.quantile(x, p)) for p in levels}
    return PosteriorSummary(mean=float(x.mean()), sd=sd, quantiles=qs,
                            n_draws=int(x.size))


def mc_expectation_of(h: Callable[[float], float], draws: Sequence[float]) -> float:
    """Monte Carlo estimate of E[h(theta)] over posterior draws."""
    x = np.asarray(draws, dtype=float)
    if x.size == 0:
        raise ValueError("draws must be nonempty")
    return float(np.mean([h(v) for v in x]))


def ppc_mean_check(posterior: Gamma, n: int, reps: int, observed_mean: float,
                   rng: RngStream) -> PpcResult:
    """Posterior predictive check on the sample mean.

    Each rep draws a rate from the gamma posterior, simulates n Poisson
    counts, and records their mean.
    """
    if n < 1 or reps < 1:
        raise ValueError("need n >= 1 and reps >= 1")
    g = rng.generator
    lam = g.gamma(posterior.shape, 1.0 / posterior.rate, size=reps)
    counts = g.poisson(np.repeat(lam, n)).reshape(reps, n)
    stats = counts.mean(axis=1)
    frac_ge = float(np.mean(stats >= observed_mean))
    frac_le = float(np.mean(stats <= observed_mean))
    tail = min(1.0, 2.0 * min(frac_ge, frac_le))
    return PpcResult(replicated_stats=stats, observed_stat=float(observed_mean),
                     tail_area=tail)
