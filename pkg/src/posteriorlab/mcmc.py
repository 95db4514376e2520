"""Random-walk Metropolis, the Gibbs sampler for the Poisson change-point
model, Metropolis-within-Gibbs for the non-conjugate variant, and chain
diagnostics.

All samplers work on the log scale: the acceptance ratio is
exp(logpost(proposed) - logpost(current)) and the conditional of the change
point is normalized after subtracting the max log term.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .distributions import Gamma, Normal, RngStream
from .exceptions import DegenerateChainError

__all__ = [
    "ChainConfig", "Chain", "ChangePointSpec", "UniformProposal",
    "NormalProposal", "metropolis_rw", "discrete_metropolis", "walk_step",
    "sample_M_conditional", "gibbs_changepoint", "mwg_changepoint",
    "diagnostics",
]


@dataclass(frozen=True)
class ChainConfig:
    """Sampler run controls: kept draws, burn-in, thinning, chain count, seed.

    Total sampler steps per chain = burnin + iter * thin.
    """

    iter: int
    burnin: int = 0
    thin: int = 1
    n_chains: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.iter < 1 or self.burnin < 0 or self.thin < 1 or self.n_chains < 1:
            raise ValueError(f"invalid chain config {self}")


@dataclass(frozen=True)
class Chain:
    """Kept MCMC draws (chains stacked), acceptance tallies, and config."""

    draws: np.ndarray  # (n_chains * iter, n_params)
    param_names: tuple[str, ...]
    accept: dict[str, dict[str, int]]  # target -> {accepted, proposed}
    config: ChainConfig
    chain_ids: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        expected = self.config.iter * self.config.n_chains
        if self.draws.shape != (expected, len(self.param_names)):
            raise ValueError(
                f"draws shape {self.draws.shape} does not reconcile with "
                f"config ({expected} x {len(self.param_names)})")
        if self.chain_ids is None:
            object.__setattr__(
                self, "chain_ids",
                np.repeat(np.arange(self.config.n_chains), self.config.iter))

    def column(self, name_or_index: Union[str, int]) -> np.ndarray:
        if isinstance(name_or_index, str):
            name_or_index = self.param_names.index(name_or_index)
        return self.draws[:, name_or_index]

    def to_json(self) -> dict:
        return {
            "params": list(self.param_names),
            "draws": self.draws.tolist(),
            "accept": {k: dict(v) for k, v in self.accept.items()},
            "config": {
                "iter": self.config.iter, "burnin": self.config.burnin,
                "thin": self.config.thin, "n_chains": self.config.n_chains,
                "seed": self.config.seed,
            },
        }


@dataclass(frozen=True)
class UniformProposal:
    """Symmetric uniform random-walk proposal on (current - C, current + C)."""

    half_width: float

    def __post_init__(self):
        if self.half_width <= 0:
            raise ValueError("half_width must be positive")

    def draw(self, current: float, g: np.random.Generator) -> float:
        return g.uniform(current - self.half_width, current + self.half_width)


@dataclass(frozen=True)
class NormalProposal:
    """Symmetric normal random-walk proposal centered at the current value."""

    sd: float

    def __post_init__(self):
        if self.sd <= 0:
            raise ValueError("sd must be positive")

    def draw(self, current: float, g: np.random.Generator) -> float:
        return g.normal(current, self.sd)


@dataclass(frozen=True)
class ChangePointSpec:
    """Two-regime Poisson change-point model: counts, rate priors, and a
    uniform prior on the change index M in {1, ..., n-1}.

    Indices 1..M belong to the first regime.  prior1 is either a Gamma
    (conjugate, Gibbs) or a Normal (non-conjugate, Metropolis-within-Gibbs).
    """

    y: np.ndarray
    prior1: Union[Gamma, Normal]
    prior2: Gamma
    init_M: Optional[int] = None

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float)
        if y.size < 2:
            raise ValueError("need at least 2 observations")
        if np.any(y < 0) or np.any(y != np.round(y)):
            raise ValueError("counts must be nonnegative integers")
        object.__setattr__(self, "y", y.astype(int))
        if self.init_M is not None and not (1 <= self.init_M <= y.size - 1):
            raise ValueError(f"init_M must be in 1..{y.size - 1}")

    @property
    def n(self) -> int:
        return self.y.size


def metropolis_rw(lp: Callable[[float], float], init: float,
                  proposal: Union[UniformProposal, NormalProposal],
                  cfg: ChainConfig, rng: RngStream) -> Chain:
    """Random-walk Metropolis for a scalar target.

    Propose, compute R on the log scale, accept iff U < R.  Off-support
    proposals (lp = -inf) have R = 0 and are always rejected.
    """
    if not math.isfinite(lp(init)):
        raise ValueError("log posterior must be finite at init")
    total = cfg.burnin + cfg.iter * cfg.thin
    all_draws = np.empty((cfg.n_chains * cfg.iter, 1))
    accepted = proposed = 0
    for c in range(cfg.n_chains):
        g = rng.substream(c).generator
        cur = float(init)
        lp_cur = lp(cur)
        kept = 0
        for step in range(total):
            cand = proposal.draw(cur, g)
            lp_cand = lp(cand)
            log_r = lp_cand - lp_cur
            u = g.random()
            proposed += 1
            if math.log(u) < log_r:
                cur, lp_cur = cand, lp_cand
                accepted += 1
            if step >= cfg.burnin and (step - cfg.burnin + 1) % cfg.thin == 0:
                all_draws[c * cfg.iter + kept, 0] = cur
                kept += 1
    return Chain(draws=all_draws, param_names=("theta",),
                 accept={"theta": {"accepted": accepted, "proposed": proposed}},
                 config=cfg)


def walk_step(weights: Sequence[float], current: int, coin: str, u: float) -> dict:
    """One deterministic step of the number-line random walk.

    ``current`` indexes the values 1..K; heads proposes one step left, tails
    one step right.  Off-support candidates carry weight 0 and are rejected.
    """
    w = np.asarray(weights, dtype=float)
    K = w.size
    if np.any(w <= 0):
        raise ValueError("weights must be positive")
    if not (1 <= current <= K):
        raise ValueError(f"current must be in 1..{K}")
    if coin not in ("heads", "tails"):
        raise ValueError("coin must be 'heads' or 'tails'")
    candidate = current - 1 if coin == "heads" else current + 1
    if 1 <= candidate <= K:
        r = float(w[candidate - 1] / w[current - 1])
    else:
        r = 0.0
    accepted = u < r
    return {
        "candidate": candidate,
        "R": r,
        "accepted": bool(accepted),
        "next": candidate if accepted else current,
    }


def discrete_metropolis(weights: Sequence[float], start: int, steps: int,
                        rng: RngStream) -> np.ndarray:
    """Metropolis random walk on the integers 1..K with fair-coin proposals.

    Returns the visited path including the start state (length steps + 1).
    """
    w = np.asarray(weights, dtype=float)
    if np.any(w <= 0):
        raise ValueError("weights must be positive")
    if not (1 <= start <= w.size):
        raise ValueError(f"start must be in 1..{w.size}")
    g = rng.generator
    path = np.empty(steps + 1, dtype=int)
    path[0] = start
    cur = start
    for s in range(steps):
        coin = "heads" if g.random() < 0.5 else "tails"
        u = g.random()
        cur = walk_step(w, cur, coin, u)["next"]
        path[s + 1] = cur
    return path


def _m_log_weights(log_l1: float, log_l2: float, lam_diff: float,
                   cum_y: np.ndarray, total_y: float) -> np.ndarray:
    # cum_y[m-1] = sum of the first m counts, m = 1..n-1
    m = np.arange(1, cum_y.size + 1)
    return log_l1 * cum_y + log_l2 * (total_y - cum_y) + lam_diff * m


def sample_M_conditional(lambda1: float, lambda2: float, y: Sequence[int],
                         rng: RngStream, size: Optional[int] = None):
    """Draw the change index M from its full conditional.

    Pr(M = m) is proportional to
    lambda1^(sum_{i<=m} y_i) * lambda2^(sum_{i>m} y_i) * exp((lambda2-lambda1) m),
    computed on the log scale with max subtraction.  ``size=None`` returns one
    integer; otherwise an array of iid draws.
    """
    y = np.asarray(y, dtype=float)
    n = y.size
    if n < 2:
        raise ValueError("need at least 2 observations")
    cum_y = np.cumsum(y)[:-1]
    lw = _m_log_weights(math.log(lambda1), math.log(lambda2),
                        lambda2 - lambda1, cum_y, float(y.sum()))
    lw -= lw.max()
    p = np.exp(lw)
    p /= p.sum()
    cum = np.cumsum(p)
    cum[-1] = 1.0
    if size is None:
        return int(np.searchsorted(cum, rng.generator.random()) + 1)
    return np.searchsorted(cum, rng.generator.random(size)) + 1


def m_conditional_probs(lambda1: float, lambda2: float, y: Sequence[int]) -> np.ndarray:
    """Exact normalized conditional probabilities of M over 1..n-1."""
    y = np.asarray(y, dtype=float)
    cum_y = np.cumsum(y)[:-1]
    lw = _m_log_weights(math.log(lambda1), math.log(lambda2),
                        lambda2 - lambda1, cum_y, float(y.sum()))
    lw -= lw.max()
    p = np.exp(lw)
    return p / p.sum()


def _init_state(spec: ChangePointSpec, g: np.random.Generator) -> tuple[float, float, int]:
    M = spec.init_M if spec.init_M is not None else int(g.integers(1, spec.n))
    if isinstance(spec.prior1, Gamma):
        l1 = g.gamma(spec.prior1.shape, 1.0 / spec.prior1.rate)
    else:
        l1 = g.normal(spec.prior1.mean, spec.prior1.sd)
        for _ in range(1000):
            if l1 > 0:
                break
            l1 = g.normal(spec.prior1.mean, spec.prior1.sd)
        else:
            raise ValueError("could not draw a positive initial lambda1 from the prior")
    l2 = g.gamma(spec.prior2.shape, 1.0 / spec.prior2.rate)
    return float(l1), float(l2), M


def _draw_m(l1: float, l2: float, cum_y: np.ndarray, total_y: float,
            g: np.random.Generator) -> int:
    lw = _m_log_weights(math.log(l1), math.log(l2), l2 - l1, cum_y, total_y)
    lw -= lw.max()
    p = np.exp(lw)
    cum = np.cumsum(p)
    return int(np.searchsorted(cum, g.random() * cum[-1]) + 1)


def gibbs_changepoint(spec: ChangePointSpec, cfg: ChainConfig,
                      rng: RngStream) -> Chain:
    """Gibbs sampler for the conjugate change-point model.

    Sweep order: lambda1, lambda2, M.  The rate conditionals are gamma; M is
    drawn from its discrete conditional.
    """
    if not isinstance(spec.prior1, Gamma):
        raise ValueError("gibbs_changepoint requires a gamma prior on lambda1")
    a1, b1 = spec.prior1.shape, spec.prior1.rate
    a2, b2 = spec.prior2.shape, spec.prior2.rate
    n = spec.n
    cum_y = np.cumsum(spec.y).astype(float)[:-1]
    total_y = float(spec.y.sum())
    total = cfg.burnin + cfg.iter * cfg.thin
    draws = np.empty((cfg.n_chains * cfg.iter, 3))
    for c in range(cfg.n_chains):
        g = rng.substream(c).generator
        l1, l2, M = _init_state(spec, g)
        kept = 0
        for step in range(total):
            s_m = cum_y[M - 1]
            l1 = g.gamma(s_m + a1, 1.0 / (M + b1))
            l2 = g.gamma(total_y - s_m + a2, 1.0 / (n - M + b2))
            M = _draw_m(l1, l2, cum_y, total_y, g)
            if step >= cfg.burnin and (step - cfg.burnin + 1) % cfg.thin == 0:
                draws[c * cfg.iter + kept] = (l1, l2, M)
                kept += 1
    return Chain(draws=draws, param_names=("lambda1", "lambda2", "M"),
                 accept={}, config=cfg)


def mwg_changepoint(spec: ChangePointSpec, C: float, cfg: ChainConfig,
                    rng: RngStream) -> Chain:
    """Metropolis-within-Gibbs for the change-point model with a normal prior
    on lambda1.

    lambda1 takes one uniform-window Metropolis step per sweep against
    log g(l1) = sum_{i<=M} y_i * ln(l1) - M*l1 - (l1 - mu)^2 / (2 sigma^2),
    defined as -inf for l1 <= 0; lambda2 and M update as in the Gibbs sampler.
    """
    if not isinstance(spec.prior1, Normal):
        raise ValueError("mwg_changepoint requires a normal prior on lambda1")
    if C <= 0:
        raise ValueError("C must be positive")
    mu, sigma = spec.prior1.mean, spec.prior1.sd
    a2, b2 = spec.prior2.shape, spec.prior2.rate
    n = spec.n
    cum_y = np.cumsum(spec.y).astype(float)[:-1]
    total_y = float(spec.y.sum())

    def log_g(l1: float, s_m: float, M: int) -> float:
        if l1 <= 0:
            return -math.inf
        return s_m * math.log(l1) - M * l1 - (l1 - mu) ** 2 / (2 * sigma**2)

    total = cfg.burnin + cfg.iter * cfg.thin
    draws = np.empty((cfg.n_chains * cfg.iter, 3))
    accepted = proposed = 0
    for c in range(cfg.n_chains):
        g = rng.substream(c).generator
        l1, l2, M = _init_state(spec, g)
        kept = 0
        for step in range(total):
            s_m = cum_y[M - 1]
            cand = g.uniform(l1 - C, l1 + C)
            log_r = log_g(cand, s_m, M) - log_g(l1, s_m, M)
            u = g.random()
            proposed += 1
            if math.log(u) < log_r:
                l1 = cand
                accepted += 1
            l2 = g.gamma(total_y - s_m + a2, 1.0 / (n - M + b2))
            M = _draw_m(l1, l2, cum_y, total_y, g)
            if step >= cfg.burnin and (step - cfg.burnin + 1) % cfg.thin == 0:
                draws[c * cfg.iter + kept] = (l1, l2, M)
                kept += 1
    return Chain(draws=draws, param_names=("lambda1", "lambda2", "M"),
                 accept={"lambda1": {"accepted": accepted, "proposed": proposed}},
                 config=cfg)


def diagnostics(ch: Chain, param: Union[str, int], max_lag: int) -> dict:
    """Acceptance rate, autocorrelation out to max_lag, and effective sample
    size via the initial-positive-sequence truncation."""
    x = ch.column(param)
    S = x.size
    if S < 10 * max_lag:
        raise ValueError(f"need at least 10*max_lag = {10 * max_lag} draws, have {S}")
    if isinstance(param, int):
        name = ch.param_names[param]
    else:
        name = param
    tally = ch.accept.get(name)
    rate = tally["accepted"] / tally["proposed"] if tally else None
    xc = x - x.mean()
    denom = float(xc @ xc)
    if denom == 0.0:
        raise DegenerateChainError("zero-variance draws: autocorrelation undefined")
    acf = np.array([float(xc[k:] @ xc[:S - k]) / denom for k in range(1, max_lag + 1)])
    tail = 0.0
    for rho in acf:
        if rho < 0:
            break
        tail += rho
    ess = S / (1.0 + 2.0 * tail)
    return {"acceptance_rate": rate, "autocorr": acf, "ess": float(ess)}
