"""Probability primitives: log-densities, CDFs, quantiles, seeded sampling.

All gamma distributions are rate-parameterized (mean = shape / rate).
Log densities include full normalizing constants; model-specific unnormalized
log posteriors live in the modules that define them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy import special as sc

from .exceptions import FactorizationError

__all__ = [
    "Gamma", "Beta", "Normal", "Poisson", "Binomial", "Cauchy", "Uniform",
    "NegBinomial", "DistSpec", "RngStream",
    "log_density", "cdf", "quantile", "sample", "mvn_sample",
]


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ValueError(msg)


@dataclass(frozen=True)
class Gamma:
    shape: float
    rate: float

    def __post_init__(self):
        _require(self.shape > 0, f"gamma shape must be > 0, got {self.shape}")
        _require(self.rate > 0, f"gamma rate must be > 0, got {self.rate}")


@dataclass(frozen=True)
class Beta:
    a: float
    b: float

    def __post_init__(self):
        _require(self.a > 0, f"beta a must be > 0, got {self.a}")
        _require(self.b > 0, f"beta b must be > 0, got {self.b}")


@dataclass(frozen=True)
class Normal:
    mean: float
    sd: float

    def __post_init__(self):
        _require(self.sd > 0, f"normal sd must be > 0, got {self.sd}")


@dataclass(frozen=True)
class Poisson:
    rate: float

    def __post_init__(self):
        _require(self.rate > 0, f"poisson rate must be > 0, got {self.rate}")


@dataclass(frozen=True)
class Binomial:
    n: int
    p: float

    def __post_init__(self):
        _require(int(self.n) == self.n and self.n >= 0,
                 f"binomial n must be a nonnegative integer, got {self.n}")
        _require(0.0 <= self.p <= 1.0, f"binomial p must be in [0,1], got {self.p}")


@dataclass(frozen=True)
class Cauchy:
    loc: float
    scale: float

    def __post_init__(self):
        _require(self.scale > 0, f"cauchy scale must be > 0, got {self.scale}")


@dataclass(frozen=True)
class Uniform:
    lo: float
    hi: float

    def __post_init__(self):
        _require(self.lo < self.hi, f"uniform requires lo < hi, got [{self.lo}, {self.hi}]")


@dataclass(frozen=True)
class NegBinomial:
    size: float
    prob: float

    def __post_init__(self):
        _require(self.size > 0, f"neg_binomial size must be > 0, got {self.size}")
        _require(0.0 < self.prob < 1.0,
                 f"neg_binomial prob must be in (0,1), got {self.prob}")


DistSpec = Union[Gamma, Beta, Normal, Poisson, Binomial, Cauchy, Uniform, NegBinomial]

_DISCRETE = (Poisson, Binomial, NegBinomial)


@dataclass
class RngStream:
    """Seeded, stream-addressable random source.

    Identical (seed, stream_id) pairs replay bit-identical draw sequences;
    distinct stream_ids give statistically independent streams.  Not safe for
    shared mutable use across threads: give each worker its own stream_id.
    """

    seed: int
    stream_id: int = 0
    _gen: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        self._gen = np.random.Generator(np.random.PCG64(ss))

    @property
    def generator(self) -> np.random.Generator:
        return self._gen

    def substream(self, k: int) -> "RngStream":
        """Derived independent stream; deterministic in (seed, stream_id, k)."""
        child = RngStream.__new__(RngStream)
        child.seed = self.seed
        child.stream_id = self.stream_id
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id, k))
        child._gen = np.random.Generator(np.random.PCG64(ss))
        return child


# ---------------------------------------------------------------------------
# log density


def log_density(d: DistSpec, x) -> float:
    """Exact log pdf/pmf including normalizing constants; -inf off support."""
    x = float(x)
    if isinstance(d, Gamma):
        if x <= 0:
            return -math.inf
        return (d.shape * math.log(d.rate) - sc.gammaln(d.shape)
                + (d.shape - 1) * math.log(x) - d.rate * x)
    if isinstance(d, Beta):
        if not (0.0 < x < 1.0):
            return -math.inf
        return ((d.a - 1) * math.log(x) + (d.b - 1) * math.log1p(-x)
                - sc.betaln(d.a, d.b))
    if isinstance(d, Normal):
        z = (x - d.mean) / d.sd
        return -0.5 * z * z - math.log(d.sd) - 0.5 * math.log(2 * math.pi)
    if isinstance(d, Poisson):
        if x < 0 or x != int(x):
            return -math.inf
        k = int(x)
        return k * math.log(d.rate) - d.rate - sc.gammaln(k + 1)
    if isinstance(d, Binomial):
        if x < 0 or x > d.n or x != int(x):
            return -math.inf
        k = int(x)
        out = sc.gammaln(d.n + 1) - sc.gammaln(k + 1) - sc.gammaln(d.n - k + 1)
        if k > 0:
            out += k * math.log(d.p)
        elif d.p == 1.0:
            return -math.inf
        if d.n - k > 0:
            out += (d.n - k) * math.log1p(-d.p)
        elif d.p == 0.0 and k > 0:
            return -math.inf
        return out
    if isinstance(d, Cauchy):
        z = (x - d.loc) / d.scale
        return -math.log(math.pi * d.scale * (1.0 + z * z))
    if isinstance(d, Uniform):
        if d.lo <= x <= d.hi:
            return -math.log(d.hi - d.lo)
        return -math.inf
    if isinstance(d, NegBinomial):
        if x < 0 or x != int(x):
            return -math.inf
        k = int(x)
        return (sc.gammaln(k + d.size) - sc.gammaln(d.size) - sc.gammaln(k + 1)
                + d.size * math.log(d.prob) + k * math.log1p(-d.prob))
    raise TypeError(f"unknown distribution {d!r}")


# ---------------------------------------------------------------------------
# CDF


def cdf(d: DistSpec, x) -> float:
    x = float(x)
    if isinstance(d, Gamma):
        if x <= 0:
            return 0.0
        return float(sc.gammainc(d.shape, d.rate * x))
    if isinstance(d, Beta):
        if x <= 0:
            return 0.0
        if x >= 1:
            return 1.0
        return float(sc.betainc(d.a, d.b, x))
    if isinstance(d, Normal):
        return float(sc.ndtr((x - d.mean) / d.sd))
    if isinstance(d, Poisson):
        if x < 0:
            return 0.0
        k = math.floor(x)
        return float(sc.gammaincc(k + 1, d.rate))
    if isinstance(d, Binomial):
        if x < 0:
            return 0.0
        k = math.floor(x)
        if k >= d.n:
            return 1.0
        if d.p == 0.0:
            return 1.0
        if d.p == 1.0:
            return 0.0
        return float(sc.betainc(d.n - k, k + 1, 1.0 - d.p))
    if isinstance(d, Cauchy):
        return 0.5 + math.atan((x - d.loc) / d.scale) / math.pi
    if isinstance(d, Uniform):
        if x <= d.lo:
            return 0.0
        if x >= d.hi:
            return 1.0
        return (x - d.lo) / (d.hi - d.lo)
    if isinstance(d, NegBinomial):
        if x < 0:
            return 0.0
        k = math.floor(x)
        return float(sc.betainc(d.size, k + 1, d.prob))
    raise TypeError(f"unknown distribution {d!r}")


# ---------------------------------------------------------------------------
# quantile


def _invert_cdf(d: DistSpec, p: float, lo: float, hi: float) -> float:
    """Bracketing plus safeguarded Newton on cdf(x) - p, tolerance 1e-10."""
    # expand the bracket until it straddles p
    flo, fhi = cdf(d, lo), cdf(d, hi)
    for _ in range(200):
        if flo <= p:
            break
        lo = lo - (hi - lo)
        flo = cdf(d, lo)
    for _ in range(200):
        if fhi >= p:
            break
        hi = hi + (hi - lo)
        fhi = cdf(d, hi)
    x = 0.5 * (lo + hi)
    for _ in range(200):
        f = cdf(d, x) - p
        if abs(f) <= 1e-15:
            return x
        if f > 0:
            hi = x
        else:
            lo = x
        pdf = math.exp(log_density(d, x))
        if pdf > 0:
            step = f / pdf
            x_new = x - step
            if not (lo < x_new < hi):
                x_new = 0.5 * (lo + hi)
        else:
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= 1e-14 * (1.0 + abs(x)):
            x = x_new
            break
        x = x_new
    if abs(cdf(d, x) - p) > 1e-10:
        # fall back to pure bisection until the tolerance is met
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if cdf(d, mid) - p > 0:
                hi = mid
            else:
                lo = mid
            x = mid
            if abs(cdf(d, x) - p) <= 1e-10:
                break
    return x


def _discrete_quantile(d: DistSpec, p: float) -> int:
    """Smallest integer x with CDF(x) >= p."""
    if isinstance(d, Poisson):
        mean, var = d.rate, d.rate
        upper_cap = None
    elif isinstance(d, Binomial):
        mean, var = d.n * d.p, d.n * d.p * (1 - d.p)
        upper_cap = d.n
    else:  # NegBinomial
        mean = d.size * (1 - d.prob) / d.prob
        var = mean / d.prob
        upper_cap = None
    k = max(0, int(mean + 10 * math.sqrt(var + 1)))
    if upper_cap is not None:
        k = min(k, upper_cap)
    while cdf(d, k) < p:
        if upper_cap is not None and k >= upper_cap:
            return upper_cap
        k = 2 * k + 10
        if upper_cap is not None:
            k = min(k, upper_cap)
    lo = 0
    hi = k
    while lo < hi:
        mid = (lo + hi) // 2
        if cdf(d, mid) >= p:
            hi = mid
        else:
            lo = mid + 1
    return lo


def quantile(d: DistSpec, p: float) -> float:
    """Quantile function; for discrete kinds, smallest x with CDF(x) >= p."""
    if not (0.0 < p < 1.0):
        raise ValueError(f"quantile level must be in (0,1), got {p}")
    if isinstance(d, Normal):
        return d.mean + d.sd * float(sc.ndtri(p))
    if isinstance(d, Cauchy):
        return d.loc + d.scale * math.tan(math.pi * (p - 0.5))
    if isinstance(d, Uniform):
        return d.lo + p * (d.hi - d.lo)
    if isinstance(d, Gamma):
        guess = d.shape / d.rate
        return _invert_cdf(d, p, guess * 1e-3, guess * 2 + 10 / d.rate)
    if isinstance(d, Beta):
        return _invert_cdf(d, p, 1e-12, 1 - 1e-12)
    if isinstance(d, _DISCRETE):
        return float(_discrete_quantile(d, p))
    raise TypeError(f"unknown distribution {d!r}")


# ---------------------------------------------------------------------------
# sampling


def sample(d: DistSpec, rng: RngStream, n: int) -> np.ndarray:
    """n independent draws from d; deterministic given the stream state."""
    if n < 1:
        raise ValueError(f"sample count must be >= 1, got {n}")
    g = rng.generator
    if isinstance(d, Gamma):
        return g.gamma(d.shape, 1.0 / d.rate, size=n)
    if isinstance(d, Beta):
        return g.beta(d.a, d.b, size=n)
    if isinstance(d, Normal):
        return g.normal(d.mean, d.sd, size=n)
    if isinstance(d, Poisson):
        return g.poisson(d.rate, size=n).astype(float)
    if isinstance(d, Binomial):
        return g.binomial(d.n, d.p, size=n).astype(float)
    if isinstance(d, Cauchy):
        return d.loc + d.scale * g.standard_cauchy(size=n)
    if isinstance(d, Uniform):
        return g.uniform(d.lo, d.hi, size=n)
    if isinstance(d, NegBinomial):
        return g.negative_binomial(d.size, d.prob, size=n).astype(float)
    raise TypeError(f"unknown distribution {d!r}")


def _checked_cholesky(cov: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor; on failure, name the offending leading minor."""
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        for k in range(1, cov.shape[0] + 1):
            try:
                np.linalg.cholesky(cov[:k, :k])
            except np.linalg.LinAlgError:
                raise FactorizationError(
                    f"covariance is not positive-definite: leading minor of "
                    f"order {k} is not positive-definite", leading_minor=k,
                ) from None
        raise


def mvn_sample(mean, cov, rng: RngStream, n: int) -> np.ndarray:
    """n multivariate-normal rows via Cholesky factorization of cov."""
    mean = np.asarray(mean, dtype=float)
    cov = np.asarray(cov, dtype=float)
    if cov.shape != (mean.size, mean.size):
        raise ValueError(f"cov shape {cov.shape} does not match mean dim {mean.size}")
    if not np.allclose(cov, cov.T, atol=1e-10):
        raise ValueError("cov must be symmetric")
    L = _checked_cholesky(cov)
    z = rng.generator.standard_normal(size=(n, mean.size))
    return mean + z @ L.T
