"""posteriorlab: a Bayesian computation toolkit.

Covers discrete Bayes tables, conjugate updating, Laplace (normal)
approximation, Monte Carlo summarization, and MCMC (Gibbs, Metropolis,
Metropolis-within-Gibbs), with a CLI and an HTTP service.
"""

__version__ = "0.1.0"

from .distributions import (  # noqa: F401
    Beta, Binomial, Cauchy, DistSpec, Gamma, NegBinomial, Normal, Poisson,
    RngStream, Uniform, cdf, log_density, mvn_sample, quantile, sample,
)
from .discrete import (  # noqa: F401
    BayesTable, GridPosterior, credible_set, grid_posterior, grid_sample,
    grid_summary, predictive_mass, update_table, weights_to_prior,
)
from .conjugate import (  # noqa: F401
    ConjugatePosterior, QuantileAssessment, beta_binomial_update,
    beta_from_quantiles, conjugate_predictive_pmf, gamma_poisson_update,
    normal_normal_update, posterior_mean_decomposition, prior_from_mean_and_size,
)
from .laplace import (  # noqa: F401
    LogPosterior, NormalApprox, TwoGroupData, find_mode, grid_marginal,
    hessian_fd, laplace_fit, marginal, transform_draws,
    two_group_log_posterior, two_group_logistic_logpost,
)
from .mcmc import (  # noqa: F401
    Chain, ChainConfig, ChangePointSpec, NormalProposal, UniformProposal,
    diagnostics, discrete_metropolis, gibbs_changepoint, metropolis_rw,
    mwg_changepoint, sample_M_conditional, walk_step,
)
from .summaries import (  # noqa: F401
    PosteriorSummary, PpcResult, mc_expectation_of, mc_summary, ppc_mean_check,
)
