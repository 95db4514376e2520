import math

import numpy as np
import pytest

from posteriorlab.distributions import Gamma, RngStream, quantile, sample
from posteriorlab.summaries import (
    PpcResult, mc_expectation_of, mc_summary, ppc_mean_check,
)


def h_at_most_two(lam: float) -> float:
    """P(Y <= 2) for a Poisson count with rate lam."""
    return math.exp(-lam) * (1.0 + lam + lam * lam / 2.0)


class TestMcSummary:
    def test_exact_on_known_values(self):
        s = mc_summary([1.0, 2.0, 3.0, 4.0], [0.5])
        assert s.mean == 2.5
        assert s.sd == pytest.approx(math.sqrt(5 / 3))
        assert s.quantiles[0.5] == 2.5
        assert s.n_draws == 4

    def test_gamma_111_30_interval_near_exact(self):
        d = Gamma(111, 30)
        x = sample(d, RngStream(30), 100_000)
        s = mc_summary(x, [0.05, 0.95])
        assert s.quantiles[0.05] == pytest.approx(quantile(d, 0.05), abs=0.02)
        assert s.quantiles[0.95] == pytest.approx(quantile(d, 0.95), abs=0.02)

    def test_single_draw_sd_zero(self):
        s = mc_summary([7.0], [0.5])
        assert s.sd == 0.0 and s.mean == 7.0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            mc_summary([], [0.5])

    def test_bad_levels_rejected(self):
        with pytest.raises(ValueError):
            mc_summary([1.0, 2.0], [0.0])
        with pytest.raises(ValueError):
            mc_summary([1.0, 2.0], [1.5])


class TestMcExpectation:
    def test_identity_recovers_mean(self):
        x = [1.0, 2.0, 3.0]
        assert mc_expectation_of(lambda v: v, x) == 2.0

    def test_at_most_two_visits_reference(self):
        x = sample(Gamma(111, 30), RngStream(31), 10**6)
        assert mc_expectation_of(h_at_most_two, x) == pytest.approx(
            0.293, abs=0.003)

    def test_matches_quadrature_oracle(self):
        # deterministic check of the same functional by numeric integration
        from posteriorlab.distributions import log_density
        d = Gamma(111, 30)
        lam = np.linspace(1e-6, 15, 400001)
        dens = np.exp([log_density(d, v) for v in lam])
        exact = float(np.trapezoid([h_at_most_two(v) for v in lam] * dens, lam))
        x = sample(d, RngStream(32), 10**6)
        assert mc_expectation_of(h_at_most_two, x) == pytest.approx(
            exact, abs=0.002)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            mc_expectation_of(lambda v: v, [])


class TestPpcMeanCheck:
    def test_consistent_data_has_large_tail_area(self):
        # observed mean 3.1 is well inside its own posterior predictive
        # (the predictive centers near 3.7, so the area is moderate, not tiny)
        r = ppc_mean_check(Gamma(111, 30), n=10, reps=2000,
                           observed_mean=3.1, rng=RngStream(33))
        assert r.tail_area > 0.10

    def test_inconsistent_data_has_small_tail_area(self):
        r = ppc_mean_check(Gamma(111, 30), n=10, reps=2000,
                           observed_mean=9.0, rng=RngStream(34))
        assert r.tail_area < 0.01

    def test_tail_area_bounds(self):
        r = ppc_mean_check(Gamma(111, 30), n=10, reps=500,
                           observed_mean=3.7, rng=RngStream(35))
        assert 0.0 <= r.tail_area <= 1.0

    def test_replicated_stats_shape_and_spread(self):
        r = ppc_mean_check(Gamma(111, 30), n=10, reps=3000,
                           observed_mean=3.1, rng=RngStream(36))
        assert r.replicated_stats.shape == (3000,)
        # predictive spread exceeds the posterior spread of the rate alone
        assert r.replicated_stats.std() > math.sqrt(111) / 30

    def test_determinism(self):
        a = ppc_mean_check(Gamma(111, 30), 10, 200, 3.1, RngStream(37))
        b = ppc_mean_check(Gamma(111, 30), 10, 200, 3.1, RngStream(37))
        assert np.array_equal(a.replicated_stats, b.replicated_stats)
        assert a.tail_area == b.tail_area

    def test_json_keys(self):
        r = ppc_mean_check(Gamma(111, 30), 10, 50, 3.1, RngStream(38))
        obj = r.to_json()
        assert set(obj) == {"replicated", "observed", "tail_area"}
        assert len(obj["replicated"]) == 50

    def test_validation(self):
        with pytest.raises(ValueError):
            ppc_mean_check(Gamma(111, 30), 0, 10, 3.1, RngStream(0))
        with pytest.raises(ValueError):
            ppc_mean_check(Gamma(111, 30), 10, 0, 3.1, RngStream(0))
