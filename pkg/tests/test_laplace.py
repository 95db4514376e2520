import math

import numpy as np
import pytest

from posteriorlab.distributions import RngStream, mvn_sample
from posteriorlab.exceptions import (
    OptimizationError, SaddlePointError, StencilError,
)
from posteriorlab.laplace import (
    LogPosterior, TwoGroupData, find_mode, grid_marginal, hessian_fd,
    laplace_fit, marginal, transform_draws, two_group_log_posterior,
    two_group_logistic_logpost,
)

# visits-by-group example: 8/30 in one group, 15/30 in the other
GROUPS = TwoGroupData(y_m=8, n_m=30, y_w=15, n_w=30)


def quadratic_lp(mu, cov_inv):
    mu = np.asarray(mu, dtype=float)
    A = np.asarray(cov_inv, dtype=float)
    return LogPosterior(dim=mu.size,
                        eval=lambda x: float(-0.5 * (x - mu) @ A @ (x - mu)))


class TestTwoGroupLogPosterior:
    def test_reference_value_at_origin(self):
        assert two_group_logistic_logpost(GROUPS, [0.0, 0.0]) == pytest.approx(
            -47.5645, abs=5e-4)

    def test_matches_direct_binomial_oracle(self):
        # recompute with explicit logistic probabilities and density calls
        from posteriorlab.distributions import Cauchy, Normal, log_density
        b0, b1 = -0.3, 0.7
        p_m = 1 / (1 + math.exp(-b0))
        p_w = 1 / (1 + math.exp(-(b0 + b1)))
        direct = (8 * math.log(p_m) + 22 * math.log(1 - p_m)
                  + 15 * math.log(p_w) + 15 * math.log(1 - p_w)
                  + log_density(Cauchy(0, 0.5), b1)
                  + log_density(Normal(0, 100), b0))
        assert two_group_logistic_logpost(GROUPS, [b0, b1]) == pytest.approx(
            direct, abs=1e-10)

    def test_finite_at_extreme_arguments(self):
        for b in ([50.0, 50.0], [-50.0, -50.0], [300.0, -600.0]):
            assert math.isfinite(two_group_logistic_logpost(GROUPS, b))

    def test_wrapper_callable(self):
        lp = two_group_log_posterior(GROUPS)
        assert lp.dim == 2
        assert lp([0, 0]) == pytest.approx(-47.5645, abs=5e-4)


class TestFindMode:
    def test_quadratic_mode_exact(self):
        lp = quadratic_lp([1.5, -2.0], [[2.0, 0.3], [0.3, 1.0]])
        x = find_mode(lp, [0, 0])
        assert np.allclose(x, [1.5, -2.0], atol=1e-6)

    def test_two_group_mode(self):
        x = find_mode(two_group_log_posterior(GROUPS), [0, 0])
        assert x[0] == pytest.approx(-0.696, abs=5e-4)
        assert x[1] == pytest.approx(0.431, abs=5e-4)

    def test_one_dim(self):
        lp = LogPosterior(dim=1, eval=lambda x: -((x[0] - 3.0) ** 4))
        x = find_mode(lp, [10.0])
        assert x[0] == pytest.approx(3.0, abs=1e-2)

    def test_init_off_support_rejected(self):
        lp = LogPosterior(
            dim=1, eval=lambda x: math.log(x[0]) - x[0] if x[0] > 0 else -math.inf)
        with pytest.raises(ValueError):
            find_mode(lp, [-1.0])

    @pytest.mark.filterwarnings("ignore::RuntimeWarning")
    def test_unbounded_posterior_raises_with_best_point(self):
        # monotone increasing: no mode exists
        lp = LogPosterior(dim=1, eval=lambda x: float(x[0]))
        with pytest.raises(OptimizationError) as exc:
            find_mode(lp, [0.0])
        assert exc.value.best is not None


class TestHessianFd:
    def test_quadratic_hessian_recovered(self):
        A = np.array([[2.0, 0.3], [0.3, 1.0]])
        lp = quadratic_lp([0.0, 0.0], A)
        H = hessian_fd(lp, [0.4, -0.2])
        assert np.allclose(H, -A, atol=1e-5)

    def test_symmetry(self):
        H = hessian_fd(two_group_log_posterior(GROUPS), [0.1, 0.2])
        assert np.array_equal(H, H.T)

    def test_stencil_error_near_support_edge(self):
        lp = LogPosterior(
            dim=1, eval=lambda x: math.log(x[0]) if x[0] > 0 else -math.inf)
        with pytest.raises(StencilError):
            hessian_fd(lp, [1e-6])


class TestLaplaceFit:
    def test_quadratic_is_exact(self):
        cov = np.array([[0.5, 0.2], [0.2, 0.4]])
        lp = quadratic_lp([1.0, 2.0], np.linalg.inv(cov))
        na = laplace_fit(lp, [0, 0])
        assert np.allclose(na.mode, [1.0, 2.0], atol=1e-6)
        assert np.allclose(na.cov, cov, atol=1e-4)

    def test_two_group_mode_and_covariance(self):
        na = laplace_fit(two_group_log_posterior(GROUPS), [0, 0])
        assert np.allclose(na.mode, [-0.696, 0.431], atol=5e-4)
        assert np.allclose(na.cov, [[0.137, -0.126], [-0.126, 0.239]], atol=1e-3)

    def test_flat_direction_detected(self):
        # curvature vanishes along the second coordinate, so the negated
        # Hessian has a zero eigenvalue and no covariance exists
        lp = LogPosterior(dim=2, eval=lambda x: float(-x[0] ** 2))
        with pytest.raises(SaddlePointError) as exc:
            laplace_fit(lp, [0.05, 0.01])
        assert len(exc.value.eigenvalues) == 2

    def test_json_shape(self):
        na = laplace_fit(two_group_log_posterior(GROUPS), [0, 0])
        obj = na.to_json()
        assert set(obj) == {"mode", "cov"}
        assert len(obj["mode"]) == 2 and len(obj["cov"]) == 2


class TestMarginal:
    def test_slope_sd(self):
        na = laplace_fit(two_group_log_posterior(GROUPS), [0, 0])
        m = marginal(na, [0.0, 1.0])
        assert m.mean == pytest.approx(0.431, abs=5e-4)
        assert m.sd == pytest.approx(0.489, abs=5e-4)

    def test_sum_combination(self):
        na = laplace_fit(two_group_log_posterior(GROUPS), [0, 0])
        m = marginal(na, [1.0, 1.0])
        var = na.cov[0, 0] + 2 * na.cov[0, 1] + na.cov[1, 1]
        assert m.sd == pytest.approx(math.sqrt(var), abs=1e-10)

    def test_zero_coef_degenerate(self):
        na = laplace_fit(two_group_log_posterior(GROUPS), [0, 0])
        with pytest.raises(ValueError):
            marginal(na, [0.0, 0.0])

    def test_wrong_length(self):
        na = laplace_fit(two_group_log_posterior(GROUPS), [0, 0])
        with pytest.raises(ValueError):
            marginal(na, [1.0])


class TestGridMarginal:
    def test_normalizes(self):
        g = grid_marginal(two_group_log_posterior(GROUPS),
                          [(-3, 2), (-2, 3)], 100, coord=1)
        assert g.probs.sum() == pytest.approx(1.0, abs=1e-12)

    def test_mode_near_normal_approx(self):
        g = grid_marginal(two_group_log_posterior(GROUPS),
                          [(-3, 2), (-2, 3)], 201, coord=1)
        assert g.grid[np.argmax(g.probs)] == pytest.approx(0.431, abs=0.03)

    def test_right_skew_of_slope_marginal(self):
        # the Cauchy slope prior leaves a heavier right tail than the
        # symmetric normal approximation
        g = grid_marginal(two_group_log_posterior(GROUPS),
                          [(-4, 3), (-3, 5)], 301, coord=1)
        mean = float(g.probs @ g.grid)
        third = float(g.probs @ (g.grid - mean) ** 3)
        assert third > 0

    def test_quadratic_marginal_matches_exact_normal(self):
        cov = np.array([[0.5, 0.2], [0.2, 0.4]])
        lp = quadratic_lp([1.0, 2.0], np.linalg.inv(cov))
        g = grid_marginal(lp, [(-2, 4), (-1, 5)], 401, coord=0)
        mean = float(g.probs @ g.grid)
        sd = math.sqrt(float(g.probs @ (g.grid - mean) ** 2))
        assert mean == pytest.approx(1.0, abs=1e-3)
        assert sd == pytest.approx(math.sqrt(0.5), abs=1e-3)

    def test_dim_and_steps_validation(self):
        with pytest.raises(ValueError):
            grid_marginal(LogPosterior(dim=1, eval=lambda x: 0.0),
                          [(-1, 1)], 100, 0)
        with pytest.raises(ValueError):
            grid_marginal(two_group_log_posterior(GROUPS),
                          [(-1, 1), (-1, 1)], 10, 0)


class TestTransformDraws:
    def test_probability_transform_mc(self):
        # P(second-group success prob < 0.1) under the normal approximation
        na = laplace_fit(two_group_log_posterior(GROUPS), [0, 0])
        draws = mvn_sample(na.mode, na.cov, RngStream(17), 10**5)
        p_w = transform_draws(draws, lambda b: 1 / (1 + math.exp(-(b[0] + b[1]))))
        assert np.all((p_w > 0) & (p_w < 1))
        assert p_w.mean() == pytest.approx(0.44, abs=0.02)

    def test_identity_component(self):
        draws = np.array([[1.0, 2.0], [3.0, 4.0]])
        got = transform_draws(draws, lambda b: b[1])
        assert np.array_equal(got, [2.0, 4.0])

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            transform_draws(np.empty((0, 2)), lambda b: b[0])
