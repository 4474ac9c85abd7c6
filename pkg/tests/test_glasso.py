import cvxpy as cp
import numpy as np
import pytest

from conftest import random_spd
from ebicggm.chordal import chain_edges
from ebicggm.core import SampleCov, sample_covariance
from ebicggm.errors import InputError
from ebicggm.glasso import (
    PenaltyPath,
    glasso_fit,
    glasso_path,
    kkt_residual,
    primal_objective,
    rho_max,
)
from ebicggm.models import build_chain_theta, sample_mvn


def convex_oracle(S, rho):
    """Generic conic solver on the same objective."""
    p = S.shape[0]
    X = cp.Variable((p, p), PSD=True)
    off = cp.sum(cp.abs(cp.multiply(1.0 - np.eye(p), X)))
    prob = cp.Problem(cp.Minimize(-cp.log_det(X) + cp.trace(S @ X) + rho * off))
    prob.solve(solver=cp.CLARABEL, tol_gap_abs=1e-11, tol_gap_rel=1e-11, tol_feas=1e-11)
    return X.value


def _cov(m, n=50):
    return SampleCov(np.asarray(m, float), n)


class TestRhoMax:
    def test_two_by_two(self):
        assert rho_max(_cov([[1, .3], [.3, 1]])) == pytest.approx(0.3)

    def test_diagonal(self):
        assert rho_max(_cov(np.diag([1.0, 2.0, 3.0]))) == 0.0

    def test_three_by_three(self):
        S = _cov([[1, .1, -.4], [.1, 1, .2], [-.4, .2, 1]])
        assert rho_max(S) == pytest.approx(0.4)

    def test_p1(self):
        with pytest.raises(InputError):
            rho_max(_cov([[1.0]]))

    def test_is_smallest_empty_penalty(self, rng):
        S = _cov(random_spd(5, rng))
        top = rho_max(S)
        assert len(glasso_fit(S, top).support) == 0
        assert len(glasso_fit(S, 0.99 * top).support) > 0


class TestGlassoFit:
    def test_two_by_two_example(self):
        est = glasso_fit(_cov([[1, .5], [.5, 1]]), 0.2)
        expected = np.array([[1, -.3], [-.3, 1]]) / 0.91
        np.testing.assert_allclose(est.matrix, expected, atol=1e-6)
        np.testing.assert_allclose(np.linalg.inv(est.matrix), [[1, .3], [.3, 1]], atol=1e-6)
        np.testing.assert_allclose(convex_oracle(np.array([[1, .5], [.5, 1]]), 0.2), expected, atol=1e-5)

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_convex_oracle(self, seed):
        rng = np.random.default_rng(seed)
        S = random_spd(6, rng, cond=5.0)
        rho = 0.3 * rho_max(_cov(S))
        est = glasso_fit(_cov(S), rho)
        np.testing.assert_allclose(est.matrix, convex_oracle(S, rho), atol=1e-4)

    def test_above_rho_max_is_diagonal(self, rng):
        S = _cov(random_spd(5, rng))
        est = glasso_fit(S, 1.5 * rho_max(S))
        np.testing.assert_allclose(est.matrix, np.diag(1 / np.diag(S.matrix)), atol=1e-12)
        assert kkt_residual(S, est, 1.5 * rho_max(S)) <= 1e-12

    def test_zero_penalty(self, rng):
        S = _cov(random_spd(6, rng))
        np.testing.assert_allclose(glasso_fit(S, 0.0).matrix, np.linalg.inv(S.matrix), atol=1e-8)

    def test_negative_penalty(self):
        with pytest.raises(InputError):
            glasso_fit(_cov(np.eye(2)), -0.1)

    def test_debug_monotone(self, rng):
        x = rng.standard_normal((30, 12))
        S = sample_covariance(x)
        glasso_fit(S, 0.1 * rho_max(S), debug=True)

    def test_dual_feasibility(self, rng):
        for _ in range(10):
            S = sample_covariance(rng.standard_normal((40, 8)))
            rho = rng.uniform(0.05, 1.0) * rho_max(S)
            est = glasso_fit(S, rho)
            W = np.linalg.inv(est.matrix)
            off = ~np.eye(8, dtype=bool)
            assert np.abs(S.matrix - W)[off].max() <= rho + 1e-6

    def test_high_dimensional(self, rng):
        S = sample_covariance(rng.standard_normal((15, 25)))
        rho = 0.2 * rho_max(S)
        assert kkt_residual(S, glasso_fit(S, rho), rho) <= 1e-6


class TestPath:
    def test_ratio(self, rng):
        S = sample_covariance(rng.standard_normal((50, 6)))
        path = glasso_path(S)
        ratios = np.array(path.penalties[1:]) / np.array(path.penalties[:-1])
        np.testing.assert_allclose(ratios, 100 ** (-1 / 99), rtol=1e-12)
        assert path.penalties[0] == pytest.approx(rho_max(S))
        assert path.penalties[-1] == pytest.approx(rho_max(S) / 100)
        assert len(path.models[0]) == 0

    def test_kkt_and_objective(self, rng):
        S = sample_covariance(rng.standard_normal((60, 10)))
        path = glasso_path(S, count=30)
        diag_est = np.diag(1 / np.diag(S.matrix))
        for rho, est in zip(path.penalties, path.estimates):
            assert kkt_residual(S, est, rho) <= 1e-6
            assert primal_objective(S, est, rho) <= primal_objective(S, diag_est, rho) + 1e-10

    def test_contains_true_chain(self):
        spec = build_chain_theta(10)
        S = sample_covariance(sample_mvn(spec.theta0, 2000, 21))
        path = glasso_path(S)
        assert chain_edges(10) in path.models

    def test_diagonal_input(self):
        with pytest.raises(InputError):
            glasso_path(_cov(np.eye(3)))

    def test_count_too_small(self, rng):
        with pytest.raises(InputError):
            glasso_path(sample_covariance(rng.standard_normal((10, 3))), count=1)

    def test_unique_models_keeps_first(self, rng):
        S = sample_covariance(rng.standard_normal((50, 5)))
        path = glasso_path(S, count=20)
        uniq = path.unique_models()
        assert len({E.edges for E in uniq}) == len(uniq)
        assert uniq[0] == path.models[0]

    def test_requires_decreasing(self):
        with pytest.raises(InputError):
            PenaltyPath([1.0, 1.0], [], [])
