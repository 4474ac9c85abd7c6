import math

import numpy as np
import pytest

from conftest import random_spd
from ebicggm.chordal import chain_edges, double_chain_edges
from ebicggm.core import EdgeSet, sample_covariance
from ebicggm.errors import InputError
from ebicggm.models import (
    build_chain_theta,
    build_double_chain_theta,
    build_theta,
    model_stats,
    sample_mvn,
)


class TestChain:
    def test_p3_matrix(self):
        spec = build_chain_theta(3)
        np.testing.assert_array_equal(spec.theta0.matrix, [[1, .3, 0], [.3, 1, .3], [0, .3, 1]])

    @pytest.mark.parametrize("p", [2, 5, 17])
    def test_min_signal(self, p):
        assert build_chain_theta(p).min_signal == pytest.approx(0.3)

    def test_lambda_max_closed_form(self):
        spec = build_chain_theta(10)
        assert spec.max_eigenvalue == pytest.approx(1 + 0.6 * math.cos(math.pi / 11), abs=1e-12)
        assert spec.max_eigenvalue == pytest.approx(1.5756957841687, abs=1e-12)

    def test_support(self):
        assert build_chain_theta(8).theta0.support == chain_edges(8)


class TestDoubleChain:
    def test_p4_bands(self):
        m = build_double_chain_theta(4).theta0.matrix
        expected = np.array([[1, .2, .1, 0], [.2, 1, .2, .1], [.1, .2, 1, .2], [0, .1, .2, 1]])
        np.testing.assert_array_equal(m, expected)

    def test_min_signal(self):
        assert build_double_chain_theta(7).min_signal == pytest.approx(0.1)

    def test_scalars_bounded_in_p(self):
        small, large = build_double_chain_theta(10), build_double_chain_theta(100)
        # dense-eigensolver values: sigma2max 1.09057 / 1.09059, lambda_max 1.5555 / 1.5994
        for a, b in [(small.max_variance, large.max_variance), (small.max_eigenvalue, large.max_eigenvalue)]:
            assert abs(a - b) / max(a, b) < 0.05

    def test_support(self):
        assert build_double_chain_theta(9).theta0.support == double_chain_edges(9)


class TestModelStats:
    def test_identity_empty(self):
        st = model_stats(np.eye(4), EdgeSet(4))
        assert st.empty and st.min_signal == math.inf
        assert st.max_variance == pytest.approx(1.0)
        assert st.max_eigenvalue == pytest.approx(1.0)

    def test_variance_matches_inverse(self, rng):
        theta = random_spd(6, rng)
        st = model_stats(theta, EdgeSet.complete(6))
        assert st.max_variance == pytest.approx(np.diag(np.linalg.inv(theta)).max(), rel=1e-12)

    @pytest.mark.parametrize("family", ["chain", "double_chain"])
    def test_condition_product(self, family):
        for p in range(3, 51):
            spec = build_theta(family, p)
            assert spec.max_variance * spec.max_eigenvalue <= spec.condition_number() + 1e-9

    def test_unknown_family(self):
        with pytest.raises(InputError):
            build_theta("star", 5)


class TestSampler:
    def test_deterministic(self):
        t = build_chain_theta(5).theta0
        np.testing.assert_array_equal(sample_mvn(t, 20, 7), sample_mvn(t, 20, 7))

    def test_single_row(self):
        x = sample_mvn(build_chain_theta(5).theta0, 1, 0)
        assert x.shape == (1, 5) and np.all(np.isfinite(x))

    def test_covariance_converges(self):
        spec = build_chain_theta(5)
        S = sample_covariance(sample_mvn(spec.theta0, 100_000, 3))
        assert np.abs(S.matrix - np.linalg.inv(spec.theta0.matrix)).max() < 0.05

    def test_column_means(self):
        x = sample_mvn(build_double_chain_theta(6).theta0, 10_000, 11)
        assert np.all(np.abs(x.mean(axis=0)) < 5 / math.sqrt(10_000))
