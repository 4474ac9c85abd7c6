import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import random_spd
from ebicggm.core import EdgeSet, PrecisionMatrix, SampleCov, log_likelihood, sample_covariance
from ebicggm.errors import DegenerateInputError, InputError, NotPositiveDefiniteError


class TestEdgeSet:
    def test_normalises_pairs(self):
        E = EdgeSet.from_pairs(4, [(2, 1), (1, 2), (0, 3)])
        assert E.sorted() == [(0, 3), (1, 2)]
        assert (2, 1) in E

    def test_rejects_self_loop(self):
        with pytest.raises(InputError):
            EdgeSet.from_pairs(3, [(1, 1)])

    def test_rejects_out_of_range(self):
        with pytest.raises(InputError):
            EdgeSet.from_pairs(3, [(0, 3)])

    def test_from_matrix(self):
        m = np.array([[1, 0.2, 0], [0.2, 1, 1e-12], [0, 1e-12, 1]])
        assert EdgeSet.from_matrix(m, tol=1e-8).sorted() == [(0, 1)]

    def test_mask_includes_diagonal(self):
        m = EdgeSet.from_pairs(3, [(0, 2)]).mask()
        assert m.tolist() == [[True, False, True], [False, True, False], [True, False, True]]


class TestSampleCovariance:
    def test_identity_rows(self):
        S = sample_covariance([[1, 0], [0, 1]])
        np.testing.assert_array_equal(S.matrix, [[0.5, 0], [0, 0.5]])
        assert S.n == 2

    def test_zeros(self):
        S = sample_covariance(np.zeros((4, 3)))
        np.testing.assert_array_equal(S.matrix, np.zeros((3, 3)))

    def test_matches_triple_loop(self, rng):
        x = rng.standard_normal((5, 3))
        expected = np.zeros((3, 3))
        for j in range(3):
            for k in range(3):
                for i in range(5):
                    expected[j, k] += x[i, j] * x[i, k]
        expected /= 5
        np.testing.assert_allclose(sample_covariance(x).matrix, expected, rtol=0, atol=1e-12)

    @pytest.mark.parametrize("bad", [np.zeros((0, 3)), np.zeros((3, 0)), np.zeros(3)])
    def test_degenerate(self, bad):
        with pytest.raises(DegenerateInputError, match="degenerate input"):
            sample_covariance(bad)

    @settings(max_examples=50, deadline=None)
    @given(arrays(np.float64, st.tuples(st.integers(1, 8), st.integers(1, 5)),
                  elements=st.floats(-100, 100)))
    def test_psd(self, x):
        S = sample_covariance(x)
        assert np.linalg.eigvalsh(S.matrix).min() >= -1e-10 * max(1.0, np.abs(S.matrix).max())

    def test_rejects_asymmetric(self):
        with pytest.raises(InputError):
            SampleCov(np.array([[1.0, 0.1], [0.2, 1.0]]), 3)


class TestLogLikelihood:
    def test_identity(self):
        assert log_likelihood(SampleCov(np.eye(2), 10), np.eye(2)) == pytest.approx(-10.0, abs=1e-12)

    def test_diagonal(self):
        val = log_likelihood(SampleCov(np.eye(2), 4), np.diag([2.0, 0.5]))
        assert val == pytest.approx(-5.0, abs=1e-12)

    def test_eigen_oracle(self, rng):
        S = SampleCov(random_spd(4, rng), 7)
        theta = random_spd(4, rng)
        logdet = np.sum(np.log(np.linalg.eigvalsh(theta)))
        expected = 3.5 * (logdet - np.trace(S.matrix @ theta))
        assert log_likelihood(S, theta) == pytest.approx(expected, abs=1e-10)

    def test_not_pd(self):
        with pytest.raises(NotPositiveDefiniteError, match="not positive definite"):
            log_likelihood(SampleCov(np.eye(2), 3), np.array([[1.0, 2.0], [2.0, 1.0]]))

    def test_accepts_precision_matrix(self):
        theta = PrecisionMatrix.from_matrix(np.eye(3))
        assert log_likelihood(SampleCov(np.eye(3), 2), theta) == pytest.approx(-3.0)

    def test_maximised_at_inverse(self, rng):
        S = SampleCov(random_spd(5, rng), 20)
        best = np.linalg.inv(S.matrix)
        top = log_likelihood(S, best)
        for _ in range(100):
            D = rng.standard_normal((5, 5))
            D = 0.5 * (D + D.T)
            cand = best + 1e-2 * D
            if np.linalg.eigvalsh(cand).min() <= 0:
                continue
            assert log_likelihood(S, cand) <= top + 1e-12

    def test_concave_along_segments(self, rng):
        S = SampleCov(random_spd(4, rng), 9)
        for _ in range(50):
            a, b = random_spd(4, rng), random_spd(4, rng)
            mid = log_likelihood(S, 0.5 * (a + b))
            assert mid >= 0.5 * (log_likelihood(S, a) + log_likelihood(S, b)) - 1e-10


def test_precision_matrix_rejects_offsupport_entries():
    with pytest.raises(InputError):
        PrecisionMatrix(np.array([[1.0, 0.1], [0.1, 1.0]]), EdgeSet(2))
