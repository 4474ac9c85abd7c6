"""Benchmark precision matrices, their summary scalars, and a Gaussian sampler."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .chordal import chain_edges, double_chain_edges
from .core import EdgeSet, PrecisionMatrix, cholesky
from .errors import InputError

CHAIN_OFFDIAG = 0.3
DOUBLE_CHAIN_BANDS = (0.2, 0.1)


@dataclass(frozen=True)
class ModelStats:
    min_signal: float
    max_variance: float
    max_eigenvalue: float
    empty: bool = False


@dataclass(frozen=True, eq=False)
class TrueModelSpec:
    theta0: PrecisionMatrix
    edge_set: EdgeSet
    min_signal: float
    max_variance: float
    max_eigenvalue: float

    @property
    def p(self) -> int:
        return self.edge_set.p

    def covariance(self) -> np.ndarray:
        return np.linalg.inv(self.theta0.matrix)

    def condition_number(self) -> float:
        w = np.linalg.eigvalsh(self.theta0.matrix)
        return float(w[-1] / w[0])


def model_stats(theta0, E0: EdgeSet) -> ModelStats:
    """Minimum edge signal, maximum marginal variance, maximum eigenvalue.

    With no edges the minimum signal is reported as ``inf`` and ``empty``
    is set.
    """
    t = theta0.matrix if isinstance(theta0, PrecisionMatrix) else np.asarray(theta0, float)
    chol = cholesky(t)
    inv_chol = solve_triangular(chol, np.eye(t.shape[0]), lower=True)
    variances = np.sum(inv_chol ** 2, axis=0)
    lam_max = float(np.linalg.eigvalsh(t)[-1])
    if len(E0) == 0:
        return ModelStats(math.inf, float(variances.max()), lam_max, empty=True)
    signal = min(abs(t[j, k]) for j, k in E0.edges)
    return ModelStats(float(signal), float(variances.max()), lam_max)


def _spec_from_matrix(matrix: np.ndarray, E0: EdgeSet) -> TrueModelSpec:
    theta = PrecisionMatrix(matrix, E0)
    stats = model_stats(theta, E0)
    return TrueModelSpec(theta, E0, stats.min_signal, stats.max_variance, stats.max_eigenvalue)


def build_chain_theta(p: int) -> TrueModelSpec:
    E0 = chain_edges(p)
    m = np.eye(p)
    for j, k in E0.edges:
        m[j, k] = m[k, j] = CHAIN_OFFDIAG
    return _spec_from_matrix(m, E0)


def build_double_chain_theta(p: int) -> TrueModelSpec:
    E0 = double_chain_edges(p)
    near, far = DOUBLE_CHAIN_BANDS
    m = np.eye(p)
    for j, k in E0.edges:
        m[j, k] = m[k, j] = near if k - j == 1 else far
    return _spec_from_matrix(m, E0)


def build_theta(family: str, p: int) -> TrueModelSpec:
    if family == "chain":
        return build_chain_theta(p)
    if family == "double_chain":
        return build_double_chain_theta(p)
    raise InputError(f"unknown family {family!r}")


def sample_mvn(theta0, n: int, seed) -> np.ndarray:
    """Draw ``n`` rows from N(0, Θ0⁻¹).

    Uses the Cholesky factor ``Θ0 = L Lᵀ`` and solves ``Lᵀ x = ε`` for
    standard normal ``ε``, so Θ0 is never inverted.
    """
    t = theta0.matrix if isinstance(theta0, PrecisionMatrix) else np.asarray(theta0, float)
    if n < 0:
        raise InputError("n must be non-negative")
    chol = cholesky(t)
    rng = np.random.default_rng(seed)
    eps = rng.standard_normal((t.shape[0], n))
    return solve_triangular(chol.T, eps, lower=False).T
