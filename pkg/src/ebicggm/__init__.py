"""Extended BIC graph selection for sparse Gaussian graphical models."""

from .chordal import (
    CliqueDecomposition,
    chain_edges,
    clique_decomposition,
    double_chain_edges,
    enumerate_decomposable,
    is_chordal,
)
from .core import EdgeSet, PrecisionMatrix, SampleCov, log_likelihood, sample_covariance
from .glasso import PenaltyPath, glasso_fit, glasso_path, rho_max
from .mle import max_loglik, mle_fit, mle_fit_decomposable
from .models import TrueModelSpec, build_chain_theta, build_double_chain_theta, model_stats, sample_mvn
from .selection import ScoredModel, ebic_score, gamma0, kfold_cv_select, nodewise_predictive_sse, select_min

__all__ = [
    "CliqueDecomposition", "EdgeSet", "PenaltyPath", "PrecisionMatrix", "SampleCov", "ScoredModel",
    "TrueModelSpec", "build_chain_theta", "build_double_chain_theta", "chain_edges",
    "clique_decomposition", "double_chain_edges", "ebic_score", "enumerate_decomposable", "gamma0",
    "glasso_fit", "glasso_path", "is_chordal", "kfold_cv_select", "log_likelihood", "max_loglik",
    "mle_fit", "mle_fit_decomposable", "model_stats", "nodewise_predictive_sse", "rho_max",
    "sample_covariance", "sample_mvn", "select_min",
]
