"""Extended BIC scoring, model choice, and the cross-validation baseline."""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .core import EdgeSet, PrecisionMatrix, SampleCov, log_likelihood, sample_covariance
from .errors import InputError, NumericalError
from .chordal import clique_decomposition, is_chordal
from .mle import mle_fit, mle_fit_columnwise, mle_fit_decomposable

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ScoredModel:
    edge_set: EdgeSet
    loglik: float
    ebic: float
    gamma: float

    @property
    def num_edges(self) -> int:
        return len(self.edge_set)


def ebic_score(loglik: float, num_edges: int, n: int, p: int, gamma: float) -> float:
    """``-2 loglik + |E| log n + 4 |E| γ log p`` with natural logarithms.

    ``gamma = 0`` gives the classical BIC.
    """
    if n < 1 or p < 1:
        raise InputError("n and p must be positive")
    if not 0.0 <= gamma <= 1.0:
        warnings.warn(f"gamma={gamma} outside [0, 1]", stacklevel=2)
    return -2.0 * loglik + num_edges * math.log(n) + 4.0 * num_edges * gamma * math.log(p)


def _tie_key(m: ScoredModel):
    return (m.ebic, m.num_edges, tuple(m.edge_set.sorted()))


def select_min(candidates) -> EdgeSet:
    """Minimum-EBIC edge set; ties go to fewer edges, then lexicographic order."""
    candidates = list(candidates)
    if not candidates:
        raise InputError("no candidates to select from")
    return min(candidates, key=_tie_key).edge_set


def gamma0(gamma: float, kappa: float) -> float:
    """Penalty surplus ``γ - (1 - 1/(4κ))``; positive values satisfy the consistency condition."""
    if kappa <= 0:
        raise InputError("kappa must be positive")
    return gamma - (1.0 - 1.0 / (4.0 * kappa))


def refit_loglik(S: SampleCov, candidates, *, skip_failures: bool = True) -> dict:
    """Maximised log-likelihood for each candidate, keyed by its edge frozenset.

    Candidates whose refit fails are left out when ``skip_failures`` is set.
    """
    out = {}
    for E in candidates:
        if E.edges in out:
            continue
        try:
            out[E.edges] = log_likelihood(S, mle_fit(S, E))
        except NumericalError as exc:
            if not skip_failures:
                raise
            log.warning("refit failed for a %d-edge model: %s", len(E), exc)
    return out


def score_models(S: SampleCov, candidates, gamma: float, logliks: dict | None = None) -> list:
    if logliks is None:
        logliks = refit_loglik(S, candidates)
    scored = []
    seen = set()
    for E in candidates:
        if E.edges in seen or E.edges not in logliks:
            continue
        seen.add(E.edges)
        ll = logliks[E.edges]
        scored.append(ScoredModel(E, ll, ebic_score(ll, len(E), S.n, S.p, gamma), gamma))
    return scored


def nodewise_predictive_sse(theta, test) -> float:
    """Sum of squared errors predicting each node from the others.

    The prediction of node ``j`` is its Gaussian conditional mean
    ``-(1/Θ_jj) Σ_{k≠j} Θ_jk x_k``, so the residual is ``(xΘ)_j / Θ_jj``.
    """
    t = theta.matrix if isinstance(theta, PrecisionMatrix) else np.asarray(theta, float)
    x = np.asarray(test, dtype=float)
    if x.size == 0:
        return 0.0
    resid = (x @ t) / np.diag(t)
    return float(np.sum(resid ** 2))


def fold_indices(n: int, K: int, seed) -> list:
    """Seeded shuffle cut into ``K`` contiguous blocks."""
    if not 1 <= K <= n:
        raise InputError(f"need 1 <= K <= n, got K={K}, n={n}")
    order = np.random.default_rng(seed).permutation(n)
    return np.array_split(order, K)


def cv_scores(data, candidates, K: int | None = None, seed=0) -> list:
    """Total held-out nodewise SSE per candidate; ``inf`` where a fold refit fails."""
    x = np.asarray(data, dtype=float)
    n = x.shape[0]
    K = min(100, n) if K is None else K
    if K < 2:
        raise InputError("cross-validation needs K >= 2")
    candidates = list(candidates)
    if not candidates:
        raise InputError("no candidates to select from")
    S_full = sample_covariance(x)
    warm = {}
    decomp = {}
    for E in candidates:
        decomp[E.edges] = clique_decomposition(E) if is_chordal(E)[0] else None
        try:
            warm[E.edges] = mle_fit(S_full, E)
        except NumericalError:
            warm[E.edges] = None
    totals = np.zeros(len(candidates))
    for test_idx in fold_indices(n, K, seed):
        train = np.delete(x, test_idx, axis=0)
        S_train = sample_covariance(train)
        test = x[test_idx]
        for i, E in enumerate(candidates):
            if not np.isfinite(totals[i]):
                continue
            try:
                D = decomp[E.edges]
                if D is not None:
                    fit = mle_fit_decomposable(S_train, D)
                else:
                    fit = mle_fit_columnwise(S_train, E, init=warm[E.edges])
            except NumericalError as exc:
                log.warning("candidate with %d edges excluded from CV: %s", len(E), exc)
                totals[i] = np.inf
                continue
            totals[i] += nodewise_predictive_sse(fit, test)
    return totals.tolist()


def kfold_cv_select(data, candidates, K: int | None = None, seed=0) -> EdgeSet:
    """Candidate with the smallest total K-fold predictive SSE.

    ``K`` defaults to ``min(100, n)``; ``K = n`` is leave-one-out.
    """
    candidates = list(candidates)
    scores = cv_scores(data, candidates, K, seed)
    if not np.isfinite(min(scores)):
        raise NumericalError("every candidate failed to fit on some fold")
    best = min(range(len(candidates)), key=lambda i: (scores[i], len(candidates[i]), candidates[i].sorted()))
    return candidates[best]
