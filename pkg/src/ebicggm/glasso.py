"""Graphical lasso by block coordinate descent, and the penalty path.

The penalty is on off-diagonal entries only and is measured on the
per-sample scale::

    minimize  -log det Θ + tr(SΘ) + ρ Σ_{j≠k} |Θ_jk|

so that ``rho_max(S) = max_{j≠k} |S_jk|`` is exactly the smallest penalty
giving the empty graph.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from numba import njit

from .core import EdgeSet, PrecisionMatrix, SampleCov, logdet_pd
from .errors import ConvergenceError, InputError, NotPositiveDefiniteError

log = logging.getLogger(__name__)

SWEEP_TOL = 1e-7
MAX_SWEEPS = 10_000
KKT_TOL = 1e-6
TOL_SUPPORT = 1e-8


@njit(cache=True)
def _sweep(S, rho, W, B, inner_tol, inner_max):
    """One pass over all columns; returns the summed absolute change of W.

    ``B[:, j]`` holds the lasso coefficients of column ``j`` (``B[j, j]`` unused).
    """
    p = S.shape[0]
    wb = np.empty(p)
    total = 0.0
    for j in range(p):
        for m in range(p):
            acc = 0.0
            if m != j:
                for l in range(p):
                    if l != j and B[l, j] != 0.0:
                        acc += W[m, l] * B[l, j]
            wb[m] = acc
        for _ in range(inner_max):
            delta_max = 0.0
            for k in range(p):
                if k == j:
                    continue
                old = B[k, j]
                r = S[k, j] - (wb[k] - W[k, k] * old)
                if r > rho:
                    new = (r - rho) / W[k, k]
                elif r < -rho:
                    new = (r + rho) / W[k, k]
                else:
                    new = 0.0
                d = new - old
                if d != 0.0:
                    B[k, j] = new
                    for m in range(p):
                        if m != j:
                            wb[m] += W[m, k] * d
                    ad = abs(d) * W[k, k]
                    if ad > delta_max:
                        delta_max = ad
            if delta_max < inner_tol:
                break
        for k in range(p):
            if k != j:
                total += abs(W[k, j] - wb[k])
                W[k, j] = wb[k]
                W[j, k] = wb[k]
    return total


def _theta_from_columns(W, B):
    p = W.shape[0]
    theta = np.zeros((p, p))
    for j in range(p):
        idx = np.arange(p) != j
        b = B[idx, j]
        denom = W[j, j] - W[idx, j] @ b
        if denom <= 0:
            raise NotPositiveDefiniteError("not positive definite: glasso column update failed")
        theta[j, j] = 1.0 / denom
        theta[idx, j] = -b * theta[j, j]
    return 0.5 * (theta + theta.T)


def rho_max(S: SampleCov) -> float:
    """Smallest penalty whose solution has no edges: ``max_{j≠k} |S_jk|``."""
    m = S.matrix
    if m.shape[0] < 2:
        raise InputError("rho_max needs p >= 2")
    off = np.abs(m - np.diag(np.diag(m)))
    return float(off.max())


def kkt_residual(S: SampleCov, theta, rho: float) -> float:
    """Largest violation of the subgradient optimality conditions at Θ."""
    t = theta.matrix if isinstance(theta, PrecisionMatrix) else np.asarray(theta, float)
    W = np.linalg.inv(t)
    R = W - S.matrix
    nz = t != 0.0
    off = ~np.eye(t.shape[0], dtype=bool)
    viol = np.where(nz, np.abs(R - rho * np.sign(t)), np.maximum(np.abs(R) - rho, 0.0))
    return float(max(viol[off].max(initial=0.0), np.abs(np.diag(R)).max()))


def dual_objective(W) -> float:
    return -logdet_pd(W)


def primal_objective(S: SampleCov, theta, rho: float) -> float:
    t = theta.matrix if isinstance(theta, PrecisionMatrix) else np.asarray(theta, float)
    off = np.abs(t).sum() - np.abs(np.diag(t)).sum()
    return -logdet_pd(t) + float(np.sum(S.matrix * t)) + rho * off


@dataclass
class GlassoState:
    """Warm-start state carried between fits on the same ``S``."""

    W: np.ndarray
    B: np.ndarray


def glasso_fit(
    S: SampleCov,
    rho: float,
    *,
    warm: GlassoState | None = None,
    tol: float = SWEEP_TOL,
    max_sweeps: int = MAX_SWEEPS,
    kkt_tol: float = KKT_TOL,
    tol_support: float = TOL_SUPPORT,
    debug: bool = False,
    return_state: bool = False,
):
    """Penalized precision estimate at penalty ``rho``.

    Sweeps until the mean absolute change of W falls below
    ``tol * mean|S_offdiag|``; if the KKT residual of the thresholded
    estimate still exceeds ``kkt_tol`` the tolerance is tightened and
    sweeping resumes from the current iterate.
    """
    if rho < 0:
        raise InputError("penalty must be non-negative")
    Sm = np.ascontiguousarray(S.matrix, dtype=float)
    p = Sm.shape[0]
    diag = np.diag(Sm)
    if np.any(diag <= 0):
        raise InputError("sample covariance needs a strictly positive diagonal")

    if rho == 0.0:
        try:
            theta = np.linalg.inv(np.linalg.cholesky(Sm))
        except np.linalg.LinAlgError:
            raise NotPositiveDefiniteError("not positive definite: rho = 0 requires PD S") from None
        theta = theta.T @ theta
        est = PrecisionMatrix.from_matrix(theta, 0.0)
        state = GlassoState(np.array(Sm), np.zeros((p, p)))
        return (est, state) if return_state else est

    if warm is None:
        W = np.diag(diag).astype(float)
        B = np.zeros((p, p))
    else:
        W = warm.W.copy()
        B = warm.B.copy()
        np.fill_diagonal(W, diag)

    off_mean = (np.abs(Sm).sum() - diag.sum()) / max(p * (p - 1), 1)
    scale = off_mean if off_mean > 0 else 1.0
    threshold = tol * scale
    n_off = max(p * (p - 1), 1)
    inner_tol = min(threshold, 1e-10)
    inner_max = 10_000

    sweeps = 0
    residual = np.inf
    prev_dual = dual_objective(W) if debug else None
    while sweeps < max_sweeps:
        change = _sweep(Sm, float(rho), W, B, inner_tol, inner_max) / n_off
        sweeps += 1
        if debug:
            cur = dual_objective(W)
            # the diagonal start is outside the dual box, so only sweeps after the first are monotone
            if sweeps > 1 and cur > prev_dual + 1e-10 * max(1.0, abs(prev_dual)):
                raise AssertionError(f"sweep {sweeps} increased the objective: {prev_dual} -> {cur}")
            prev_dual = cur
        if change < threshold:
            theta = _theta_from_columns(W, B)
            est = PrecisionMatrix.from_matrix(theta, tol_support)
            try:
                residual = kkt_residual(S, est, rho)
            except np.linalg.LinAlgError:
                residual = np.inf
            if residual <= kkt_tol:
                log.debug("glasso rho=%.4g converged in %d sweeps, kkt=%.2e", rho, sweeps, residual)
                state = GlassoState(W, B)
                return (est, state) if return_state else est
            threshold *= 0.01
            inner_tol = min(inner_tol, threshold)
    raise ConvergenceError(f"glasso did not converge at rho={rho:.6g} after {sweeps} sweeps", residual)


@dataclass(eq=False)
class PenaltyPath:
    penalties: list
    models: list
    estimates: list

    def __post_init__(self):
        if any(b >= a for a, b in zip(self.penalties, self.penalties[1:])):
            raise InputError("penalties must be strictly decreasing")

    def __len__(self) -> int:
        return len(self.penalties)

    def unique_models(self) -> list:
        """Distinct supports in path order (first occurrence kept)."""
        seen = set()
        out = []
        for E in self.models:
            if E.edges not in seen:
                seen.add(E.edges)
                out.append(E)
        return out


def penalty_grid(top: float, count: int = 100, ratio: float = 100.0) -> np.ndarray:
    if count < 2:
        raise InputError("path needs at least 2 penalties")
    return np.geomspace(top, top / ratio, count)


def glasso_path(S: SampleCov, count: int = 100, **fit_kwargs) -> PenaltyPath:
    """Fit ``count`` log-spaced penalties from ``rho_max`` down to ``rho_max/100``.

    Each fit warm-starts from the previous (larger) penalty.
    """
    top = rho_max(S)
    if top <= 0:
        raise InputError("sample covariance is diagonal; the penalty path is degenerate")
    penalties = penalty_grid(top, count)
    models, estimates = [], []
    state = None
    for rho in penalties:
        try:
            est, state = glasso_fit(S, float(rho), warm=state, return_state=True, **fit_kwargs)
        except ConvergenceError as exc:
            raise ConvergenceError(f"path failed at rho={rho:.6g}: {exc}", exc.residual) from exc
        estimates.append(est)
        models.append(est.support)
    return PenaltyPath([float(r) for r in penalties], models, estimates)
