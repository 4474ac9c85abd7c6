"""Monte Carlo validation of the tail bounds and distributional identities.

Each check yields :class:`CheckRow` entries; the ``bounds`` CLI prints
them as a table and the acceptance tests assert on ``passed``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .bounds import (
    AssumptionReport,
    NonAsymptoticParams,
    beta_product_lr_sample,
    check_nonasymptotic_assumptions,
    chisq_lower_tail_bound,
    chisq_upper_tail_bound,
    lemma1_threshold,
    lemma2_pair_sample,
    success_probability_bound,
)
from .chordal import chain_edges, edge_addition_constants
from .core import EdgeSet, sample_covariance
from .mle import max_loglik
from .models import build_chain_theta, sample_mvn

TAIL_GRID_N = (20, 100, 500)
TAIL_GRID_LAMBDA = (0.2, 0.5, 0.8)
LEMMA2_GRID = tuple((rho, n) for rho in (-0.9, 0.0, 0.5, 0.9) for n in (10, 100))
KS_ALPHA = 0.01
SE_MULTIPLIER = 4.0


@dataclass
class CheckRow:
    name: str
    params: str
    analytic: float
    estimate: float
    std_error: float
    passed: bool


def ks_critical(n1: int, n2: int, alpha: float = KS_ALPHA) -> float:
    """Asymptotic two-sample Kolmogorov-Smirnov critical value."""
    c = math.sqrt(-0.5 * math.log(alpha / 2.0))
    return c * math.sqrt((n1 + n2) / (n1 * n2))


def _freq(hits: np.ndarray):
    f = float(np.mean(hits))
    return f, math.sqrt(f * (1 - f) / hits.size)


def csb_rows(draws: int = 1_000_000, seed: int = 0):
    rng = np.random.default_rng(seed)
    for n in TAIL_GRID_N:
        x = rng.chisquare(n, draws)
        for lam in TAIL_GRID_LAMBDA:
            bound = chisq_upper_tail_bound(n, lam)
            f, se = _freq(x > n * (1 + lam))
            yield CheckRow("csb_upper", f"n={n} lambda={lam}", bound, f, se,
                           f <= bound + SE_MULTIPLIER * se)


def lemma1_rows(draws: int = 1_000_000, seed: int = 1):
    rng = np.random.default_rng(seed)
    for n in TAIL_GRID_N:
        lams = [lam for lam in TAIL_GRID_LAMBDA if n >= lemma1_threshold(lam)]
        if not lams:
            continue
        x = rng.chisquare(n, draws)
        for lam in lams:
            bound = chisq_lower_tail_bound(n, lam)
            f, se = _freq(x < n * (1 - lam))
            yield CheckRow("lemma1_lower", f"n={n} lambda={lam}", bound, f, se,
                           f <= bound + SE_MULTIPLIER * se)


def lemma1_monotonicity_row(n: int = 100, lam: float = 0.5, draws: int = 1_000_000, seed: int = 2):
    """``P{χ²_{n+1} < (n+1)(1-λ)} <= P{χ²_n <= n(1-λ)}`` within Monte Carlo error."""
    rng = np.random.default_rng(seed)
    f_next, se_next = _freq(rng.chisquare(n + 1, draws) < (n + 1) * (1 - lam))
    f_cur, se_cur = _freq(rng.chisquare(n, draws) <= n * (1 - lam))
    se = math.hypot(se_next, se_cur)
    return CheckRow("lemma1_monotone", f"n={n} lambda={lam}", f_cur, f_next, se,
                    f_next <= f_cur + SE_MULTIPLIER * se)


def lemma2_rows(count: int = 100_000, seed: int = 3):
    for i, (rho, n) in enumerate(LEMMA2_GRID):
        lhs, rhs = lemma2_pair_sample(n, rho, count, seed + 1000 * i)
        res = stats.ks_2samp(lhs, rhs)
        yield CheckRow("lemma2_ks", f"rho={rho} n={n}", ks_critical(count, count),
                       float(res.statistic), float("nan"), res.pvalue > KS_ALPHA)


def likelihood_ratio_sample(E0: EdgeSet, E: EdgeSet, theta0, n: int, count: int, seed: int) -> np.ndarray:
    """Monte Carlo draws of ``l(Θ̂(E)) - l(Θ̂(E0))`` under data from Θ0."""
    ss = np.random.SeedSequence(seed)
    out = np.empty(count)
    for i, child in enumerate(ss.spawn(count)):
        S = sample_covariance(sample_mvn(theta0, n, child))
        out[i] = max_loglik(S, E) - max_loglik(S, E0)
    return out


def porteous_rows(p: int = 6, n: int = 200, count: int = 10_000, seed: int = 4):
    """Empirical likelihood ratio for chain ⊂ chain + {1,3} against the Beta-product law."""
    spec = build_chain_theta(p)
    E0 = chain_edges(p)
    E = E0.union(EdgeSet(p, frozenset({(0, 2)})))
    consts = edge_addition_constants(E0, E)
    empirical = likelihood_ratio_sample(E0, E, spec.theta0, n, count, seed)
    theory = beta_product_lr_sample(n, consts, count, seed + 1)
    res = stats.ks_2samp(empirical, theory)
    yield CheckRow("porteous_ks", f"p={p} n={n} c={consts}", ks_critical(count, count),
                   float(res.statistic), float("nan"), res.pvalue > KS_ALPHA)


def beta_dominance_rows(cases=((10, 0), (10, 2), (200, 2)), draws: int = 1_000_000, seed: int = 5):
    """Quantiles of ``-log B`` against those of ``χ²₁/(n - c - 1)`` at 99 percentiles.

    Exact Beta quantiles must lie below the chi-square quantiles. Sampled
    quantiles must lie below them up to Monte Carlo error; the tolerance
    uses the order-statistic standard error from the exact density.
    """
    levels = np.arange(1, 100) / 100.0
    for i, (n, c) in enumerate(cases):
        a = (n - c) / 2.0
        exact = -np.log(stats.beta.ppf(1.0 - levels, a, 0.5))
        chi = stats.chi2.ppf(levels, 1) / (n - c - 1)
        samples = beta_product_lr_sample(n, [c], draws, seed + i) * (2.0 / n)
        empirical = np.quantile(samples, levels)
        # density of -log B at its quantile: f_B(e^{-x}) e^{-x}
        b = np.exp(-exact)
        dens = stats.beta.pdf(b, a, 0.5) * b
        se = np.sqrt(levels * (1 - levels) / draws) / dens
        yield CheckRow("beta_dominance_exact", f"n={n} c={c}", float(np.min(chi - exact)), 0.0,
                       float("nan"), bool(np.all(exact <= chi)))
        yield CheckRow("beta_dominance_sampled", f"n={n} c={c}", float(np.max(empirical - chi)), 0.0,
                       float(np.max(se)), bool(np.all(empirical <= chi + SE_MULTIPLIER * se)))


def assumption_rows():
    """Assumption checkers on one infeasible and one feasible configuration.

    ``passed`` means the checker agreed with the expected verdict; the
    verdict itself is in ``params``.
    """
    cases = [
        (NonAsymptoticParams(n=100, p=1000, q=100, gamma=1.0, C=2.0, theta0=0.3, lambda_max=1.6,
                             eps0=0.1, eps1=0.1), False, False),
        (NonAsymptoticParams(n=10**14, p=10**6, q=10**6, gamma=3.5, C=1.0, theta0=0.3,
                             lambda_max=1.6, eps0=0.1, eps1=0.1), True, True),
    ]
    for prm, want4, want5 in cases:
        rep: AssumptionReport = check_nonasymptotic_assumptions(prm)
        label = f"n={prm.n} p={prm.p} q={prm.q} gamma={prm.gamma}"
        yield CheckRow("assumption_sample_size", f"{label} holds={rep.sample_condition}",
                       rep.sample_rhs, rep.sample_lhs, float("nan"), rep.sample_condition == want4)
        yield CheckRow("assumption_penalty", f"{label} holds={rep.penalty_condition}",
                       prm.eps0, rep.penalty_lhs, float("nan"), rep.penalty_condition == want5)
        if rep.sample_condition and rep.penalty_condition:
            bound = success_probability_bound(prm.p, prm.eps0, prm.eps1)
            yield CheckRow("success_probability", label, bound, float("nan"), float("nan"),
                           0.0 < bound <= 1.0)


CHECKS = {
    "csb": lambda: list(csb_rows()),
    "lemma1": lambda: list(lemma1_rows()) + [lemma1_monotonicity_row()],
    "lemma2": lambda: list(lemma2_rows()),
    "porteous": lambda: list(porteous_rows()) + list(beta_dominance_rows()),
    "assumptions": lambda: list(assumption_rows()),
}


def run_checks(which: str = "all") -> list:
    names = list(CHECKS) if which == "all" else [which]
    rows = []
    for name in names:
        rows.extend(CHECKS[name]())
    return rows
