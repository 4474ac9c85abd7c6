"""Chi-square tail bounds, distributional identities, and assumption checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .chordal import is_chordal
from .errors import InputError, PreconditionError
from .models import TrueModelSpec
from .selection import gamma0 as _gamma0


def chisq_upper_tail_bound(n: int, lam: float) -> float:
    """Upper bound on ``P{χ²_n > n(1+λ)}``: ``exp(-(n/2)(λ - log(1+λ))) / (λ √(πn))``."""
    if n < 1:
        raise InputError("n must be >= 1")
    if lam <= 0:
        raise InputError("lambda must be positive")
    log_val = -0.5 * n * (lam - math.log1p(lam)) - math.log(lam) - 0.5 * math.log(math.pi * n)
    return math.exp(log_val)


def lemma1_threshold(lam: float) -> float:
    return 4.0 / lam ** 2 + 1.0


def chisq_lower_tail_bound(n: int, lam: float) -> float:
    """Upper bound on ``P{χ²_n < n(1-λ)}``, valid for ``n >= 4/λ² + 1``.

    ``exp(((n-1)/2)(λ + log(1-λ))) / (λ √(π(n-1)))``; the exponent is negative.
    """
    if not 0.0 < lam < 1.0:
        raise InputError("lambda must lie in (0, 1)")
    if n < lemma1_threshold(lam):
        raise PreconditionError(
            f"n below Lemma 1 validity threshold: n={n} < 4/lambda^2 + 1 = {lemma1_threshold(lam):.4g}"
        )
    m = n - 1
    log_val = 0.5 * m * (lam + math.log1p(-lam)) - math.log(lam) - 0.5 * math.log(math.pi * m)
    return math.exp(log_val)


def lemma2_pair_sample(n: int, rho: float, count: int, seed):
    """Paired draws of ``Σ(X_i Y_i - ρ)`` and ``((1+ρ)/2)(A-n) - ((1-ρ)/2)(B-n)``.

    The two sides use independent child streams of ``seed``.
    """
    if abs(rho) > 1:
        raise InputError("correlation must lie in [-1, 1]")
    if count < 1 or n < 1:
        raise InputError("count and n must be positive")
    left_rng, right_rng = (np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(2))
    a = math.sqrt((1 + rho) / 2)
    b = math.sqrt((1 - rho) / 2)
    lhs = np.empty(count)
    chunk = max(1, 2_000_000 // n)
    for start in range(0, count, chunk):
        stop = min(count, start + chunk)
        z = left_rng.standard_normal((stop - start, n))
        w = left_rng.standard_normal((stop - start, n))
        x = z
        y = rho * z + math.sqrt(max(1 - rho * rho, 0.0)) * w
        lhs[start:stop] = np.sum(x * y - rho, axis=1)
    A = right_rng.chisquare(n, count)
    B = right_rng.chisquare(n, count)
    rhs = a * a * (A - n) - b * b * (B - n)
    return lhs, rhs


def _log_beta_half(rng, shape_a: float, size: int) -> np.ndarray:
    """``log B`` for ``B ~ Beta(shape_a, 1/2)`` from a pair of gamma variates."""
    g1 = rng.standard_gamma(shape_a, size)
    g2 = rng.standard_gamma(0.5, size)
    return np.log(g1) - np.log(g1 + g2)


def beta_product_lr_sample(n: int, clique_constants, count: int, seed) -> np.ndarray:
    """Draws of ``-(n/2) log Π B_i`` with independent ``B_i ~ Beta((n - c_i)/2, 1/2)``."""
    consts = [int(c) for c in clique_constants]
    if any(c < 0 or n - c < 1 for c in consts):
        raise InputError("each clique constant must satisfy 0 <= c_i <= n - 1")
    rng = np.random.default_rng(seed)
    total = np.zeros(count)
    for c in consts:
        total += _log_beta_half(rng, (n - c) / 2.0, count)
    return -0.5 * n * total


def expected_neg_log_beta(n: int, c: int = 0) -> float:
    """``E[-log B]`` for ``B ~ Beta((n-c)/2, 1/2)``: ``ψ((n-c+1)/2) - ψ((n-c)/2)``."""
    from scipy.special import digamma

    a = (n - c) / 2.0
    return float(digamma(a + 0.5) - digamma(a))


@dataclass
class ConditionReport:
    decomposable: bool
    num_edges: int
    edges_within_q: bool
    condition_product: float
    C: float
    condition_bounded: bool
    gamma0: float
    gamma0_positive: bool
    sample_size_ratio: float
    details: dict = field(default_factory=dict)

    def all_pointwise(self) -> bool:
        return self.decomposable and self.edges_within_q and self.condition_bounded and self.gamma0_positive


def check_asymptotic_conditions(spec: TrueModelSpec, n: int, p: int, q: int, gamma: float,
                                kappa: float, C: float | None = None) -> ConditionReport:
    """Pointwise read-out of the asymptotic conditions.

    The growth condition is reported as the ratio
    ``(p + 2q) log p λ²max / θ0² / n`` rather than a boolean. ``C``
    defaults to the condition number of Θ0, which always dominates
    ``σ²max λmax``.
    """
    chordal = is_chordal(spec.edge_set)[0]
    product = spec.max_variance * spec.max_eigenvalue
    if C is None:
        C = spec.condition_number()
    g0 = _gamma0(gamma, kappa)
    ratio = (p + 2 * q) * math.log(p) * spec.max_eigenvalue ** 2 / spec.min_signal ** 2 / n
    return ConditionReport(
        decomposable=chordal,
        num_edges=len(spec.edge_set),
        edges_within_q=len(spec.edge_set) <= q,
        condition_product=product,
        C=C,
        condition_bounded=product <= C * (1 + 1e-12),
        gamma0=g0,
        gamma0_positive=g0 > 0,
        sample_size_ratio=ratio,
    )


@dataclass(frozen=True)
class NonAsymptoticParams:
    n: int
    p: int
    q: int
    gamma: float
    C: float
    theta0: float
    lambda_max: float
    eps0: float
    eps1: float
    kappa: float | None = None

    def __post_init__(self):
        if min(self.n, self.p, self.q) < 1:
            raise InputError("n, p, q must be positive integers")
        if self.theta0 <= 0 or self.lambda_max <= 0 or self.eps0 <= 0 or self.eps1 <= 0:
            raise InputError("theta0, lambda_max, eps0, eps1 must be positive")
        if self.kappa is None:
            if self.n < 2:
                raise InputError("need n >= 2 to derive kappa")
            object.__setattr__(self, "kappa", math.log(self.p) / math.log(self.n))

    @property
    def gamma0(self) -> float:
        return _gamma0(self.gamma, self.kappa)


@dataclass
class AssumptionReport:
    sample_condition: bool
    sample_lhs: float
    sample_rhs: float
    sample_slack: float
    penalty_condition: bool
    penalty_lhs: float
    penalty_slack: float
    reason: str = ""


def check_nonasymptotic_assumptions(params: NonAsymptoticParams) -> AssumptionReport:
    """Evaluate the sample-size and penalty conditions; slack = rhs - lhs."""
    g0 = params.gamma0
    logp = math.log(params.p)
    lhs4 = (params.p + 2 * params.q) * logp / params.n * params.lambda_max ** 2 / params.theta0 ** 2
    rhs4 = 1.0 / (3200.0 * max(1.0 + g0, (1.0 + params.eps1 / 2.0) * params.C ** 2))
    ok4 = lhs4 <= rhs4
    reason = ""
    if g0 <= 0:
        lhs5 = math.nan
        ok5 = False
        slack5 = math.nan
        reason = f"gamma0 = {g0:.6g} is not positive"
    elif params.p < 3:
        lhs5 = math.nan
        ok5 = False
        slack5 = math.nan
        reason = "log log p undefined for p < 3"
    else:
        root = math.sqrt(1.0 + g0)
        lhs5 = 2.0 * (root - 1.0) - (math.log(logp) + math.log(4.0 * root) + 1.0) / (2.0 * logp)
        ok5 = lhs5 >= params.eps0
        slack5 = lhs5 - params.eps0
    return AssumptionReport(ok4, lhs4, rhs4, rhs4 - lhs4, ok5, lhs5, slack5, reason)


def success_probability_bound(p: int, eps0: float, eps1: float) -> float:
    """Lower bound on the probability that the criterion recovers the true model."""
    if p < 2:
        raise InputError("p must be >= 2")
    if eps0 <= 0 or eps1 <= 0:
        raise InputError("eps0 and eps1 must be positive")
    logp = math.log(p)
    a = p ** (-eps0)
    first = a / (1.0 - a) / (4.0 * math.sqrt(math.pi) * logp)
    second = p ** (-eps1) / math.sqrt(math.pi * logp)
    return 1.0 - first - second


def superset_exceedance_bound(n: int, m: int, c_max: int, gamma0: float, p: int) -> float:
    """``P{(n/2)/(n - c - 1) χ²_m >= 2(1+γ0) m log p}`` from the stochastic domination.

    Upper-bounds the chance that a decomposable superset with ``m`` extra
    edges beats the true model by the penalty margin.
    """
    from scipy.stats import chi2

    threshold = 2.0 * (1.0 + gamma0) * m * math.log(p) * 2.0 * (n - c_max - 1) / n
    return float(chi2.sf(threshold, m))
