"""Simulation study driver: scaling scenarios, trials, PSR/FDR, exhaustive search."""

from __future__ import annotations

import logging
import math
import time
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .chordal import ENUMERATION_CAP, enumerate_decomposable
from .core import EdgeSet, SampleCov, sample_covariance
from .errors import EnumerationTooLargeError, InputError, NumericalError
from .glasso import glasso_path
from .models import build_theta, sample_mvn
from .selection import cv_scores, refit_loglik, score_models, select_min

log = logging.getLogger(__name__)

FAMILIES = ("chain", "double_chain")
METHODS = ("ebic", "cv")


def p_for_n(n: int, kappa: float) -> int:
    """Node count ``round(10 (n/100)^κ)`` (half rounds up)."""
    return int(math.floor(10.0 * (n / 100.0) ** kappa + 0.5))


@dataclass(frozen=True)
class ScenarioConfig:
    family: str = "chain"
    kappa: float = 1.0
    n_values: tuple = (100, 200, 400, 800)
    gammas: tuple = (0.0, 0.5, 1.0)
    trials: int = 100
    base_seed: int = 0
    methods: tuple = ("ebic",)
    path_count: int = 100
    cv_folds: int | None = None
    workers: int = 1

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InputError(f"family must be one of {FAMILIES}")
        if self.kappa <= 0:
            raise InputError("kappa must be positive")
        bad = [m for m in self.methods if m not in METHODS]
        if bad or not self.methods:
            raise InputError(f"methods must be a non-empty subset of {METHODS}")
        if self.trials < 1:
            raise InputError("trials must be positive")
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))
        object.__setattr__(self, "gammas", tuple(float(g) for g in self.gammas))
        object.__setattr__(self, "methods", tuple(self.methods))
        min_p = 3 if self.family == "double_chain" else 2
        for n in self.n_values:
            if p_for_n(n, self.kappa) < min_p:
                raise InputError(f"n={n} gives p={p_for_n(n, self.kappa)} < {min_p}")

    @property
    def scenario_id(self) -> str:
        return f"{self.family}_k{self.kappa:g}"


def _same(a, b) -> bool:
    if isinstance(a, float) and isinstance(b, float):
        return a == b or (math.isnan(a) and math.isnan(b))
    return a == b


@dataclass(eq=False)
class TrialRecord:
    scenario: str
    family: str
    kappa: float
    n: int
    p: int
    method: str
    gamma: float
    trial: int
    selected: EdgeSet
    psr: float
    fdr: float
    runtime_ms: int
    failed: bool = False

    @property
    def num_selected(self) -> int:
        return len(self.selected)

    def __eq__(self, other):
        if not isinstance(other, TrialRecord):
            return NotImplemented
        return all(_same(getattr(self, f), getattr(other, f)) for f in self.__dataclass_fields__)

    def sort_key(self):
        g = -1.0 if math.isnan(self.gamma) else self.gamma
        return (self.scenario, self.n, self.trial, self.method, g)


def psr_fdr(selected: EdgeSet, truth: EdgeSet) -> tuple:
    """Positive selection rate and false discovery rate; FDR of an empty selection is 0."""
    if selected.p != truth.p:
        raise InputError("selected and true edge sets have different node counts")
    if len(truth) == 0:
        raise InputError("true edge set is empty")
    hits = len(selected.edges & truth.edges)
    psr = hits / len(truth)
    fdr = (len(selected) - hits) / len(selected) if len(selected) else 0.0
    return psr, fdr


def run_trial(cfg: ScenarioConfig, n: int, trial: int) -> list:
    p = p_for_n(n, cfg.kappa)
    spec = build_theta(cfg.family, p)
    seed = cfg.base_seed + trial
    base = dict(scenario=cfg.scenario_id, family=cfg.family, kappa=cfg.kappa, n=n, p=p, trial=trial)

    def failed(method, gamma, ms):
        return TrialRecord(**base, method=method, gamma=gamma, selected=EdgeSet(p),
                           psr=math.nan, fdr=math.nan, runtime_ms=ms, failed=True)

    records = []
    start = time.perf_counter()
    try:
        data = sample_mvn(spec.theta0, n, seed)
        S = sample_covariance(data)
        candidates = glasso_path(S, cfg.path_count).unique_models()
    except (NumericalError, InputError) as exc:
        log.warning("trial %d (n=%d) failed during path construction: %s", trial, n, exc)
        ms = int((time.perf_counter() - start) * 1000)
        for g in cfg.gammas if "ebic" in cfg.methods else ():
            records.append(failed("ebic", g, ms))
        if "cv" in cfg.methods:
            records.append(failed("cv", math.nan, ms))
        return records
    path_s = time.perf_counter() - start

    if "ebic" in cfg.methods:
        t0 = time.perf_counter()
        logliks = refit_loglik(S, candidates)
        refit_s = time.perf_counter() - t0
        for g in cfg.gammas:
            t1 = time.perf_counter()
            ms = int((path_s + refit_s + time.perf_counter() - t1) * 1000)
            scored = score_models(S, candidates, g, logliks)
            if not scored:
                records.append(failed("ebic", g, ms))
                continue
            sel = select_min(scored)
            psr, fdr = psr_fdr(sel, spec.edge_set)
            records.append(TrialRecord(**base, method="ebic", gamma=g, selected=sel,
                                       psr=psr, fdr=fdr, runtime_ms=ms))
    if "cv" in cfg.methods:
        t0 = time.perf_counter()
        try:
            scores = cv_scores(data, candidates, cfg.cv_folds, seed)
            finite = [i for i, s in enumerate(scores) if np.isfinite(s)]
            if not finite:
                raise NumericalError("no candidate survived cross-validation")
            best = min(finite, key=lambda i: (scores[i], len(candidates[i]), candidates[i].sorted()))
            sel = candidates[best]
            ms = int((path_s + time.perf_counter() - t0) * 1000)
            psr, fdr = psr_fdr(sel, spec.edge_set)
            records.append(TrialRecord(**base, method="cv", gamma=math.nan, selected=sel,
                                       psr=psr, fdr=fdr, runtime_ms=ms))
        except NumericalError as exc:
            log.warning("trial %d (n=%d) cross-validation failed: %s", trial, n, exc)
            records.append(failed("cv", math.nan, int((path_s + time.perf_counter() - t0) * 1000)))
    return records


def _run_job(args):
    cfg, n, trial = args
    return run_trial(cfg, n, trial)


def run_scenario(cfg: ScenarioConfig) -> list:
    """All trials for every ``n``; records come back in canonical order."""
    jobs = [(cfg, n, t) for n in cfg.n_values for t in range(cfg.trials)]
    records = []
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            for recs in pool.map(_run_job, jobs):
                records.extend(recs)
    else:
        for job in jobs:
            records.extend(_run_job(job))
    records.sort(key=TrialRecord.sort_key)
    return records


@dataclass
class Summary:
    count: int
    failures: int
    psr_inclusive: float
    fdr_inclusive: float
    psr_exclusive: float
    fdr_exclusive: float


def aggregate(records) -> dict:
    """Mean PSR/FDR per ``(scenario, n, method, gamma)``.

    Inclusive means count a failed trial as PSR 0 and FDR 0; exclusive
    means drop failed trials.
    """
    groups = defaultdict(list)
    for r in records:
        g = None if math.isnan(r.gamma) else r.gamma
        groups[(r.scenario, r.n, r.method, g)].append(r)
    out = {}
    for key, recs in groups.items():
        ok = [r for r in recs if not r.failed]
        inc_psr = sum(r.psr for r in ok) / len(recs)
        inc_fdr = sum(r.fdr for r in ok) / len(recs)
        exc_psr = sum(r.psr for r in ok) / len(ok) if ok else math.nan
        exc_fdr = sum(r.fdr for r in ok) / len(ok) if ok else math.nan
        out[key] = Summary(len(recs), len(recs) - len(ok), inc_psr, inc_fdr, exc_psr, exc_fdr)
    return out


def exhaustive_select(S: SampleCov, p: int | None = None, q: int | None = None, gamma: float = 0.5,
                      *, models=None, cap: int = ENUMERATION_CAP) -> EdgeSet:
    """Minimum-EBIC model over every decomposable graph with at most ``q`` edges."""
    p = S.p if p is None else p
    if p != S.p:
        raise InputError(f"p={p} does not match covariance dimension {S.p}")
    if p > cap:
        raise EnumerationTooLargeError(f"enumeration too large: p={p} exceeds cap {cap}")
    if models is None:
        q = p * (p - 1) // 2 if q is None else q
        models = enumerate_decomposable(p, q, cap)
    scored = score_models(S, models, gamma)
    return select_min(scored)
