"""Command-line entry point: ``ebicggm simulate|select|path|enumerate|bounds``.

Exit codes: 0 success, 1 input error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import logging
import math
import sys

import numpy as np

from .errors import InputError, NumericalError

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2

DESK_N = (100, 200, 400)
FULL_N = (100, 200, 400, 800)


def _floats(text):
    try:
        return tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text):
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _methods(text):
    return tuple(t.strip() for t in text.split(",") if t.strip())


def _load_cov(path, center):
    from .core import sample_covariance
    from .io import load_matrix

    x = load_matrix(path)
    if center:
        x = x - x.mean(axis=0)
    return x, sample_covariance(x)


def cmd_simulate(args, out):
    from .harness import ScenarioConfig, aggregate, run_scenario
    from .io import emit_csv

    n_values = args.n_values or (FULL_N if args.full_scale else DESK_N)
    trials = args.trials or (100 if args.full_scale else 20)
    cfg = ScenarioConfig(family=args.family, kappa=args.kappa, n_values=n_values, gammas=args.gammas,
                         trials=trials, base_seed=args.seed, methods=args.methods,
                         path_count=args.count, cv_folds=args.folds, workers=args.workers)
    records = run_scenario(cfg)
    emit_csv(records, args.out)
    w = csv.writer(out)
    w.writerow(["n", "method", "gamma", "trials", "failures", "psr", "fdr", "psr_excl_failed", "fdr_excl_failed"])
    for (_, n, method, gamma), s in sorted(aggregate(records).items(), key=lambda kv: (kv[0][1], kv[0][2], kv[0][3] or -1)):
        w.writerow([n, method, "" if gamma is None else gamma, s.count, s.failures,
                    f"{s.psr_inclusive:.4f}", f"{s.fdr_inclusive:.4f}",
                    f"{s.psr_exclusive:.4f}", f"{s.fdr_exclusive:.4f}"])
    return EXIT_OK


def cmd_select(args, out):
    from .glasso import glasso_path
    from .io import format_edges
    from .selection import refit_loglik, score_models, select_min

    _, S = _load_cov(args.data, args.center)
    candidates = glasso_path(S, args.count).unique_models()
    logliks = refit_loglik(S, candidates)
    scored = score_models(S, candidates, args.gamma, logliks)
    winner = select_min(scored)
    out.write(f"# selected model: {len(winner)} edges, gamma={args.gamma}\n")
    out.write(format_edges(winner))
    out.write("\n")
    w = csv.writer(out)
    w.writerow(["num_edges", "loglik", "ebic", "selected"])
    for m in scored:
        w.writerow([m.num_edges, f"{m.loglik:.10g}", f"{m.ebic:.10g}", int(m.edge_set == winner)])
    return EXIT_OK


def cmd_path(args, out):
    from .glasso import glasso_path
    from .selection import ebic_score, refit_loglik

    _, S = _load_cov(args.data, args.center)
    path = glasso_path(S, args.count)
    logliks = refit_loglik(S, path.unique_models())
    w = csv.writer(out)
    w.writerow(["rho", "num_edges", "loglik_refit", "ebic_gamma0", "ebic_gamma05", "ebic_gamma1"])
    for rho, E in zip(path.penalties, path.models):
        ll = logliks.get(E.edges, math.nan)
        scores = [ebic_score(ll, len(E), S.n, S.p, g) for g in (0.0, 0.5, 1.0)]
        w.writerow([f"{rho:.10g}", len(E), f"{ll:.10g}"] + [f"{s:.10g}" for s in scores])
    return EXIT_OK


def cmd_enumerate(args, out):
    from .chordal import enumerate_decomposable
    from .io import format_edges

    models = enumerate_decomposable(args.p, args.q)
    for i, E in enumerate(models):
        out.write(f"# model {i} ({len(E)} edges)\n")
        out.write(format_edges(E))
        out.write("\n")
    out.write(f"# {len(models)} decomposable models on p={args.p} with at most {args.q} edges\n")
    return EXIT_OK


def cmd_bounds(args, out):
    from .checks import run_checks

    rows = run_checks(args.check)
    w = csv.writer(out)
    w.writerow(["formula", "parameters", "analytic", "mc_estimate", "mc_std_error", "result"])
    for r in rows:
        w.writerow([r.name, r.params, f"{r.analytic:.6g}", f"{r.estimate:.6g}", f"{r.std_error:.3g}",
                    "pass" if r.passed else "fail"])
    return EXIT_OK if all(r.passed for r in rows) else EXIT_NUMERIC


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ebicggm", description="Extended BIC for Gaussian graphical models")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a scaling scenario and write trial records")
    sim.add_argument("--family", choices=["chain", "double_chain"], default="chain")
    sim.add_argument("--kappa", type=float, default=1.0)
    sim.add_argument("--trials", type=int, default=None, help="default 20 (100 with --full-scale)")
    sim.add_argument("--n-values", type=_ints, default=None)
    sim.add_argument("--gammas", type=_floats, default=(0.0, 0.5, 1.0))
    sim.add_argument("--methods", type=_methods, default=("ebic",))
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--count", type=int, default=100, help="penalties on the glasso path")
    sim.add_argument("--folds", type=int, default=None, help="CV folds (default min(100, n))")
    sim.add_argument("--workers", type=int, default=1)
    sim.add_argument("--full-scale", action="store_true", help="100 trials, n up to 800")
    sim.add_argument("--out", required=True)
    sim.set_defaults(func=cmd_simulate)

    sel = sub.add_parser("select", help="choose a graph for a data matrix")
    sel.add_argument("--data", required=True)
    sel.add_argument("--gamma", type=float, default=0.5)
    sel.add_argument("--count", type=int, default=100)
    sel.add_argument("--center", action="store_true", help="subtract column means first")
    sel.set_defaults(func=cmd_select)

    pth = sub.add_parser("path", help="glasso path with refit scores")
    pth.add_argument("--data", required=True)
    pth.add_argument("--count", type=int, default=100)
    pth.add_argument("--center", action="store_true")
    pth.set_defaults(func=cmd_path)

    enu = sub.add_parser("enumerate", help="list decomposable models")
    enu.add_argument("--p", type=int, required=True)
    enu.add_argument("--q", type=int, required=True)
    enu.set_defaults(func=cmd_enumerate)

    bnd = sub.add_parser("bounds", help="Monte Carlo validation table")
    bnd.add_argument("--check", choices=["all", "csb", "lemma1", "lemma2", "porteous", "assumptions"],
                     default="all")
    bnd.set_defaults(func=cmd_bounds)
    return ap


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args, out)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericalError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
