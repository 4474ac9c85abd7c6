"""Text formats: data matrices, edge lists, trial records.

Matrix files have a ``p,n`` header followed by ``n`` rows of ``p``
comma-separated reals. Edge lists hold one 1-based ``j k`` pair per line.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from .core import EdgeSet
from .errors import MalformedFileError
from .harness import TrialRecord

RECORD_FIELDS = ["scenario", "family", "kappa", "n", "p", "method", "gamma", "trial",
                 "psr", "fdr", "num_selected", "runtime_ms", "edges"]


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def save_matrix(data, path) -> None:
    x = np.atleast_2d(np.asarray(data, dtype=float))
    n, p = x.shape
    with open(path, "w") as fh:
        fh.write(f"{p},{n}\n")
        for row in x:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def load_matrix(path) -> np.ndarray:
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise MalformedFileError("empty file", 1)
    try:
        p, n = (int(tok) for tok in lines[0].split(","))
    except ValueError:
        raise MalformedFileError("header must be 'p,n' with two integers", 1) from None
    if p < 1 or n < 0:
        raise MalformedFileError("header values out of range", 1)
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        toks = line.split(",")
        if len(toks) != p:
            raise MalformedFileError(f"expected {p} columns, found {len(toks)}", lineno)
        try:
            vals = [float(t) for t in toks]
        except ValueError:
            raise MalformedFileError("non-numeric entry", lineno) from None
        if not all(math.isfinite(v) for v in vals):
            raise MalformedFileError("non-finite entry", lineno)
        rows.append(vals)
    if len(rows) != n:
        raise MalformedFileError(f"header declares {n} rows, found {len(rows)}", len(lines))
    return np.array(rows, dtype=float).reshape(n, p)


def format_edges(E: EdgeSet) -> str:
    return "".join(f"{j + 1} {k + 1}\n" for j, k in E.sorted())


def parse_edges(text: str, p: int) -> EdgeSet:
    pairs = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        toks = line.split()
        if len(toks) != 2:
            raise MalformedFileError("expected 'j k'", lineno)
        try:
            j, k = int(toks[0]), int(toks[1])
        except ValueError:
            raise MalformedFileError("node labels must be integers", lineno) from None
        if not 1 <= j < k <= p:
            raise MalformedFileError(f"need 1 <= j < k <= {p}", lineno)
        pairs.append((j - 1, k - 1))
    return EdgeSet.from_pairs(p, pairs)


def _edges_field(E: EdgeSet) -> str:
    return ";".join(f"{j + 1}-{k + 1}" for j, k in E.sorted())


def _parse_edges_field(text: str, p: int, lineno: int) -> EdgeSet:
    pairs = []
    for tok in filter(None, text.split(";")):
        try:
            j, k = (int(v) for v in tok.split("-"))
        except ValueError:
            raise MalformedFileError(f"bad edge token {tok!r}", lineno) from None
        pairs.append((j - 1, k - 1))
    try:
        return EdgeSet.from_pairs(p, pairs)
    except ValueError as exc:
        raise MalformedFileError(str(exc), lineno) from None


def emit_csv(records, path) -> None:
    """Write trial records; failed trials carry ``nan`` PSR and FDR."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(RECORD_FIELDS)
        for r in records:
            w.writerow([r.scenario, r.family, _fmt(r.kappa), r.n, r.p, r.method, _fmt(r.gamma),
                        r.trial, _fmt(r.psr), _fmt(r.fdr), r.num_selected, r.runtime_ms,
                        _edges_field(r.selected)])


def read_csv(path) -> list:
    out = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != RECORD_FIELDS:
            raise MalformedFileError("unexpected header", 1)
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(RECORD_FIELDS):
                raise MalformedFileError(f"expected {len(RECORD_FIELDS)} fields, found {len(row)}", lineno)
            d = dict(zip(RECORD_FIELDS, row))
            try:
                p = int(d["p"])
                psr, fdr = float(d["psr"]), float(d["fdr"])
                rec = TrialRecord(
                    scenario=d["scenario"], family=d["family"], kappa=float(d["kappa"]),
                    n=int(d["n"]), p=p, method=d["method"], gamma=float(d["gamma"]),
                    trial=int(d["trial"]), selected=_parse_edges_field(d["edges"], p, lineno),
                    psr=psr, fdr=fdr, runtime_ms=int(d["runtime_ms"]),
                    failed=math.isnan(psr),
                )
            except MalformedFileError:
                raise
            except ValueError as exc:
                raise MalformedFileError(str(exc), lineno) from None
            if rec.num_selected != int(d["num_selected"]):
                raise MalformedFileError("num_selected does not match edges", lineno)
            out.append(rec)
    return out
