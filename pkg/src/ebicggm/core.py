"""Core types and the Gaussian log-likelihood.

Node indices are 0-based everywhere inside the library. Text formats read
and written by :mod:`ebicggm.io` are 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from .errors import DegenerateInputError, InputError, NotPositiveDefiniteError

MATRIX_ATOL = 1e-9


def _pair(j, k):
    j, k = int(j), int(k)
    return (j, k) if j < k else (k, j)


@dataclass(frozen=True)
class EdgeSet:
    """Undirected simple graph on nodes ``0..p-1``.

    Edges are stored as sorted pairs ``(j, k)`` with ``j < k``.
    """

    p: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.p < 0:
            raise InputError("node count must be non-negative")
        clean = set()
        for e in self.edges:
            j, k = e
            if j == k:
                raise InputError(f"self-loop at node {j}")
            j, k = _pair(j, k)
            if j < 0 or k >= self.p:
                raise InputError(f"edge ({j}, {k}) out of range for p={self.p}")
            clean.add((j, k))
        object.__setattr__(self, "edges", frozenset(clean))

    @classmethod
    def from_pairs(cls, p: int, pairs: Iterable) -> "EdgeSet":
        return cls(p, frozenset(tuple(e) for e in pairs))

    @classmethod
    def complete(cls, p: int) -> "EdgeSet":
        return cls(p, frozenset((j, k) for j in range(p) for k in range(j + 1, p)))

    @classmethod
    def from_matrix(cls, matrix: np.ndarray, tol: float = 0.0) -> "EdgeSet":
        """Off-diagonal support of a square matrix (entries with ``|x| > tol``)."""
        m = np.asarray(matrix)
        p = m.shape[0]
        upper = np.triu(np.abs(m) > tol, k=1) | np.triu(np.abs(m.T) > tol, k=1)
        js, ks = np.nonzero(upper)
        return cls(p, frozenset(zip(js.tolist(), ks.tolist())))

    def __len__(self) -> int:
        return len(self.edges)

    def __iter__(self) -> Iterator[tuple]:
        return iter(self.sorted())

    def __contains__(self, e) -> bool:
        j, k = e
        return _pair(j, k) in self.edges

    def sorted(self) -> list:
        return sorted(self.edges)

    def key(self) -> tuple:
        """Canonical ordering key: size first, then lexicographic edge list."""
        return (len(self.edges), tuple(self.sorted()))

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.p, self.p), dtype=bool)
        for j, k in self.edges:
            a[j, k] = a[k, j] = True
        return a

    def neighbors(self) -> list:
        nbrs = [set() for _ in range(self.p)]
        for j, k in self.edges:
            nbrs[j].add(k)
            nbrs[k].add(j)
        return nbrs

    def mask(self) -> np.ndarray:
        """Boolean mask of the positions Δ ∪ E."""
        m = self.adjacency()
        np.fill_diagonal(m, True)
        return m

    def union(self, other: "EdgeSet") -> "EdgeSet":
        return EdgeSet(self.p, self.edges | other.edges)

    def __le__(self, other: "EdgeSet") -> bool:
        return self.edges <= other.edges

    def __lt__(self, other: "EdgeSet") -> bool:
        return self.edges < other.edges

    def __repr__(self) -> str:
        body = ", ".join(f"{j + 1}-{k + 1}" for j, k in self.sorted())
        return f"EdgeSet(p={self.p}, {{{body}}})"


@dataclass(frozen=True, eq=False)
class SampleCov:
    matrix: np.ndarray
    n: int

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InputError("covariance must be a square matrix")
        if self.n < 1:
            raise InputError("sample count must be positive")
        scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
        if not np.allclose(m, m.T, rtol=0.0, atol=1e-12 * scale):
            raise InputError("covariance matrix is not symmetric")
        m = 0.5 * (m + m.T)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def p(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class PrecisionMatrix:
    matrix: np.ndarray
    support: EdgeSet

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        off = ~self.support.mask()
        if np.any(m[off] != 0.0):
            raise InputError("precision matrix has entries outside its support")

    @classmethod
    def from_matrix(cls, matrix: np.ndarray, tol: float = 0.0) -> "PrecisionMatrix":
        """Symmetrise, zero entries with ``|x| <= tol`` and record the support."""
        m = np.array(matrix, dtype=float)
        m = 0.5 * (m + m.T)
        support = EdgeSet.from_matrix(m, tol)
        m[~support.mask()] = 0.0
        return cls(m, support)

    @property
    def p(self) -> int:
        return self.matrix.shape[0]


def sample_covariance(data) -> SampleCov:
    """Zero-mean sample covariance ``X^T X / n``; no centering is applied."""
    x = np.asarray(data, dtype=float)
    if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
        raise DegenerateInputError("degenerate input: need an n x p matrix with n, p >= 1")
    n = x.shape[0]
    return SampleCov(x.T @ x / n, n)


def cholesky(matrix: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.cholesky(matrix)
    except np.linalg.LinAlgError:
        raise NotPositiveDefiniteError("not positive definite") from None


def logdet_pd(matrix: np.ndarray) -> float:
    """Log-determinant via Cholesky; raises if the matrix is not PD."""
    chol = cholesky(matrix)
    return 2.0 * float(np.sum(np.log(np.diag(chol))))


def log_likelihood(S: SampleCov, theta) -> float:
    """Gaussian log-likelihood ``(n/2)[log det Θ - tr(SΘ)]`` without the 2π constant."""
    t = theta.matrix if isinstance(theta, PrecisionMatrix) else np.asarray(theta, dtype=float)
    if t.shape != S.matrix.shape:
        raise InputError(f"dimension mismatch: {t.shape} vs {S.matrix.shape}")
    return 0.5 * S.n * (logdet_pd(t) - float(np.sum(S.matrix * t)))
