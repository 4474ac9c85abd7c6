"""Chordal (decomposable) graphs: recognition, cliques, enumeration, benchmarks."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

from .core import EdgeSet
from .errors import EnumerationTooLargeError, InputError, NotDecomposableError

ENUMERATION_CAP = 7


@dataclass(frozen=True)
class CliqueDecomposition:
    p: int
    cliques: tuple
    separators: tuple

    def __post_init__(self):
        object.__setattr__(self, "cliques", tuple(frozenset(c) for c in self.cliques))
        object.__setattr__(self, "separators", tuple(frozenset(s) for s in self.separators))
        if len(self.separators) != max(len(self.cliques) - 1, 0):
            raise InputError("need exactly one separator per clique after the first")

    def edges(self) -> EdgeSet:
        pairs = set()
        for c in self.cliques:
            pairs.update(combinations(sorted(c), 2))
        return EdgeSet(self.p, frozenset(pairs))

    def max_clique_size(self) -> int:
        return max((len(c) for c in self.cliques), default=0)


def maximum_cardinality_search(E: EdgeSet) -> list:
    """Visit order of maximum cardinality search, ties broken by lowest index."""
    nbrs = E.neighbors()
    weight = [0] * E.p
    visited = [False] * E.p
    order = []
    for _ in range(E.p):
        best = -1
        for v in range(E.p):
            if not visited[v] and (best < 0 or weight[v] > weight[best]):
                best = v
        visited[best] = True
        order.append(best)
        for u in nbrs[best]:
            if not visited[u]:
                weight[u] += 1
    return order


def _is_perfect_elimination(order, nbrs) -> bool:
    pos = {v: i for i, v in enumerate(order)}
    for v in order:
        later = [u for u in nbrs[v] if pos[u] > pos[v]]
        if not later:
            continue
        first = min(later, key=pos.__getitem__)
        if any(u != first and u not in nbrs[first] for u in later):
            return False
    return True


def is_chordal(E: EdgeSet):
    """Return ``(True, peo)`` for chordal graphs and ``(False, None)`` otherwise.

    The perfect elimination ordering is the reverse of the maximum
    cardinality search visit order.
    """
    peo = maximum_cardinality_search(E)[::-1]
    if _is_perfect_elimination(peo, E.neighbors()):
        return True, peo
    return False, None


def clique_decomposition(E: EdgeSet) -> CliqueDecomposition:
    """Maximal cliques in search order with running-intersection separators."""
    chordal, peo = is_chordal(E)
    if not chordal:
        raise NotDecomposableError("not decomposable: graph is not chordal")
    order = peo[::-1]
    nbrs = E.neighbors()
    seen = set()
    candidates = []
    for v in order:
        candidates.append(frozenset({v} | (nbrs[v] & seen)))
        seen.add(v)
    cliques = [
        c for i, c in enumerate(candidates)
        if not any(c < d for d in candidates[i + 1:])
    ]
    separators = []
    covered = set(cliques[0]) if cliques else set()
    for c in cliques[1:]:
        separators.append(frozenset(c & covered))
        covered |= c
    return CliqueDecomposition(E.p, tuple(cliques), tuple(separators))


def enumerate_decomposable(p: int, q: int, cap: int = ENUMERATION_CAP) -> list:
    """All chordal edge sets on ``p`` nodes with at most ``q`` edges.

    Ordered by size, then lexicographically by sorted edge list.
    """
    if p > cap:
        raise EnumerationTooLargeError(f"enumeration too large: p={p} exceeds cap {cap}")
    if p < 0 or q < 0:
        raise InputError("p and q must be non-negative")
    pairs = list(combinations(range(p), 2))
    out = []
    for size in range(min(q, len(pairs)) + 1):
        for subset in combinations(pairs, size):
            E = EdgeSet(p, frozenset(subset))
            # graphs with fewer than 4 edges cannot contain a chordless cycle
            if size < 4 or is_chordal(E)[0]:
                out.append(E)
    return out


def count_subsets(p: int, q: int) -> int:
    m = comb(p, 2)
    return sum(comb(m, k) for k in range(min(q, m) + 1))


def chain_edges(p: int) -> EdgeSet:
    if p < 2:
        raise InputError("chain needs p >= 2")
    return EdgeSet(p, frozenset((j, j + 1) for j in range(p - 1)))


def double_chain_edges(p: int) -> EdgeSet:
    if p < 3:
        raise InputError("double chain needs p >= 3")
    pairs = {(j, j + 1) for j in range(p - 1)} | {(j, j + 2) for j in range(p - 2)}
    return EdgeSet(p, frozenset(pairs))


def edge_addition_constants(E0: EdgeSet, E: EdgeSet) -> list:
    """Beta-product constants for the likelihood ratio of nested decomposable models.

    Walks from ``E0`` to ``E`` one edge at a time through decomposable
    graphs. Each added edge lies in a unique maximal clique ``C`` of the
    enlarged graph; its constant is ``|C| - 1`` (separator size plus one).
    """
    if not E0 <= E:
        raise InputError("E0 must be a subset of E")
    if not (is_chordal(E0)[0] and is_chordal(E)[0]):
        raise NotDecomposableError("not decomposable: both models must be chordal")
    current = set(E0.edges)
    remaining = sorted(E.edges - E0.edges)
    constants = []
    while remaining:
        for e in remaining:
            G = EdgeSet(E.p, frozenset(current | {e}))
            if not is_chordal(G)[0]:
                continue
            holders = [c for c in clique_decomposition(G).cliques if e[0] in c and e[1] in c]
            if len(holders) != 1:
                continue
            constants.append(len(holders[0]) - 1)
            current.add(e)
            remaining.remove(e)
            break
        else:
            raise NotDecomposableError("no decomposable single-edge path between models")
    return constants
