import itertools

import numpy as np
import pytest


def random_spd(p, rng, cond=10.0):
    q, _ = np.linalg.qr(rng.standard_normal((p, p)))
    w = np.exp(rng.uniform(0, np.log(cond), p))
    return (q * w) @ q.T


def chordal_brute_force(p, edges):
    """True iff no induced cycle of length >= 4 exists (exhaustive over vertex subsets)."""
    adj = {v: set() for v in range(p)}
    for j, k in edges:
        adj[j].add(k)
        adj[k].add(j)
    for size in range(4, p + 1):
        for sub in itertools.combinations(range(p), size):
            s = set(sub)
            if not all(len(adj[v] & s) == 2 for v in sub):
                continue
            seen, stack = {sub[0]}, [sub[0]]
            while stack:
                v = stack.pop()
                for u in adj[v] & s:
                    if u not in seen:
                        seen.add(u)
                        stack.append(u)
            if len(seen) == size:
                return False
    return True


def maximal_cliques_brute_force(p, edges):
    adj = {v: set() for v in range(p)}
    for j, k in edges:
        adj[j].add(k)
        adj[k].add(j)
    cliques = []
    for size in range(1, p + 1):
        for sub in itertools.combinations(range(p), size):
            if all(b in adj[a] for a, b in itertools.combinations(sub, 2)):
                cliques.append(frozenset(sub))
    return {c for c in cliques if not any(c < d for d in cliques)}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def acceptance_report():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
