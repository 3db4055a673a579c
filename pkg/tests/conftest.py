import numpy as np
import pytest

from hypersparse import Hypergraph, connected_components


def random_edges(rng, n, m, r, min_arity=2):
    """Up to ``m`` distinct random edges (fewer if the space is small)."""
    edges = set()
    for _ in range(20 * m):
        if len(edges) == m:
            break
        a = int(rng.integers(min_arity, r + 1))
        edges.add(tuple(sorted(int(v) for v in rng.choice(n, size=a, replace=False))))
    return sorted(edges)


def random_hypergraph(rng, n, m, r, min_arity=2):
    return Hypergraph.from_edges(n, random_edges(rng, n, m, r, min_arity), r)


def random_connected(rng, n, m, r):
    """Random hypergraph forced connected by a spanning path of pairs."""
    perm = [int(v) for v in rng.permutation(n)]
    edges = {tuple(sorted(p)) for p in zip(perm, perm[1:])}
    edges |= set(random_edges(rng, n, max(0, m - len(edges)), r))
    H = Hypergraph.from_edges(n, edges, r)
    assert connected_components(n, H.edges).k == 1
    return H


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# PASS/FAIL lines from the acceptance suite, repeated in the terminal summary
ACCEPTANCE: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
