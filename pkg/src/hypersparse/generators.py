"""Synthetic update streams for tests, benchmarks and the ``gen`` command."""
from __future__ import annotations

import numpy as np

from .core import StreamUpdate
from .formats import StreamHeader


def _random_edge(rng, n: int, lo: int, hi: int) -> tuple:
    a = int(rng.integers(lo, hi + 1))
    return tuple(sorted(int(v) for v in rng.choice(n, size=a, replace=False)))


def _distinct_edges(rng, n: int, m: int, lo: int, hi: int, forbid=()) -> list:
    seen = set(forbid)
    out = []
    tries = 0
    while len(out) < m:
        e = _random_edge(rng, n, lo, hi)
        tries += 1
        if e not in seen:
            seen.add(e)
            out.append(e)
        elif tries > 50 * (m + 10):
            raise ValueError(f"cannot draw {m} distinct edges on n={n} with arity {lo}..{hi}")
    return out


def _check(n, r, lo):
    if n < 2:
        raise ValueError("need at least two vertices")
    if not 1 <= lo <= r or r > n:
        raise ValueError(f"arity range {lo}..{r} invalid for n={n}")


def uniform(n: int, m: int, r: int, seed, min_arity: int = 2):
    """``m`` distinct edges with arity uniform in ``min_arity..r``, insertions only."""
    _check(n, r, min_arity)
    rng = np.random.default_rng(seed)
    edges = _distinct_edges(rng, n, m, min_arity, r)
    return StreamHeader(n, r, 0), [StreamUpdate(e, 1) for e in edges]


def planted(n: int, blocks: int, m_in: int, m_cross: int, r: int, seed, min_arity: int = 2):
    """Dense edges inside ``blocks`` vertex groups plus sparse crossing edges.

    Returns ``(header, updates, groups)``.  The inner edges make each group far
    stronger than the crossing edges, which exercises contraction.
    """
    _check(n, r, min_arity)
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    groups = [sorted(int(v) for v in g) for g in np.array_split(perm, blocks)]
    edges = []
    seen: set = set()
    for g in groups:
        hi = min(r, len(g))
        if hi < min_arity:
            continue
        for _ in range(m_in):
            local = _random_edge(rng, len(g), min_arity, hi)
            e = tuple(sorted(g[i] for i in local))
            if e not in seen:
                seen.add(e)
                edges.append(e)
    label = {v: i for i, g in enumerate(groups) for v in g}
    drawn = 0
    tries = 0
    while drawn < m_cross and tries < 100 * (m_cross + 10):
        tries += 1
        e = _random_edge(rng, n, min_arity, r)
        if len({label[v] for v in e}) > 1 and e not in seen:
            seen.add(e)
            edges.append(e)
            drawn += 1
    order = rng.permutation(len(edges))
    return StreamHeader(n, r, 0), [StreamUpdate(edges[i], 1) for i in order], groups


def deletion_heavy(n: int, m: int, k: int, r: int, seed, min_arity: int = 2):
    """Insert ``m`` edges and delete ``k`` of them, each deletion after its insertion."""
    _check(n, r, min_arity)
    if not 0 <= k <= m:
        raise ValueError("need 0 <= k <= m")
    rng = np.random.default_rng(seed)
    edges = _distinct_edges(rng, n, m, min_arity, r)
    doomed = set(int(i) for i in rng.choice(m, size=k, replace=False))
    ups = [StreamUpdate(e, 1) for e in edges]
    # every deletion lands at a random position after its own insertion
    for i in sorted(doomed):
        pos = int(rng.integers(ups.index(StreamUpdate(edges[i], 1)) + 1, len(ups) + 1))
        ups.insert(pos, StreamUpdate(edges[i], -1))
    return StreamHeader(n, r, k), ups
