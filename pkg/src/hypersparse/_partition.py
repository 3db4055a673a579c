"""Threshold decomposition by subset dynamic programming.

For a threshold ``t`` the finest partition minimizing ``|E[P]| - t*|P|`` has
blocks whose induced strength exceeds ``t`` and crossing edges that are
exactly the edges of strength ``<= t``.  One DP over ``2^n`` vertex subsets
answers both questions, which is what sketch recovery needs; the
brute-force oracle stays the independent reference.
"""
from __future__ import annotations

from collections import Counter
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import TooLarge
from .unionfind import UnionFind

DEFAULT_DP_BOUND = 14


@lru_cache(maxsize=None)
def _bit_patterns(p: int) -> np.ndarray:
    idx = np.arange(1 << p, dtype=np.int64)
    return ((idx[:, None] >> np.arange(p, dtype=np.int64)) & 1).astype(np.int64)


def _subset_counts(nv: int, edges: Counter) -> np.ndarray:
    arr = np.zeros(1 << nv, dtype=np.int64)
    for e, mult in edges.items():
        arr[sum(1 << v for v in e)] += mult
    for b in range(nv):
        view = arr.reshape(-1, 2, 1 << b)
        view[:, 1, :] += view[:, 0, :]
    return arr


def _finest_minimizer(nv: int, edges: Counter, t: Fraction) -> list[int]:
    """Block label per vertex for a single connected instance."""
    full = (1 << nv) - 1
    internal = _subset_counts(nv, edges)
    key = (internal * t.denominator + t.numerator) * (nv + 1) + 1
    best = np.zeros(1 << nv, dtype=np.int64)
    choice = np.zeros(1 << nv, dtype=np.int64)
    masks = np.arange(1 << nv, dtype=np.int64)
    pop = np.array([bin(m).count("1") for m in range(1 << nv)])
    for c in range(1, nv + 1):
        S = masks[pop == c]
        low = S & -S
        rest = S ^ low
        # positions of the c-1 non-lowest bits of each S
        pos = np.zeros((len(S), c - 1), dtype=np.int64)
        tmp = rest.copy()
        for j in range(c - 1):
            lb = tmp & -tmp
            pos[:, j] = lb
            tmp ^= lb
        subs = _bit_patterns(c - 1) @ pos.T if c > 1 else np.zeros((1, len(S)), dtype=np.int64)
        T = subs | low[None, :]
        score = key[T] + best[S[None, :] ^ T]
        arg = np.argmax(score, axis=0)
        cols = np.arange(len(S))
        best[S] = score[arg, cols]
        choice[S] = T[arg, cols]
    labels = [0] * nv
    S = full
    while S:
        T = int(choice[S])
        lab = (T & -T).bit_length() - 1
        for v in range(nv):
            if T >> v & 1:
                labels[v] = lab
        S ^= T
    return labels


def threshold_partition(nv: int, edges: Counter, t, max_vertices: int = DEFAULT_DP_BOUND,
                        skip_large: bool = False) -> list[int]:
    """Finest minimizer of ``|E[P]| - t|P|`` as min-vertex labels.

    ``edges`` maps local vertex tuples to multiplicities.  Components are
    solved independently; any component above ``max_vertices`` raises
    TooLarge, or is left as singletons when ``skip_large`` is set.
    """
    t = Fraction(t)
    uf = UnionFind(nv)
    for e in edges:
        for a, b in zip(e, e[1:]):
            uf.union(a, b)
    groups: dict[int, list[int]] = {}
    for v in range(nv):
        groups.setdefault(uf.find(v), []).append(v)
    labels = list(range(nv))
    for verts in groups.values():
        if len(verts) == 1:
            continue
        if len(verts) > max_vertices:
            if skip_large:
                continue
            raise TooLarge(f"component of {len(verts)} vertices exceeds DP bound {max_vertices}")
        index = {v: i for i, v in enumerate(verts)}
        local = Counter()
        for e, mult in edges.items():
            if e[0] in index and len(e) > 1:
                local[tuple(index[v] for v in e)] += mult
        sub = _finest_minimizer(len(verts), local, t)
        for v, lab in zip(verts, sub):
            labels[v] = verts[lab]
    return labels


def low_strength_edges(nv: int, edges: Counter, t, max_vertices: int = DEFAULT_DP_BOUND) -> set:
    """Edges (arity >= 2) whose strength is at most ``t``."""
    labels = threshold_partition(nv, edges, t, max_vertices)
    return {e for e in edges if len(e) > 1 and len({labels[v] for v in e}) > 1}
