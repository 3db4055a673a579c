"""Exact brute-force ground truth: minimum normalized k-cuts and strengths.

All partitions are enumerated as restricted-growth strings, so this is only
usable up to about ten vertices.  Values are exact ``Fraction`` objects;
arity-1 edges carry the ``INF`` sentinel.
"""
from __future__ import annotations

import math
import warnings
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .core import Hypergraph, Partition, WeightedHypergraph, connected_components
from .errors import NoCut, TooLarge

INF = math.inf
DEFAULT_ORACLE_BOUND = 10
HARD_ORACLE_BOUND = 12


@dataclass(frozen=True)
class KCutResult:
    value: Fraction
    partition: Partition
    k: int


@lru_cache(maxsize=None)
def _rgs_table(n: int) -> np.ndarray:
    """All restricted-growth strings of length ``n`` in lexicographic order."""
    rows = np.zeros((1, 1), dtype=np.int8)
    top = np.zeros(1, dtype=np.int8)
    for _ in range(1, n):
        counts = top.astype(np.int64) + 2
        parent = np.repeat(np.arange(len(rows)), counts)
        starts = np.cumsum(counts) - counts
        label = (np.arange(len(parent)) - np.repeat(starts, counts)).astype(np.int8)
        rows = np.concatenate([rows[parent], label[:, None]], axis=1)
        top = np.maximum(top[parent], label)
    rows.setflags(write=False)
    return rows


def _check_bound(n: int, max_n: int):
    if max_n > HARD_ORACLE_BOUND:
        raise ValueError(f"oracle bound cannot exceed {HARD_ORACLE_BOUND}")
    if n > max_n:
        raise TooLarge(f"{n} vertices exceeds oracle bound {max_n}")
    if n > DEFAULT_ORACLE_BOUND:
        warnings.warn(f"brute-force oracle on {n} vertices is slow", RuntimeWarning, stacklevel=3)


def _kcut_local(nv: int, edges: Counter, rng=None):
    """Minimum normalized k-cut on local vertices ``0..nv-1``.

    Returns ``(value, rgs_row)``.  Ties go to the most blocks, then the
    lexicographically smallest row, unless ``rng`` picks a random minimizer.
    """
    table = _rgs_table(nv)[1:]  # drop the one-block partition
    crossing = np.zeros(len(table), dtype=np.int64)
    for e, mult in edges.items():
        if len(e) < 2:
            continue
        lab = table[:, list(e)]
        crossing += (lab.max(axis=1) != lab.min(axis=1)) * mult
    k = table.max(axis=1).astype(np.int64) + 1
    value = None
    for kk in range(2, nv + 1):
        sel = k == kk
        if sel.any():
            cand = Fraction(int(crossing[sel].min()), kk - 1)
            if value is None or cand < value:
                value = cand
    hits = np.flatnonzero(crossing * value.denominator == value.numerator * (k - 1))
    if rng is not None:
        idx = int(rng.choice(hits))
    else:
        best_k = k[hits].max()
        idx = int(hits[k[hits] == best_k][0])
    return value, table[idx]


def min_normalized_kcut(H: Hypergraph, max_n: int = DEFAULT_ORACLE_BOUND) -> KCutResult:
    """Exhaustive Phi(H) with its tie-broken minimizing partition."""
    if H.n < 2:
        raise NoCut("a hypergraph on one vertex has no k-cut")
    _check_bound(H.n, max_n)
    counts = Counter({e: H.multiplicity(e) for e in H.edges})
    value, row = _kcut_local(H.n, counts)
    part = Partition.from_labels(row.tolist())
    return KCutResult(value, part, part.k)


def _strengths_local(nv: int, edges: Counter, memo: dict, rng=None) -> dict:
    """Strength of every local edge (arity >= 2) of the graph on ``0..nv-1``."""
    key = (nv, tuple(sorted(edges.items())))
    if rng is None and key in memo:
        return memo[key]
    out = {}
    if nv >= 2 and edges:
        phi, row = _kcut_local(nv, edges, rng)
        blocks: dict[int, list[int]] = {}
        for v, lab in enumerate(row.tolist()):
            blocks.setdefault(lab, []).append(v)
        inner: dict[int, Counter] = {}
        for e in edges:
            labs = {int(row[v]) for v in e}
            if len(labs) > 1:
                out[e] = phi
            else:
                inner.setdefault(labs.pop(), Counter())[e] = edges[e]
        for lab, sub in inner.items():
            verts = blocks[lab]
            index = {v: i for i, v in enumerate(verts)}
            local = Counter()
            back = {}
            for e, mult in sub.items():
                le = tuple(index[v] for v in e)
                local[le] = mult
                back[le] = e
            for le, lam in _strengths_local(len(verts), local, memo, rng).items():
                out[back[le]] = lam
    if rng is None:
        memo[key] = out
    return out


def _strength_map(vertices, edges: Counter, rng=None) -> dict:
    vertices = sorted(vertices)
    index = {v: i for i, v in enumerate(vertices)}
    local = Counter()
    back = {}
    result = {}
    for e, mult in edges.items():
        if len(e) < 2:
            result[e] = INF
            continue
        le = tuple(index[v] for v in e)
        local[le] += mult
        back[le] = e
    for le, lam in _strengths_local(len(vertices), local, {}, rng).items():
        result[back[le]] = lam
    return result


def compute_strengths(H: Hypergraph, max_n: int = DEFAULT_ORACLE_BOUND, rng=None) -> dict:
    """Recursive strength of every edge of ``H``.

    Passing a numpy ``Generator`` as ``rng`` replaces the deterministic
    tie-break by a uniformly random choice among minimizers.
    """
    _check_bound(H.n, max_n)
    counts = Counter({e: H.multiplicity(e) for e in H.edges})
    return _strength_map(range(H.n), counts, rng)


def component_strength(H: Hypergraph, S, max_n: int = DEFAULT_ORACLE_BOUND):
    """Minimum strength of the edges of H[S], computed inside H[S]."""
    S = frozenset(S)
    _check_bound(len(S), max_n)
    inner = Counter({e: H.multiplicity(e) for e in H.edges if S.issuperset(e)})
    lams = [lam for lam in _strength_map(S, inner).values()]
    return min(lams, default=INF)


def reciprocal_strength_sum(strengths: dict, H: Hypergraph | None = None) -> Fraction:
    total = Fraction(0)
    for e, lam in strengths.items():
        if lam != INF:
            mult = H.multiplicity(e) if H is not None else 1
            total += Fraction(mult) / lam
    return total


def num_components(H: Hypergraph) -> int:
    return connected_components(H.n, H.edges).k


def _rate_to_power_of_two(p: float) -> int:
    """Smallest ``j >= 0`` with ``2**-j <= p``, i.e. ``p`` rounded up to a power of two."""
    if p >= 1:
        return 0
    return math.floor(-math.log2(p))


def static_sparsify(H: Hypergraph, eps: float, seed, C: float = 8.0,
                    max_n: int = DEFAULT_ORACLE_BOUND) -> WeightedHypergraph:
    """Importance-sample each edge at ``min(1, C ln n / (eps^2 lambda_e))``.

    Rates are rounded up to a power of two so that weights stay integral.
    """
    strengths = compute_strengths(H, max_n)
    rng = np.random.default_rng(seed)
    logn = math.log(max(H.n, 2))
    weights = {}
    for e in sorted(H.edges):
        lam = strengths[e]
        if lam == INF or eps == 0:
            p = 1.0
        else:
            p = min(1.0, C * logn / (eps * eps * float(lam)))
        j = _rate_to_power_of_two(p)
        if j == 0 or rng.random() < 2.0 ** -j:
            weights[e] = 1 << j
    return WeightedHypergraph(H.n, H.r, weights)


def simple_threshold(n: int, eps: float, C: float = 8.0) -> float:
    """Recovery threshold ``C ln n / eps'^2`` with ``eps' = eps / ln^2(n/eps)``."""
    if eps <= 0:
        return INF
    eps_prime = eps / math.log(max(n, 2) / eps) ** 2
    return C * math.log(max(n, 2)) / eps_prime ** 2


def simple_sparsify(H: Hypergraph, eps: float, seed, C: float = 8.0, threshold=None,
                    max_n: int = DEFAULT_ORACLE_BOUND) -> WeightedHypergraph:
    """Reference level-by-level pipeline: keep low-strength edges, halve the rest."""
    thr = simple_threshold(H.n, eps, C) if threshold is None else threshold
    rng = np.random.default_rng(seed)
    weights = {e: 1 for e in H.edges if len(e) == 1}
    level = 0
    current = {e for e in H.edges if len(e) >= 2}
    while current:
        _check_bound(H.n, max_n)
        lams = _strength_map(range(H.n), Counter(current))
        low = {e for e in current if lams[e] <= thr}
        for e in low:
            weights[e] = 1 << level
        rest = sorted(current - low)
        keep = rng.random(len(rest)) < 0.5
        current = {e for e, kept in zip(rest, keep) if kept}
        level += 1
    return WeightedHypergraph(H.n, H.r, weights)
