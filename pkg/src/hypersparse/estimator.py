"""scikit-learn style wrapper around the sparsification engines."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .core import Hypergraph, StreamUpdate, WeightedHypergraph, make_edge
from .oracle import simple_sparsify, static_sparsify
from .stream import MODES, EngineConfig, make_engine

_ALL_MODES = ("static", "simple") + MODES


def incidence_to_edges(X) -> list:
    """Rows of a 0/1 incidence matrix (edges x vertices) as hyperedges."""
    A = check_array(X, accept_sparse=False, dtype=None, ensure_min_samples=0)
    if A.size and not np.isin(A, (0, 1)).all():
        raise ValueError("incidence matrix must be 0/1")
    return [tuple(int(v) for v in np.flatnonzero(row)) for row in A]


def check_updates(X, n: int | None = None, r: int | None = None):
    """Normalize ``X`` into ``(n, r, updates)``.

    Accepts a Hypergraph, a 2-D incidence array, an iterable of hyperedges
    (treated as insertions) or an iterable of ``(edge, delta)`` pairs.
    """
    if isinstance(X, Hypergraph):
        return X.n, X.r, [StreamUpdate(e, 1) for e in sorted(X.edges)]
    if isinstance(X, np.ndarray) or hasattr(X, "shape"):
        edges = incidence_to_edges(X)
        n = X.shape[1] if n is None else n
        raw = [(e, 1) for e in edges if e]
    else:
        raw = []
        for item in X:
            if (len(item) == 2 and not isinstance(item[0], (int, np.integer))
                    and item[1] in (1, -1)):
                raw.append((tuple(item[0]), int(item[1])))
            else:
                raw.append((tuple(item), 1))
    if n is None:
        n = 1 + max((max(e) for e, _ in raw if e), default=1)
    if r is None:
        r = max((len(e) for e, _ in raw), default=1)
    ups = [StreamUpdate(make_edge(e, n, r), d) for e, d in raw]
    return n, r, ups


class HypergraphSparsifier(TransformerMixin, BaseEstimator):
    """Stream a hypergraph through one engine and keep the weighted sparsifier.

    ``transform`` maps a hypergraph to the vector of sparsifier weights of
    its edges (sorted order, 0 for edges that were not kept).
    """

    def __init__(self, mode="insertion", epsilon=0.5, seed=0, k=None, n_vertices=None,
                 rank=None, profile="desk", overrides=None):
        self.mode = mode
        self.epsilon = epsilon
        self.seed = seed
        self.k = k
        self.n_vertices = n_vertices
        self.rank = rank
        self.profile = profile
        self.overrides = overrides

    def _validate_params(self):
        if self.mode not in _ALL_MODES:
            raise ValueError(f"mode must be one of {_ALL_MODES}, got {self.mode!r}")
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        if self.mode == "bounded" and (self.k is None or self.k < 1):
            raise ValueError("bounded mode needs k >= 1")

    def fit(self, X, y=None):
        self._validate_params()
        n, r, ups = check_updates(X, self.n_vertices, self.rank)
        if self.mode in ("static", "simple"):
            live = set()
            for e, d in ups:
                (live.add if d > 0 else live.discard)(e)
            H = Hypergraph(n, r, frozenset(live))
            fn = static_sparsify if self.mode == "static" else simple_sparsify
            self.sparsifier_ = fn(H, self.epsilon, self.seed)
            self.engine_ = None
        else:
            config = EngineConfig(profile=self.profile).with_overrides(self.overrides or {})
            engine = make_engine(self.mode, n, r, self.epsilon, self.seed, config, self.k or 0)
            engine.feed(ups)
            self.sparsifier_ = engine.recover()
            self.engine_ = engine
        self.n_vertices_, self.rank_ = n, r
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "sparsifier_")
        n, _, ups = check_updates(X, self.n_vertices_, None)
        if n != self.n_vertices_:
            raise ValueError(f"expected n={self.n_vertices_}, got {n}")
        edges = sorted({e for e, d in ups if d > 0})
        w = self.sparsifier_.weights
        return np.array([w.get(e, 0) for e in edges], dtype=np.int64)

    @property
    def weighted_(self) -> WeightedHypergraph:
        check_is_fitted(self, "sparsifier_")
        return self.sparsifier_

    def space_report(self):
        check_is_fitted(self, "sparsifier_")
        if self.engine_ is None:
            raise AttributeError("offline modes keep no sketches")
        return self.engine_.space_report()
