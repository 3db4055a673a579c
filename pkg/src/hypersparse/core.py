"""Hypergraph values, canonical edge encoding, contraction and cut evaluation.

Vertices are dense integers in ``[0, n)``.  A hyperedge is a strictly
increasing tuple of vertex ids.  Everything here is an immutable value.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .errors import InvalidCut, InvalidEdge, NotASubgraph, TooLarge

MAX_VERTICES = 1 << 16
MAX_ARITY = 16
DEFAULT_EXHAUSTIVE_BOUND = 16

Hyperedge = tuple  # strictly increasing tuple[int, ...]


def vertex_width(n: int) -> int:
    """Bits per vertex field in the canonical encoding."""
    return max(1, math.ceil(math.log2(n))) if n > 1 else 1


def make_edge(vertices: Iterable[int], n: int, r: int | None = None) -> Hyperedge:
    """Canonicalize ``vertices`` into a hyperedge, validating bounds.

    Duplicated vertices are rejected rather than silently merged.
    """
    vs = tuple(sorted(int(v) for v in vertices))
    if not vs:
        raise InvalidEdge("empty hyperedge")
    if len(set(vs)) != len(vs):
        raise InvalidEdge(f"repeated vertex in {vs}")
    if vs[0] < 0 or vs[-1] >= n:
        raise InvalidEdge(f"vertex out of range [0, {n}) in {vs}")
    if r is not None and len(vs) > r:
        raise InvalidEdge(f"arity {len(vs)} exceeds r={r}")
    return vs


def encode_edge(edge: Hyperedge, n: int) -> bytes:
    """Canonical bytes: 16-bit arity followed by packed ``ceil(log2 n)``-bit fields."""
    w = vertex_width(n)
    packed = 0
    for v in edge:
        packed = (packed << w) | v
    nbytes = (len(edge) * w + 7) // 8
    return len(edge).to_bytes(2, "big") + packed.to_bytes(nbytes, "big")


def decode_edge(data: bytes, n: int) -> Hyperedge:
    if len(data) < 2:
        raise InvalidEdge("truncated edge encoding")
    arity = int.from_bytes(data[:2], "big")
    w = vertex_width(n)
    nbytes = (arity * w + 7) // 8
    if arity == 0 or len(data) != 2 + nbytes:
        raise InvalidEdge("edge encoding length mismatch")
    packed = int.from_bytes(data[2:], "big")
    if packed >> (arity * w):
        raise InvalidEdge("stray bits in edge encoding")
    mask = (1 << w) - 1
    vs = tuple((packed >> (w * (arity - 1 - j))) & mask for j in range(arity))
    if any(a >= b for a, b in zip(vs, vs[1:])) or vs[-1] >= n:
        raise InvalidEdge("non-canonical edge encoding")
    return vs


def incidence_coordinate(edge: Hyperedge, member: int, n: int) -> int:
    """Integer id of the (edge, member) pair; injective for fixed ``n``."""
    return int.from_bytes(b"\x01" + encode_edge(edge, n) + member.to_bytes(2, "big"), "big")


def decode_incidence(x: int, n: int, r: int) -> tuple[Hyperedge, int]:
    """Invert :func:`incidence_coordinate`; raises InvalidEdge on garbage."""
    if x <= 0:
        raise InvalidEdge("non-positive coordinate")
    raw = x.to_bytes((x.bit_length() + 7) // 8, "big")
    if raw[0] != 1 or len(raw) < 5:
        raise InvalidEdge("bad coordinate tag")
    edge = decode_edge(raw[1:-2], n)
    member = int.from_bytes(raw[-2:], "big")
    if len(edge) > r or member not in edge:
        raise InvalidEdge("inconsistent incidence coordinate")
    return edge, member


@dataclass(frozen=True)
class Hypergraph:
    """Unweighted hypergraph with 0/1 multiplicities.

    ``preimage`` is only populated by :func:`contract`: it records how many
    original edges collapsed onto each contracted edge, and cut values count
    each edge that many times.
    """

    n: int
    r: int
    edges: frozenset = frozenset()
    preimage: Mapping = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if not 1 <= self.n <= MAX_VERTICES:
            raise InvalidEdge(f"n={self.n} outside [1, {MAX_VERTICES}]")
        if not 1 <= self.r <= MAX_ARITY:
            raise InvalidEdge(f"r={self.r} outside [1, {MAX_ARITY}]")
        object.__setattr__(self, "edges", frozenset(self.edges))
        for e in self.edges:
            if make_edge(e, self.n, self.r) != e:
                raise InvalidEdge(f"edge {e} is not canonical")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Iterable[int]], r: int | None = None) -> "Hypergraph":
        canon = [make_edge(e, n) for e in edges]
        if r is None:
            r = max((len(e) for e in canon), default=1)
        return cls(n, r, frozenset(canon))

    def multiplicity(self, edge: Hyperedge) -> int:
        return self.preimage.get(edge, 1)

    def __len__(self):
        return len(self.edges)

    def __iter__(self):
        return iter(sorted(self.edges))


@dataclass(frozen=True)
class WeightedHypergraph:
    """Sparsifier output: edge -> positive weight (powers of two for the engines)."""

    n: int
    r: int
    weights: Mapping = field(default_factory=dict)

    def __post_init__(self):
        w = dict(self.weights)
        for e, x in w.items():
            if not x > 0:
                raise ValueError(f"non-positive weight {x} on {e}")
            make_edge(e, self.n, self.r)
        object.__setattr__(self, "weights", w)

    @property
    def edges(self) -> frozenset:
        return frozenset(self.weights)

    def multiplicity(self, edge: Hyperedge):
        return self.weights[edge]

    def __len__(self):
        return len(self.weights)

    def __eq__(self, other):
        if not isinstance(other, WeightedHypergraph):
            return NotImplemented
        return (self.n, self.r, self.weights) == (other.n, other.r, other.weights)

    @classmethod
    def unit(cls, H: Hypergraph) -> "WeightedHypergraph":
        return cls(H.n, H.r, {e: 1 for e in H.edges})


@dataclass(frozen=True)
class Partition:
    """Vertex partition; each block is labelled by its minimum vertex."""

    block_of: tuple

    def __post_init__(self):
        bo = tuple(int(b) for b in self.block_of)
        object.__setattr__(self, "block_of", bo)
        for v, b in enumerate(bo):
            if not 0 <= b <= v or bo[b] != b:
                raise ValueError(f"vertex {v} has invalid block label {b}")

    @property
    def n(self) -> int:
        return len(self.block_of)

    @classmethod
    def singletons(cls, n: int) -> "Partition":
        return cls(tuple(range(n)))

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[int]], n: int) -> "Partition":
        """Build from explicit blocks; unmentioned vertices become singletons."""
        label = list(range(n))
        seen = set()
        for block in blocks:
            block = sorted(block)
            if not block:
                continue
            if seen.intersection(block):
                raise ValueError("blocks overlap")
            seen.update(block)
            for v in block:
                label[v] = block[0]
        return cls(tuple(label))

    @classmethod
    def from_labels(cls, labels: Sequence) -> "Partition":
        """Relabel arbitrary per-vertex labels to min-vertex labels."""
        first = {}
        out = []
        for v, lab in enumerate(labels):
            out.append(first.setdefault(lab, v))
        return cls(tuple(out))

    def blocks(self) -> list[tuple]:
        groups: dict[int, list[int]] = {}
        for v, b in enumerate(self.block_of):
            groups.setdefault(b, []).append(v)
        return [tuple(groups[b]) for b in sorted(groups)]

    def labels(self) -> list[int]:
        return sorted(set(self.block_of))

    @property
    def k(self) -> int:
        return len(set(self.block_of))

    def refines(self, other: "Partition") -> bool:
        """True if every block of ``self`` lies inside a block of ``other``."""
        image = {}
        for b, ob in zip(self.block_of, other.block_of):
            if image.setdefault(b, ob) != ob:
                return False
        return True

    def join(self, other: "Partition") -> "Partition":
        """Finest common coarsening."""
        from .unionfind import UnionFind

        uf = UnionFind(self.n)
        for v in range(self.n):
            uf.union(v, self.block_of[v])
            uf.union(v, other.block_of[v])
        return uf.partition()


class StreamUpdate(NamedTuple):
    edge: Hyperedge
    delta: int


def _check_subset(n: int, S) -> frozenset:
    S = frozenset(int(v) for v in S)
    if not S or len(S) >= n or min(S) < 0 or max(S) >= n:
        raise InvalidCut("cut side must be a nonempty proper subset of V")
    return S


def cut_value(H, S):
    """Total weight of edges meeting both ``S`` and its complement."""
    S = _check_subset(H.n, S)
    total = 0
    for e in H.edges:
        inside = sum(1 for v in e if v in S)
        if 0 < inside < len(e):
            total += H.multiplicity(e)
    return total


def contract(H: Hypergraph, P: Partition) -> Hypergraph:
    """Contract each block of ``P`` to one vertex.

    Blocks are renumbered ``0..k-1`` in increasing label order.  Edges inside
    one block vanish; parallel images collapse to one edge whose preimage
    count is kept in ``preimage``.
    """
    if P.n != H.n:
        raise ValueError("partition size does not match hypergraph")
    index = {lab: i for i, lab in enumerate(P.labels())}
    counts: Counter = Counter()
    for e in H.edges:
        image = tuple(sorted({index[P.block_of[v]] for v in e}))
        if len(image) > 1:
            counts[image] += H.multiplicity(e)
    k = len(index)
    r = max((len(e) for e in counts), default=1)
    return Hypergraph(k, max(r, 1), frozenset(counts), dict(counts))


def compose(P: Partition, Q: Partition) -> Partition:
    """Partition of P's vertices obtained by grouping P's blocks by ``Q``."""
    labels = P.labels()
    if Q.n != len(labels):
        raise ValueError("Q must partition the blocks of P")
    index = {lab: i for i, lab in enumerate(labels)}
    return Partition.from_labels([Q.block_of[index[b]] for b in P.block_of])


@dataclass(frozen=True)
class SparsifierReport:
    passed: bool
    worst_ratio: float
    witness: frozenset | None
    cuts_checked: int
    eps: float

    def __str__(self):
        status = "PASS" if self.passed else "FAIL"
        wit = sorted(self.witness) if self.witness is not None else None
        return (
            f"{status} eps={self.eps} cuts={self.cuts_checked} "
            f"worst_ratio={self.worst_ratio:.6f} witness={wit}"
        )


def _edge_masks(edges) -> np.ndarray:
    return np.array([sum(1 << v for v in e) for e in edges], dtype=np.int64)


def all_cut_values(H, n: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized values of every cut ``S`` not containing vertex ``n-1``.

    Returns ``(masks, values)`` with ``masks`` ranging over ``1..2^(n-1)-1``.
    """
    n = H.n if n is None else n
    masks = np.arange(1, 1 << (n - 1), dtype=np.int64)
    values = np.zeros(masks.shape, dtype=np.float64)
    edges = sorted(H.edges)
    for emask, e in zip(_edge_masks(edges), edges):
        inside = masks & emask
        crossing = (inside != 0) & (inside != emask)
        values += crossing * float(H.multiplicity(e))
    return masks, values


def verify_sparsifier(H: Hypergraph, S: WeightedHypergraph, eps: float,
                      max_n: int = DEFAULT_EXHAUSTIVE_BOUND) -> SparsifierReport:
    """Exhaustively compare every cut of ``S`` against ``H``."""
    if H.n > max_n:
        raise TooLarge(f"n={H.n} exceeds exhaustive bound {max_n}")
    extra = S.edges - H.edges
    if extra:
        raise NotASubgraph(f"sparsifier edge {min(extra)} not in H")
    if H.n < 2:
        return SparsifierReport(True, 1.0, None, 0, eps)
    masks, hv = all_cut_values(H)
    _, sv = all_cut_values(S, H.n)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(hv > 0, sv / np.where(hv > 0, hv, 1), np.where(sv > 0, np.inf, 1.0))
    dev = np.abs(ratio - 1.0)
    worst = int(np.argmax(dev))
    lo, hi = 1.0 - eps, 1.0 + eps
    ok = bool(np.all((ratio >= lo - 1e-12) & (ratio <= hi + 1e-12)))
    witness = None
    if not ok or dev[worst] > 0:
        m = int(masks[worst])
        witness = frozenset(v for v in range(H.n) if m >> v & 1)
    return SparsifierReport(ok, float(ratio[worst]), witness, len(masks), eps)


def connected_components(n: int, edges: Iterable[Hyperedge]) -> Partition:
    from .unionfind import UnionFind

    uf = UnionFind(n)
    for e in edges:
        for a, b in itertools.pairwise(e):
            uf.union(a, b)
    return uf.partition()
