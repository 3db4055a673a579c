"""Per-supernode banks of l0 samplers over signed incidence coordinates.

Vertex ``v`` of edge ``e`` contributes ``|e|-1`` at coordinate ``(e, v)`` and
``-1`` at every other ``(e, u)``.  A supernode holding ``s`` of ``e``'s
vertices therefore sees ``|e|-s`` at its own members and ``-s`` elsewhere, which
is zero exactly when the edge is internal.  Both sketch families share this
layout and differ only in which samplers an edge touches.
"""
from __future__ import annotations

import struct
from collections import Counter

from .core import incidence_coordinate
from .l0sampler import L0Sampler, SamplerParams, SeedMaterial, coordinate_bytes
from .unionfind import UnionFind


class IncidenceSketch:
    """The samplers of one supernode, keyed by repetition (and bank)."""

    __slots__ = ("supernode", "samplers")

    def __init__(self, supernode: int, samplers: dict | None = None):
        self.supernode = supernode
        self.samplers: dict = samplers if samplers is not None else {}

    def is_empty(self) -> bool:
        return not self.samplers

    def copy(self):
        return type(self)(self.supernode, {k: s.copy() for k, s in self.samplers.items()})

    def merge_into(self, other: "IncidenceSketch"):
        for key, s in other.samplers.items():
            mine = self.samplers.get(key)
            if mine is None:
                self.samplers[key] = s.copy()
            else:
                mine.merge_into(s)
                if mine.is_empty():
                    del self.samplers[key]
        return self

    def __eq__(self, other):
        if not isinstance(other, IncidenceSketch):
            return NotImplemented
        return self.samplers == other.samplers

    def to_bytes(self) -> bytes:
        parts = [struct.pack(">HI", self.supernode, len(self.samplers))]
        for key in sorted(self.samplers):
            parts.append(struct.pack(">HH", *_pair(key)))
            blob = self.samplers[key].to_bytes()
            parts.append(struct.pack(">I", len(blob)))
            parts.append(blob)
        return b"".join(parts)


def _pair(key):
    return key if isinstance(key, tuple) else (0, key)


class IncidenceBank:
    """Sketches of the live supernodes at one level.

    Subclasses define :meth:`params_for`, the samplers an edge touches.
    Supernodes only ever merge; empty sketches are not stored.
    """

    sketch_type = IncidenceSketch
    domain = "bank"

    def __init__(self, n: int, r: int, master: int, level: int, depth: int):
        self.n = n
        self.r = r
        self.master = master
        self.level = level
        self.depth = depth
        self.owner = UnionFind(n)
        self.sketches: dict[int, IncidenceSketch] = {}
        self.live_samplers = 0  # running count of non-empty samplers

    def params_for(self, edge) -> list:
        raise NotImplementedError

    def supernode(self, v: int) -> int:
        return self.owner.find(v)

    def partition(self):
        return self.owner.partition()

    def _coordinate_terms(self, edge, plist):
        terms = []
        for u in edge:
            x = incidence_coordinate(edge, u, self.n)
            xb = coordinate_bytes(x)
            powers: dict = {}
            row = []
            for key, p in plist:
                zx = powers.get(p.z)
                if zx is None:
                    zx = powers[p.z] = p.power(x)
                row.append((key, p, p.cell(xb), zx))
            terms.append((u, x, row))
        return terms

    def update(self, edge, delta: int) -> None:
        """Add ``delta`` copies of ``edge`` to every touched supernode sketch."""
        if len(edge) < 2 or not delta:
            return
        plist = self.params_for(edge)
        if not plist:
            return
        owner = {v: self.owner.find(v) for v in edge}
        counts = Counter(owner.values())
        if len(counts) == 1:
            return  # internal to one supernode: the row sum is zero
        a = len(edge)
        for u, x, per_key in self._coordinate_terms(edge, plist):
            for S, s in counts.items():
                coef = (a - s if owner[u] == S else -s) * delta
                sk = self.sketches.get(S)
                if sk is None:
                    sk = self.sketches[S] = self.sketch_type(S)
                samplers = sk.samplers
                for key, p, cell, zx in per_key:
                    smp = samplers.get(key)
                    if smp is None:
                        smp = samplers[key] = L0Sampler.__new__(L0Sampler)
                        smp.params = p
                        smp.buckets = {}
                        self.live_samplers += 1
                    smp.add_term(cell, x, zx, coef)
                    if not smp.buckets:
                        del samplers[key]
                        self.live_samplers -= 1
        for S in counts:
            sk = self.sketches.get(S)
            if sk is not None and not sk.samplers:
                del self.sketches[S]

    def merge(self, a: int, b: int):
        """Merge the supernodes containing ``a`` and ``b``; returns the kept root."""
        res = self.owner.union(a, b)
        if res is None:
            return self.owner.find(a)
        kept, gone = res
        other = self.sketches.pop(gone, None)
        if other is not None:
            mine = self.sketches.get(kept)
            if mine is None:
                other.supernode = kept
                self.sketches[kept] = other
            else:
                before = len(mine.samplers) + len(other.samplers)
                mine.merge_into(other)
                self.live_samplers += len(mine.samplers) - before
                if mine.is_empty():
                    del self.sketches[kept]
        return kept

    def merge_partition(self, P) -> None:
        """Coarsen the supernodes so that every block of ``P`` is inside one."""
        for v, lab in enumerate(P.block_of):
            if lab != v:
                self.merge(lab, v)

    def copy(self):
        b = type(self).__new__(type(self))
        b.__dict__.update(self.__dict__)
        b.owner = self.owner.copy()
        b.sketches = {S: sk.copy() for S, sk in self.sketches.items()}
        return b

    def nonempty_samplers(self) -> int:
        return sum(len(sk.samplers) for sk in self.sketches.values())

    def live_supernodes(self) -> int:
        return sum(1 for v in range(self.n) if self.owner.parent[v] == v)

    def to_bytes(self) -> bytes:
        head = self.domain.encode()
        parts = [struct.pack(">B", len(head)), head,
                 struct.pack(">IBQHBI", self.n, self.r, self.master & (2**64 - 1),
                             self.level, self.depth, len(self.sketches))]
        parts.append(struct.pack(f">{self.n}H", *self.partition().block_of))
        for S in sorted(self.sketches):
            blob = self.sketches[S].to_bytes()
            parts.append(struct.pack(">I", len(blob)))
            parts.append(blob)
        return b"".join(parts)

    def __eq__(self, other):
        if not isinstance(other, IncidenceBank):
            return NotImplemented
        return self.to_bytes() == other.to_bytes()


def sampler_params(master: int, domain: str, level: int, bank: int, rep: int, depth: int):
    return SamplerParams(SeedMaterial(master, domain, level, bank, rep), depth)
