"""Linear connectivity sketch for hypergraphs with Boruvka recovery.

Every supernode keeps ``T`` independent l0 samplers over its signed incidence
vector.  Summing the sketches of a set of vertices cancels every edge inside
the set, so a sample from a merged sketch is always a crossing edge.
"""
from __future__ import annotations

import math

from ._bank import IncidenceBank, IncidenceSketch, sampler_params
from .core import Partition, decode_incidence
from .errors import IncompatibleSketches, InvalidEdge, RecoveryFailure
from .l0sampler import EMPTY, FOUND, depth_for_support
from .unionfind import UnionFind

DEFAULT_C_T = 4


def default_support(n: int, r: int) -> int:
    return max(n, 2) ** 4 * r


def default_repetitions(n: int, c_T: float = DEFAULT_C_T) -> int:
    return max(1, math.ceil(c_T * max(1, math.ceil(math.log2(max(n, 2))))))


class ConnSketch(IncidenceSketch):
    """Connectivity samplers of one supernode, keyed by repetition."""

    __slots__ = ()


class ConnBank(IncidenceBank):
    """Per-supernode connectivity sketches at one level."""

    sketch_type = ConnSketch
    domain = "conn"

    def __init__(self, n: int, r: int, master: int, level: int = 0,
                 reps: int | None = None, support: int | None = None):
        self.support = support or default_support(n, r)
        super().__init__(n, r, master, level, depth_for_support(self.support))
        self.reps = reps or default_repetitions(n)
        self._params = [sampler_params(master, self.domain, level, 0, t, self.depth)
                        for t in range(self.reps)]
        self._plist = list(enumerate(self._params))

    def params_for(self, edge):
        return self._plist

    def compatible(self, other: "ConnBank") -> bool:
        return (self.master, self.level, self.reps, self.depth, self.n) == \
            (other.master, other.level, other.reps, other.depth, other.n)


def conn_update(bank: ConnBank, e, delta: int) -> None:
    bank.update(e, delta)


def conn_merge(a: ConnSketch, b: ConnSketch) -> ConnSketch:
    """Repetition-wise sum of two sketches as a new sketch."""
    for key in a.samplers.keys() & b.samplers.keys():
        if not a.samplers[key].compatible(b.samplers[key]):
            raise IncompatibleSketches(f"repetition {key} seeded differently")
    for key in a.samplers.keys() ^ b.samplers.keys():
        s = a.samplers.get(key) or b.samplers.get(key)
        if s.material.domain != "conn":
            raise IncompatibleSketches("not a connectivity sketch")
    return a.copy().merge_into(b)


def _crossing_edge(x: int, bank: IncidenceBank, uf: UnionFind, comp: int):
    """Decode ``x`` into an edge leaving ``comp``, or None if it is garbage."""
    try:
        edge, _ = decode_incidence(x, bank.n, bank.r)
    except InvalidEdge:
        return None
    inside = sum(1 for v in edge if uf.find(v) == comp)
    if 0 < inside < len(edge):
        return edge
    return None


def recover_components(bank: ConnBank, base: Partition | None = None) -> Partition:
    """Connected components of the sketched hypergraph, coarsening ``base``.

    Round ``t`` of Boruvka samples repetition ``t`` of every live component,
    so no repetition is reused after the vector it sketches has changed.
    The bank is left untouched.
    """
    work = bank.copy()
    if base is not None:
        work.merge_partition(base)
    uf = work.owner
    for t in range(work.reps):
        found = []
        failing = set()
        for comp in sorted(work.sketches):
            smp = work.sketches[comp].samplers.get(t)
            if smp is None:
                continue
            res = smp.sample()
            if res.status == EMPTY:
                continue
            edge = _crossing_edge(res.coordinate, work, uf, comp) if res.status == FOUND else None
            if edge is None:
                failing.add(comp)
            else:
                found.append(edge)
        if not found and not failing:
            return work.partition()
        for edge in found:
            for v in edge[1:]:
                work.merge(edge[0], v)
    if work.sketches:
        raise RecoveryFailure(f"{len(work.sketches)} components still had crossing edges "
                              f"after {work.reps} rounds", level=bank.level,
                              phase=1, partial=work.partition())
    return work.partition()
