"""Sketch that recovers exactly the hyperedges of strength at most kappa.

Each supernode keeps banks ``b = 0..B`` of l0 samplers; an edge enters the
banks ``b <= g(e)`` where ``g`` is a geometric hash of the edge alone, so the
same edge lands in the same banks for every supernode and level.  Opening the
sketch peels: decoded edges are subtracted and the same sampler is asked
again, sparse banks first.  Between rounds the explicit recovered graph
certifies components of strength above ``kappa_hat``; these are contracted,
which cancels their unrecovered internal edges inside the merged sketches.
"""
from __future__ import annotations

import hashlib
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from ._bank import IncidenceBank, IncidenceSketch, sampler_params
from ._partition import DEFAULT_DP_BOUND, low_strength_edges, threshold_partition
from .connsketch import default_support
from .core import Partition, decode_incidence, encode_edge
from .errors import IncompatibleSketches, InvalidEdge, RecoveryFailure, TooLarge
from .l0sampler import EMPTY, FOUND, depth_for_support, keyed_hash, leading_zeros128

DEFAULT_C_S = 2
DEFAULT_C_D = 8


def default_strength_reps(kappa_hat, c_s: float = DEFAULT_C_S) -> int:
    return max(1, math.ceil(c_s * math.ceil(math.log2(float(kappa_hat) + 1))))


def bank_key(master: int) -> bytes:
    return hashlib.blake2b(b"kappa-sub" + (master & (2**64 - 1)).to_bytes(8, "big"),
                           digest_size=32).digest()


class StrengthSketch(IncidenceSketch):
    """Samplers of one supernode, keyed by ``(bank, repetition)``."""

    __slots__ = ()


class StrengthBank(IncidenceBank):
    """Per-supernode low-strength sketches at one level."""

    sketch_type = StrengthSketch
    domain = "kappa"

    def __init__(self, n: int, r: int, master: int, kappa, level: int = 0,
                 kappa_hat=None, reps: int | None = None, support: int | None = None):
        self.support = support or default_support(n, r)
        super().__init__(n, r, master, level, depth_for_support(self.support))
        self.kappa = Fraction(kappa)
        self.kappa_hat = Fraction(kappa_hat) if kappa_hat is not None else 2 * self.kappa
        if self.kappa_hat < self.kappa:
            raise ValueError("kappa_hat must be at least kappa")
        self.banks = max(1, math.ceil(math.log2(self.support)))
        self.reps = reps or default_strength_reps(self.kappa_hat)
        self._gkey = bank_key(master)
        self._plists: dict[int, list] = {}

    def bank_of(self, edge) -> int:
        """Deepest bank holding ``edge``."""
        h = keyed_hash(self._gkey, encode_edge(edge, self.n))
        return min(leading_zeros128(h), self.banks)

    def params_for(self, edge):
        g = self.bank_of(edge)
        plist = self._plists.get(g)
        if plist is None:
            plist = self._plists[g] = [
                ((b, t), sampler_params(self.master, self.domain, self.level, b, t, self.depth))
                for b in range(g + 1) for t in range(self.reps)]
        return plist

    def diagnostic(self) -> dict:
        """Non-zero tester count per bank, summed over supernodes."""
        out: Counter = Counter()
        for sk in self.sketches.values():
            for (b, _), smp in sk.samplers.items():
                out[b] += len(smp.buckets)
        return dict(sorted(out.items()))


def ss_update(bank: StrengthBank, e, delta: int) -> None:
    bank.update(e, delta)


def ss_subtract_edge(bank: StrengthBank, e) -> None:
    bank.update(e, -1)


def ss_merge(a: StrengthSketch, b: StrengthSketch) -> StrengthSketch:
    for key in a.samplers.keys() & b.samplers.keys():
        if not a.samplers[key].compatible(b.samplers[key]):
            raise IncompatibleSketches(f"sampler {key} seeded differently")
    return a.copy().merge_into(b)


@dataclass
class RecoveryState:
    partition: Partition
    recovered: dict = field(default_factory=dict)  # edge -> round
    rounds: int = 0
    low: frozenset = frozenset()


def _decode_block(work: StrengthBank, comp: int, budget: int, recovered: dict, rnd: int):
    """Peel up to ``budget`` crossing edges off ``comp``; returns (count, status)."""
    got = 0
    uf = work.owner
    for b in range(work.banks, -1, -1):
        t = 0
        while got < budget and t < work.reps:
            sk = work.sketches.get(comp)
            if sk is None:
                return got, EMPTY
            smp = sk.samplers.get((b, t))
            if smp is None:
                break
            res = smp.sample()
            if res.status == EMPTY:
                break
            edge = None
            if res.status == FOUND:
                try:
                    edge, _ = decode_incidence(res.coordinate, work.n, work.r)
                except InvalidEdge:
                    edge = None
                if edge is not None:
                    inside = sum(1 for v in edge if uf.find(v) == comp)
                    if not 0 < inside < len(edge) or edge in recovered:
                        edge = None
            if edge is None:
                t += 1
                continue
            recovered[edge] = rnd
            work.update(edge, -1)
            got += 1
        if got >= budget:
            return got, FOUND
    if comp not in work.sketches:
        return got, EMPTY
    return got, FOUND if got else "fail"


def _contracted_counts(edges, uf, index):
    counts: Counter = Counter()
    for e in edges:
        image = tuple(sorted({index[uf.find(v)] for v in e}))
        if len(image) > 1:
            counts[image] += 1
    return counts


def recover_state(bank: StrengthBank, base: Partition | None = None, kappa=None,
                  decode_budget: int | None = None, max_vertices: int = DEFAULT_DP_BOUND,
                  c_D: float = DEFAULT_C_D) -> RecoveryState:
    """Open ``bank`` and return the full recovery bookkeeping."""
    kappa = bank.kappa if kappa is None else Fraction(kappa)
    if bank.kappa_hat < kappa:
        raise ValueError("sketch threshold below requested kappa")
    budget = decode_budget or max(1, math.ceil(c_D * bank.kappa_hat))
    work = bank.copy()
    if base is not None:
        work.merge_partition(base)
    uf = work.owner
    recovered: dict = {}
    rnd = 0
    while True:
        rnd += 1
        fresh = 0
        stuck = []
        for comp in sorted(work.sketches):
            if comp not in work.sketches or uf.find(comp) != comp:
                continue
            got, status = _decode_block(work, comp, budget, recovered, rnd)
            fresh += got
            if status == "fail":
                stuck.append(comp)
        if not fresh:
            if stuck or work.sketches:
                raise RecoveryFailure(
                    f"level {bank.level}: {len(work.sketches)} blocks undecodable",
                    level=bank.level, phase=2, partial=frozenset(recovered))
            break
        # certify strong components of the explicit recovered graph
        labels = sorted({uf.find(v) for v in range(work.n)})
        index = {lab: i for i, lab in enumerate(labels)}
        counts = _contracted_counts(recovered, uf, index)
        blocks = threshold_partition(len(labels), counts, bank.kappa_hat,
                                     max_vertices, skip_large=True)
        for i, lab in enumerate(blocks):
            if lab != i:
                work.merge(labels[lab], labels[i])
    final = work.partition()
    labels = final.labels()
    index = {lab: i for i, lab in enumerate(labels)}
    crossing = [e for e in recovered if len({final.block_of[v] for v in e}) > 1]
    counts = _contracted_counts(crossing, uf, index)
    try:
        low_images = low_strength_edges(len(labels), counts, kappa, max_vertices)
    except TooLarge as exc:
        raise RecoveryFailure(str(exc), level=bank.level, phase=2,
                              partial=frozenset(recovered)) from exc
    low = frozenset(e for e in crossing
                    if tuple(sorted({index[final.block_of[v]] for v in e})) in low_images)
    return RecoveryState(final, recovered, rnd, low)


def recover_low_strength(bank: StrengthBank, base: Partition | None = None, kappa=None,
                         **kwargs) -> frozenset:
    """Edges of strength at most ``kappa`` in the sketched hypergraph over ``base``."""
    return recover_state(bank, base, kappa, **kwargs).low
