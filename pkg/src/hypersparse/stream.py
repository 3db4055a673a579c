"""Streaming sparsification engines.

Three engines share one layout: per level ``i`` a bank of low-strength
sketches over the live supernodes of that level, filled by the edges whose
``L_kappa`` level is at least ``i``.

* insertion: component trackers (union-find per level, fed by ``L_cc``) merge
  the level ``i - delta`` sketches whenever level ``i`` merges; merges are
  final because nothing is ever deleted.
* bounded: the same, plus connectivity sketches merged at offset
  ``delta_k``.  Trackers only see insertions.  Recovery first rebuilds the
  per-level components from the connectivity sketches, top level down.
* dynamic: no merging at all, every vertex keeps its own sketches.

Recovery opens level 0 first, keeps the edges of strength at most ``kappa``
with weight ``2^i`` and subtracts them from every higher level they reached.
"""
from __future__ import annotations

import hashlib
import math
from collections import Counter
from dataclasses import asdict, dataclass, field, fields, replace
from fractions import Fraction
from typing import Iterable

from .connsketch import ConnBank, DEFAULT_C_T, default_repetitions, recover_components
from .core import (Hypergraph, Partition, StreamUpdate, WeightedHypergraph,
                   connected_components, encode_edge, make_edge)
from .errors import DeletionBudgetExceeded, StreamTooLong
from .l0sampler import keyed_hash, leading_zeros128
from .oracle import simple_sparsify, static_sparsify
from .strengthsketch import (DEFAULT_C_D, DEFAULT_C_S, StrengthBank, default_strength_reps,
                             recover_state)
from .unionfind import UnionFind

__all__ = [
    "EngineConfig", "ResolvedConfig", "LevelAssignment", "ComponentTracker",
    "InsertionEngine", "BoundedEngine", "DynamicEngine", "SpaceReport",
    "find_strong_components_offline", "make_engine", "run_stream", "manifest_text",
    "static_sparsify", "simple_sparsify",
]

PROFILES = ("paper", "desk")
MODES = ("insertion", "bounded", "dynamic")
DESK_KAPPA = 16
DESK_C_DELTA = 3
PAPER_C_DELTA = 20


@dataclass(frozen=True)
class EngineConfig:
    """User-facing knobs; ``None`` means "use the profile default"."""

    profile: str = "desk"
    C: float = 1.0
    kappa_exponent: float = 5.0
    kappa: str | None = None
    c_delta: float | None = None
    c_T: float = DEFAULT_C_T
    c_s: float = DEFAULT_C_S
    c_D: float = DEFAULT_C_D
    kappa_hat_factor: float = 2.0
    M: int | None = None
    L_max: int | None = None

    def with_overrides(self, pairs: dict) -> "EngineConfig":
        known = {f.name: f for f in fields(self)}
        updates = {}
        for key, raw in pairs.items():
            if key not in known:
                raise ValueError(f"unknown setting {key!r}")
            if key in ("profile", "kappa"):
                updates[key] = str(raw)
            elif key in ("M", "L_max"):
                updates[key] = int(raw)
            else:
                updates[key] = float(raw)
        return replace(self, **updates)

    def resolve(self, n: int, r: int, eps: float, k: int = 0) -> "ResolvedConfig":
        if self.profile not in PROFILES:
            raise ValueError(f"profile must be one of {PROFILES}")
        if not 0 < eps < 1:
            raise ValueError("eps must lie in (0, 1)")
        logn = max(1, math.ceil(math.log2(max(n, 2))))
        if self.kappa is not None:
            kappa = Fraction(self.kappa)
        elif self.profile == "desk":
            kappa = Fraction(DESK_KAPPA)
        else:
            value = self.C * math.log(max(n, 2) / eps) ** self.kappa_exponent / eps ** 2
            kappa = Fraction(math.ceil(value))
        if kappa <= 0:
            raise ValueError("kappa must be positive")
        c_delta = self.c_delta
        if c_delta is None:
            c_delta = DESK_C_DELTA if self.profile == "desk" else PAPER_C_DELTA
        kappa_hat = Fraction(self.kappa_hat_factor).limit_denominator(1000) * kappa
        M = self.M or max(n, 2) ** 4 * r
        L_max = self.L_max if self.L_max is not None else math.ceil(r * math.log2(max(n, 2)))
        nk = max(n * max(k, 1), 2)
        return ResolvedConfig(
            profile=self.profile, n=n, r=r, k=k, eps=eps, kappa=kappa, kappa_hat=kappa_hat,
            delta=math.ceil(c_delta * logn),
            delta_k=math.ceil(c_delta * max(1, math.ceil(math.log2(nk)))),
            c_delta=c_delta, c_T=self.c_T, T=default_repetitions(n, self.c_T),
            c_s=self.c_s, T_s=default_strength_reps(kappa_hat, self.c_s),
            c_D=self.c_D, D=max(1, math.ceil(self.c_D * kappa_hat)),
            M=M, L_max=L_max, C=self.C, kappa_exponent=self.kappa_exponent)


@dataclass(frozen=True)
class ResolvedConfig:
    profile: str
    n: int
    r: int
    k: int
    eps: float
    kappa: Fraction
    kappa_hat: Fraction
    delta: int
    delta_k: int
    c_delta: float
    c_T: float
    T: int
    c_s: float
    T_s: int
    c_D: float
    D: int
    M: int
    L_max: int
    C: float
    kappa_exponent: float

    def items(self):
        for key, value in asdict(self).items():
            yield key, str(value)


class LevelAssignment:
    """Three independent geometric levels per edge, derived from the master seed."""

    DOMAINS = ("cc", "conn", "kappa")

    def __init__(self, master: int, n: int, L_max: int):
        self.master = master
        self.n = n
        self.L_max = L_max
        raw = (master & (2**64 - 1)).to_bytes(8, "big")
        self._keys = [hashlib.blake2b(b"level-" + d.encode() + raw, digest_size=32).digest()
                      for d in self.DOMAINS]

    def level(self, domain: str, edge) -> int:
        key = self._keys[self.DOMAINS.index(domain)]
        return min(self.L_max, leading_zeros128(keyed_hash(key, encode_edge(edge, self.n))))

    def levels(self, edge) -> tuple[int, int, int]:
        data = encode_edge(edge, self.n)
        return tuple(min(self.L_max, leading_zeros128(keyed_hash(k, data))) for k in self._keys)


class ComponentTracker:
    """Union-find per level; level ``i`` sees the edges with ``L_cc >= i``."""

    def __init__(self, n: int, L_max: int):
        self.uf = [UnionFind(n) for _ in range(L_max + 1)]
        self.merges = 0

    def insert(self, edge, top: int) -> list[tuple[int, int, int]]:
        """Union ``edge`` into levels ``0..top``; returns ``(level, kept, absorbed)``."""
        out = []
        for i in range(top + 1):
            uf = self.uf[i]
            for v in edge[1:]:
                res = uf.union(edge[0], v)
                if res is not None:
                    out.append((i, *res))
        self.merges += len(out)
        return out

    def partition(self, i: int) -> Partition:
        return self.uf[i].partition()


def find_strong_components_offline(H: Hypergraph, seed: int, L_max: int | None = None) -> list:
    """Components of the subsampled hypergraphs, one partition per level.

    Uses the same ``L_cc`` hash as the online trackers, so for a shared seed
    the two agree exactly.
    """
    if L_max is None:
        L_max = math.ceil(H.r * math.log2(max(H.n, 2)))
    la = LevelAssignment(seed, H.n, L_max)
    lv = {e: la.level("cc", e) for e in H.edges if len(e) > 1}
    return [connected_components(H.n, [e for e, l in lv.items() if l >= i])
            for i in range(L_max + 1)]


@dataclass
class LevelSpace:
    level: int
    live_components: int
    nonempty_samplers: int
    empty_markers: int
    bytes: int


@dataclass
class SpaceReport:
    levels: list = field(default_factory=list)
    nonempty_samplers: int = 0
    bytes: int = 0
    live_components: int = 0
    peak_nonempty_samplers: int = 0

    def rows(self):
        for lv in self.levels:
            yield asdict(lv)


class _Engine:
    mode = "base"
    uses_trackers = True

    def __init__(self, n: int, r: int, eps: float, seed: int, config: EngineConfig | None = None,
                 k: int = 0):
        self.config = config or EngineConfig()
        self.cfg = self.config.resolve(n, r, eps, k)
        self.n, self.r, self.eps, self.seed, self.k = n, r, eps, seed, k
        L = self.cfg.L_max
        self.assign = LevelAssignment(seed, n, L)
        self.strength = [StrengthBank(n, r, seed, self.cfg.kappa, level=i,
                                      kappa_hat=self.cfg.kappa_hat, reps=self.cfg.T_s,
                                      support=self.cfg.M) for i in range(L + 1)]
        self.tracker = ComponentTracker(n, L) if self.uses_trackers else None
        self.singles: Counter = Counter()
        self.updates = 0
        self.deletions = 0
        self.peak = 0
        self.last_levels: list | None = None

    # ingestion -----------------------------------------------------------
    def _edge(self, edge):
        return make_edge(edge, self.n, self.r)

    def _tick(self):
        self.updates += 1
        if self.updates > 2 ** self.cfg.L_max:
            raise StreamTooLong(f"stream exceeds 2^{self.cfg.L_max} updates")

    def _track_peak(self):
        total = self.nonempty_samplers()
        if total > self.peak:
            self.peak = total

    def nonempty_samplers(self) -> int:
        return sum(b.live_samplers for b in self._all_banks())

    def _all_banks(self):
        return self.strength

    def _insert_sketches(self, edge, lc, lconn, lk):
        for i in range(lk + 1):
            self.strength[i].update(edge, 1)
        if self.tracker is not None:
            d = self.cfg.delta
            for i, kept, gone in self.tracker.insert(edge, lc):
                if i >= d:
                    self.strength[i - d].merge(kept, gone)

    def update(self, u) -> None:
        edge, delta = u
        edge = self._edge(edge)
        if delta not in (1, -1):
            raise ValueError("delta must be +1 or -1")
        self._tick()
        if delta < 0:
            self._on_delete()
        if len(edge) == 1:
            self.singles[edge] += delta
            return
        lc, lconn, lk = self.assign.levels(edge)
        if delta > 0:
            self._insert_sketches(edge, lc, lconn, lk)
        else:
            self._delete_sketches(edge, lc, lconn, lk)
        self._track_peak()

    def insert(self, edge) -> None:
        self.update(StreamUpdate(edge, 1))

    def delete(self, edge) -> None:
        self.update(StreamUpdate(edge, -1))

    def feed(self, updates: Iterable) -> "_Engine":
        for u in updates:
            self.update(u)
        return self

    def _on_delete(self):
        raise DeletionBudgetExceeded("insertion-only engine received a deletion")

    def _delete_sketches(self, edge, lc, lconn, lk):
        for i in range(lk + 1):
            self.strength[i].update(edge, -1)

    # recovery ------------------------------------------------------------
    def _strength_bases(self) -> list:
        return [None] * (self.cfg.L_max + 1)

    def recover(self) -> WeightedHypergraph:
        """Open every level and return the weighted sparsifier."""
        bases = self._strength_bases()
        work = [b.copy() for b in self.strength]
        weights = {e: 1 for e, c in sorted(self.singles.items()) if c > 0}
        levels = []
        for i, bank in enumerate(work):
            if bases[i] is not None:
                bank.merge_partition(bases[i])
            if bank.sketches:
                F = recover_state(bank, kappa=self.cfg.kappa, decode_budget=self.cfg.D).low
            else:
                F = frozenset()
            levels.append(F)
            for e in sorted(F):
                weights[e] = 1 << i
                top = self.assign.level("kappa", e)
                for j in range(i + 1, top + 1):
                    work[j].update(e, -1)
        self.last_levels = levels
        return WeightedHypergraph(self.n, self.r, weights)

    # accounting ----------------------------------------------------------
    def _level_banks(self, i):
        return [self.strength[i]]

    def space_report(self) -> SpaceReport:
        rep = SpaceReport(peak_nonempty_samplers=max(self.peak, self.nonempty_samplers()))
        for i in range(self.cfg.L_max + 1):
            banks = self._level_banks(i)
            live = markers = samplers = nbytes = 0
            for b in banks:
                roots = b.live_supernodes()
                live += roots
                markers += roots - len(b.sketches)
                samplers += b.live_samplers
                nbytes += sum(len(sk.to_bytes()) for sk in b.sketches.values())
            nbytes += (markers + 7) // 8
            rep.levels.append(LevelSpace(i, live, samplers, markers, nbytes))
            rep.nonempty_samplers += samplers
            rep.bytes += nbytes
            rep.live_components += live
        return rep

    def manifest(self) -> str:
        return manifest_text(self)


class InsertionEngine(_Engine):
    mode = "insertion"


class BoundedEngine(_Engine):
    mode = "bounded"

    def __init__(self, n, r, k, eps, seed, config=None):
        if int(k) != k or k < 1:
            raise ValueError("deletion budget k must be a positive integer")
        super().__init__(n, r, eps, seed, config, int(k))
        self.conn = [ConnBank(n, r, seed, level=i, reps=self.cfg.T, support=self.cfg.M)
                     for i in range(self.cfg.L_max + 1)]
        self.last_components: list | None = None

    def _all_banks(self):
        return self.strength + self.conn

    def _level_banks(self, i):
        return [self.strength[i], self.conn[i]]

    def _on_delete(self):
        self.deletions += 1
        if self.deletions > self.k:
            raise DeletionBudgetExceeded(f"deletion {self.deletions} exceeds budget k={self.k}")

    def _insert_sketches(self, edge, lc, lconn, lk):
        for i in range(lk + 1):
            self.strength[i].update(edge, 1)
        for i in range(lconn + 1):
            self.conn[i].update(edge, 1)
        d, dk = self.cfg.delta, self.cfg.delta_k
        for i, kept, gone in self.tracker.insert(edge, lc):
            if i >= d:
                self.strength[i - d].merge(kept, gone)
            if i >= dk:
                self.conn[i - dk].merge(kept, gone)

    def _delete_sketches(self, edge, lc, lconn, lk):
        for i in range(lk + 1):
            self.strength[i].update(edge, -1)
        for i in range(lconn + 1):
            self.conn[i].update(edge, -1)

    def recover_components(self) -> list:
        """Per-level components rebuilt from the connectivity sketches, top level first."""
        L = self.cfg.L_max
        comps: list = [None] * (L + 1)
        for i in range(L, -1, -1):
            bank = self.conn[i]
            comps[i] = recover_components(bank, comps[i + 1] if i < L else None)
        self.last_components = comps
        return comps

    def _strength_bases(self):
        comps = self.recover_components()
        d = self.cfg.delta
        return [comps[i + d] if i + d <= self.cfg.L_max else None
                for i in range(self.cfg.L_max + 1)]


class DynamicEngine(_Engine):
    mode = "dynamic"
    uses_trackers = False

    def __init__(self, n, r, eps, seed, config=None, k: int = 0):
        super().__init__(n, r, eps, seed, config, k)

    def _on_delete(self):
        self.deletions += 1


def make_engine(mode: str, n: int, r: int, eps: float, seed: int,
                config: EngineConfig | None = None, k: int = 0):
    if mode == "insertion":
        return InsertionEngine(n, r, eps, seed, config)
    if mode == "bounded":
        return BoundedEngine(n, r, k, eps, seed, config)
    if mode == "dynamic":
        return DynamicEngine(n, r, eps, seed, config, k)
    raise ValueError(f"mode must be one of {MODES}")


def run_stream(mode: str, n: int, r: int, updates: Iterable, eps: float, seed: int,
               config: EngineConfig | None = None, k: int = 0):
    """Feed ``updates`` once and recover; returns ``(sparsifier, engine)``."""
    engine = make_engine(mode, n, r, eps, seed, config, k)
    engine.feed(updates)
    return engine.recover(), engine


def manifest_text(engine) -> str:
    lines = [f"mode={engine.mode}", f"seed={engine.seed}"]
    lines += [f"{key}={value}" for key, value in engine.cfg.items()]
    return "\n".join(lines) + "\n"


# functional surface

def insertion_engine_new(n, r, eps, seed, config=None) -> InsertionEngine:
    return InsertionEngine(n, r, eps, seed, config)


def insertion_engine_insert(engine: InsertionEngine, e) -> None:
    engine.insert(e)


def insertion_engine_recover(engine: InsertionEngine) -> WeightedHypergraph:
    return engine.recover()


def bounded_engine_new(n, r, k, eps, seed, config=None) -> BoundedEngine:
    return BoundedEngine(n, r, k, eps, seed, config)


def bounded_engine_update(engine: BoundedEngine, u) -> None:
    engine.update(u)


def bounded_engine_recover(engine: BoundedEngine) -> WeightedHypergraph:
    return engine.recover()


def dynamic_engine(n, r, eps, seed, config=None) -> DynamicEngine:
    return DynamicEngine(n, r, eps, seed, config)


def space_report(engine) -> SpaceReport:
    return engine.space_report()
