"""Mergeable l0 sampler over integer vectors with huge coordinate ids.

Row ``j`` of a sampler sees the coordinates whose keyed 128-bit hash has at
least ``j`` leading zeros.  Each coordinate is accumulated once, into one of
``width`` cells at its exact (clamped) leading-zero depth, picked by the low
hash bits; a row tester is the sum of all cells at or above it.  Testers hold
``(sum d, sum d*x, sum d*z^x mod p)``.  Sampling checks, sparsest depth first,
the row tester and then every cell of that depth for one-sparseness.
"""
from __future__ import annotations

import hashlib
import math
import struct
from dataclasses import dataclass
from typing import NamedTuple

from .errors import IncompatibleSketches

PRIME = (1 << 61) - 1
FORMAT_VERSION = 2
_MAGIC = b"HSL0"
_S0_BYTES, _S1_BYTES, _FZ_BYTES = 16, 48, 8
CELLS = 4
MAX_DEPTH = 63
TESTER_BYTES = 2 + _S0_BYTES + _S1_BYTES + _FZ_BYTES

EMPTY, FOUND, FAIL = "empty", "found", "fail"


class Sample(NamedTuple):
    status: str
    coordinate: int | None = None
    value: int | None = None


@dataclass(frozen=True)
class SeedMaterial:
    master: int
    domain: str
    level: int = 0
    bank: int = 0
    rep: int = 0

    def to_bytes(self) -> bytes:
        dom = self.domain.encode()
        return (struct.pack(">QB", self.master & (2**64 - 1), len(dom)) + dom
                + struct.pack(">HHI", self.level, self.bank, self.rep))


def depth_for_support(M: int) -> int:
    """Number of subsampling rows for support bound ``M``."""
    return max(1, math.ceil(math.log2(max(M, 2)))) + 1


def keyed_hash(key: bytes, data: bytes) -> int:
    return int.from_bytes(hashlib.blake2b(data, key=key, digest_size=16).digest(), "big")


def leading_zeros128(h: int) -> int:
    return 128 - h.bit_length()


def coordinate_bytes(x: int) -> bytes:
    return x.to_bytes((x.bit_length() + 7) // 8 or 1, "big")


class SamplerParams:
    """Seed-derived constants shared by every sampler with the same material."""

    __slots__ = ("material", "depth", "key", "z")
    _cache: dict = {}

    def __new__(cls, material: SeedMaterial, depth: int):
        if not 1 <= depth <= MAX_DEPTH:
            raise ValueError(f"depth {depth} outside [1, {MAX_DEPTH}]")
        cached = cls._cache.get((material, depth))
        if cached is not None:
            return cached
        self = super().__new__(cls)
        self.material = material
        self.depth = depth
        raw = material.to_bytes()
        self.key = hashlib.blake2b(b"row-hash" + raw, digest_size=32).digest()
        # the fingerprint base is shared by all banks and repetitions of a level
        zraw = SeedMaterial(material.master, material.domain, material.level).to_bytes()
        zh = int.from_bytes(hashlib.blake2b(b"fingerprint" + zraw, digest_size=16).digest(), "big")
        self.z = zh % (PRIME - 1) + 1
        if len(cls._cache) > 200_000:
            cls._cache.clear()
        cls._cache[(material, depth)] = self
        return self

    def cell(self, xbytes: bytes) -> int:
        h = keyed_hash(self.key, xbytes)
        return min(leading_zeros128(h), self.depth - 1) * CELLS + (h & (CELLS - 1))

    def power(self, x: int) -> int:
        return pow(self.z, x % (PRIME - 1), PRIME)

    def terms(self, x: int, xbytes: bytes | None = None) -> tuple[int, int]:
        """Cell index and ``z^x mod p`` for coordinate ``x``."""
        if xbytes is None:
            xbytes = coordinate_bytes(x)
        return self.cell(xbytes), self.power(x)

    def row_keeps(self, x: int, row: int) -> bool:
        return self.terms(x)[0] // CELLS >= row


class L0Sampler:
    __slots__ = ("params", "buckets")

    def __init__(self, material: SeedMaterial, depth: int):
        self.params = SamplerParams(material, depth)
        self.buckets: dict[int, list[int]] = {}

    @property
    def material(self) -> SeedMaterial:
        return self.params.material

    @property
    def depth(self) -> int:
        return self.params.depth

    def is_empty(self) -> bool:
        return not self.buckets

    def add_term(self, bucket: int, x: int, zx: int, delta: int) -> None:
        """Accumulate ``delta`` at ``x`` given its precomputed terms."""
        t = self.buckets.get(bucket)
        if t is None:
            t = self.buckets[bucket] = [0, 0, 0]
        t[0] += delta
        t[1] += delta * x
        t[2] = (t[2] + delta * zx) % PRIME
        if not (t[0] or t[1] or t[2]):
            del self.buckets[bucket]

    def update(self, x: int, delta: int) -> None:
        bucket, zx = self.params.terms(x)
        self.add_term(bucket, x, zx, delta)

    def _verify(self, s0: int, s1: int, fz: int):
        if s0 == 0 or s1 % s0:
            return None
        x = s1 // s0
        if x <= 0 or fz != (s0 % PRIME) * pow(self.params.z, x % (PRIME - 1), PRIME) % PRIME:
            return None
        return x

    def sample(self) -> Sample:
        if not self.buckets:
            return Sample(EMPTY)
        s0 = s1 = fz = 0
        buckets = self.buckets
        for j in range(self.params.depth - 1, -1, -1):
            cells = [buckets[c] for c in range(j * CELLS, (j + 1) * CELLS) if c in buckets]
            if not cells:
                continue
            for t in cells:
                s0 += t[0]
                s1 += t[1]
                fz += t[2]
            fz %= PRIME
            x = self._verify(s0, s1, fz)
            if x is not None:
                return Sample(FOUND, x, s0)
            for t in cells:
                x = self._verify(t[0], t[1], t[2])
                if x is not None:
                    return Sample(FOUND, x, t[0])
        return Sample(FAIL)

    def rows(self) -> list[tuple[int, int, int]]:
        """Per-row testers ``(s0, s1, fz)`` from row 0 (everything) upwards."""
        out = []
        s0 = s1 = fz = 0
        for j in range(self.params.depth - 1, -1, -1):
            for c in range(j * CELLS, (j + 1) * CELLS):
                t = self.buckets.get(c, (0, 0, 0))
                s0, s1, fz = s0 + t[0], s1 + t[1], (fz + t[2]) % PRIME
            out.append((s0, s1, fz))
        return out[::-1]

    def _check(self, other: "L0Sampler"):
        if not self.compatible(other):
            raise IncompatibleSketches(f"seed mismatch: {self.material} vs {other.material}")

    def compatible(self, other: "L0Sampler") -> bool:
        # the params cache can be cleared, so compare seeds rather than identity
        a, b = self.params, other.params
        return a is b or (a.material == b.material and a.depth == b.depth)

    def merge_into(self, other: "L0Sampler") -> "L0Sampler":
        """In-place ``self += other``."""
        self._check(other)
        for j, t in other.buckets.items():
            mine = self.buckets.get(j)
            if mine is None:
                self.buckets[j] = list(t)
                continue
            mine[0] += t[0]
            mine[1] += t[1]
            mine[2] = (mine[2] + t[2]) % PRIME
            if not (mine[0] or mine[1] or mine[2]):
                del self.buckets[j]
        return self

    def copy(self) -> "L0Sampler":
        s = L0Sampler.__new__(L0Sampler)
        s.params = self.params
        s.buckets = {j: list(t) for j, t in self.buckets.items()}
        return s

    def __eq__(self, other):
        if not isinstance(other, L0Sampler):
            return NotImplemented
        return self.compatible(other) and self.buckets == other.buckets

    def to_bytes(self) -> bytes:
        out = [_MAGIC, bytes([FORMAT_VERSION]), self.material.to_bytes(),
               struct.pack(">BI", self.depth, len(self.buckets))]
        for j in sorted(self.buckets):
            s0, s1, fz = self.buckets[j]
            out.append(struct.pack(">H", j))
            out.append(s0.to_bytes(_S0_BYTES, "big", signed=True))
            out.append(s1.to_bytes(_S1_BYTES, "big", signed=True))
            out.append(fz.to_bytes(_FZ_BYTES, "big"))
        return b"".join(out)

    @classmethod
    def from_bytes(cls, data: bytes) -> "L0Sampler":
        if data[:4] != _MAGIC or data[4] != FORMAT_VERSION:
            raise ValueError(f"not a version-{FORMAT_VERSION} l0 sampler")
        pos = 5
        master, dlen = struct.unpack_from(">QB", data, pos)
        pos += 9
        domain = data[pos:pos + dlen].decode()
        pos += dlen
        level, bank, rep = struct.unpack_from(">HHI", data, pos)
        pos += 8
        depth, count = struct.unpack_from(">BI", data, pos)
        pos += 5
        s = cls(SeedMaterial(master, domain, level, bank, rep), depth)
        for _ in range(count):
            (j,) = struct.unpack_from(">H", data, pos)
            pos += 2
            s0 = int.from_bytes(data[pos:pos + _S0_BYTES], "big", signed=True)
            pos += _S0_BYTES
            s1 = int.from_bytes(data[pos:pos + _S1_BYTES], "big", signed=True)
            pos += _S1_BYTES
            fz = int.from_bytes(data[pos:pos + _FZ_BYTES], "big")
            pos += _FZ_BYTES
            s.buckets[j] = [s0, s1, fz]
        if pos != len(data):
            raise ValueError("trailing bytes in sampler encoding")
        return s


def merge(a: L0Sampler, b: L0Sampler) -> L0Sampler:
    return a.copy().merge_into(b)
