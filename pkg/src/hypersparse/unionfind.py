"""Union-find over ``0..n-1`` whose representative is the block's minimum vertex."""
from __future__ import annotations


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def __len__(self):
        return len(self.parent)

    def find(self, x: int) -> int:
        root = x
        parent = self.parent
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a: int, b: int):
        """Merge the sets of ``a`` and ``b``.

        Returns ``(kept, absorbed)`` roots, or ``None`` if already joined.
        The kept root is always the smaller id, so roots double as
        min-vertex labels.
        """
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return None
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return ra, rb

    def partition(self):
        from .core import Partition

        return Partition(tuple(self.find(v) for v in range(len(self.parent))))

    def copy(self) -> "UnionFind":
        uf = UnionFind.__new__(UnionFind)
        uf.parent = list(self.parent)
        uf.size = list(self.size)
        return uf
