"""Union-find over window indices, used to label every cluster of a configuration."""
from typing import Dict, List

import numpy as np


class UnionFind:
    """Disjoint sets with path compression and union by size."""

    def __init__(self, size: int):
        self.size = size
        self.parents = list(range(size))
        self.sizes = [1] * size
        self.num_components = size

    def find(self, elem: int) -> int:
        root = elem
        while root != self.parents[root]:
            root = self.parents[root]
        # compress
        while elem != root:
            nxt = self.parents[elem]
            self.parents[elem] = root
            elem = nxt
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.sizes[ra] < self.sizes[rb]:
            ra, rb = rb, ra
        self.parents[rb] = ra
        self.sizes[ra] += self.sizes[rb]
        self.num_components -= 1

    def union_all(self, elems: "np.ndarray | List[int]") -> None:
        """Merge a whole group into one set."""
        if len(elems) < 2:
            return
        first = int(elems[0])
        for e in elems[1:]:
            self.union(first, int(e))

    def components(self) -> List[List[int]]:
        groups: Dict[int, List[int]] = {}
        for i in range(self.size):
            groups.setdefault(self.find(i), []).append(i)
        return list(groups.values())

    def labels(self) -> np.ndarray:
        return np.fromiter((self.find(i) for i in range(self.size)), dtype=np.int64, count=self.size)
