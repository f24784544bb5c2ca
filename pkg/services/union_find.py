"""
Disjoint sets for merging move-connected projections.
"""

from typing import Dict, Hashable, List


class UnionFind:
    """
    Disjoint sets whose root is always the least member, so the partition
    and its representatives do not depend on the order of unions.

    Examples
    --------
    >>> uf = UnionFind()
    >>> uf.union(3, 2)
    >>> uf.union(2, 1)
    >>> uf.find(3)
    1
    """

    def __init__(self):
        self.parent: Dict[Hashable, Hashable] = {}

    def find(self, x):
        if x not in self.parent:
            self.parent[x] = x
            return x
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y):
        px = self.find(x)
        py = self.find(y)
        if px == py:
            return
        root = min(px, py)
        self.parent[px] = self.parent[py] = root

    def connected(self, x, y) -> bool:
        return self.find(x) == self.find(y)

    def groups(self) -> List[List]:
        """Members per set, each sorted, sets ordered by their least member."""
        members: Dict[Hashable, List] = {}
        for x in self.parent:
            members.setdefault(self.find(x), []).append(x)
        return sorted((sorted(group) for group in members.values()), key=lambda group: group[0])
