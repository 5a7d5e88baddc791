"""Sequential ground truth: adjacency sets with bidirectional BFS."""

from __future__ import annotations

from typing import Dict, Iterable, List, Set, Tuple


class OracleGraph:
    """Exact connectivity for any sequential history."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("vertex count must be at least 1")
        self.n = n
        self.adj: List[Set[int]] = [set() for _ in range(n)]
        self.m = 0

    def add_edge(self, u: int, v: int) -> bool:
        """Insert ``(u, v)``; returns False if it was already present."""
        if v in self.adj[u]:
            return False
        self.adj[u].add(v)
        self.adj[v].add(u)
        self.m += 1
        return True

    def remove_edge(self, u: int, v: int) -> bool:
        if v not in self.adj[u]:
            return False
        self.adj[u].discard(v)
        self.adj[v].discard(u)
        self.m -= 1
        return True

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def connected(self, u: int, v: int) -> bool:
        if u == v:
            return True
        adj = self.adj
        if not adj[u] or not adj[v]:
            return False
        seen_a = {u}
        seen_b = {v}
        front_a = [u]
        front_b = [v]
        while front_a and front_b:
            # Expand the smaller frontier.
            if len(front_a) > len(front_b):
                front_a, front_b = front_b, front_a
                seen_a, seen_b = seen_b, seen_a
            nxt = []
            for x in front_a:
                for y in adj[x]:
                    if y in seen_b:
                        return True
                    if y not in seen_a:
                        seen_a.add(y)
                        nxt.append(y)
            front_a = nxt
        return False

    def components(self) -> List[int]:
        """Component label per vertex (smallest vertex of the component)."""
        label = [-1] * self.n
        for s in range(self.n):
            if label[s] >= 0:
                continue
            label[s] = s
            stack = [s]
            while stack:
                x = stack.pop()
                for y in self.adj[x]:
                    if label[y] < 0:
                        label[y] = s
                        stack.append(y)
        return label

    def edges(self) -> List[Tuple[int, int]]:
        return sorted((u, v) for u in range(self.n) for v in self.adj[u] if u < v)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Tuple[int, int]]) -> "OracleGraph":
        g = cls(n)
        for u, v in edges:
            g.add_edge(u, v)
        return g


def same_partition(labels_a: Dict[int, object], labels_b: List[int]) -> bool:
    """True iff two vertex labelings induce the same partition."""
    fwd: Dict[object, int] = {}
    back: Dict[int, object] = {}
    for v, b in enumerate(labels_b):
        a = labels_a[v]
        if fwd.setdefault(a, b) != b or back.setdefault(b, a) != a:
            return False
    return True
