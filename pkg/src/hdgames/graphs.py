"""Undirected interaction graphs for the networked case studies."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on agents 0..n-1 (no self-loops)."""

    n: int
    edges: frozenset[tuple[int, int]]
    _adjacency: tuple[tuple[int, ...], ...] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("graph needs at least one node")
        neighbors: list[set[int]] = [set() for _ in range(self.n)]
        for i, j in self.edges:
            if i == j:
                raise ValueError(f"self-loop at node {i}")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError(f"edge ({i},{j}) out of range for n={self.n}")
            neighbors[i].add(j)
            neighbors[j].add(i)
        object.__setattr__(
            self, "_adjacency", tuple(tuple(sorted(s)) for s in neighbors)
        )

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        normalized = frozenset(
            (min(i, j), max(i, j)) for i, j in edges
        )
        return cls(n, normalized)

    @classmethod
    def ring(cls, n: int) -> "Graph":
        """Cycle graph; degenerates to a single edge for n=2 and to an
        isolated node for n=1."""
        if n <= 1:
            return cls.from_edges(n, [])
        if n == 2:
            return cls.from_edges(2, [(0, 1)])
        return cls.from_edges(n, [(i, (i + 1) % n) for i in range(n)])

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls.from_edges(
            n, [(i, j) for i in range(n) for j in range(i + 1, n)]
        )

    def neighbors(self, node: int) -> tuple[int, ...]:
        return self._adjacency[node]

    def degree(self, node: int) -> int:
        return len(self._adjacency[node])
