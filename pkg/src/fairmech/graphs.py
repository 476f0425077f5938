"""Regular bipartite multigraphs and their decomposition into perfect matchings."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .exceptions import MalformedInputError, RegularityError

__all__ = ["BipartiteMultigraph", "perfect_matching", "edge_coloring"]


@dataclass(frozen=True)
class BipartiteMultigraph:
    """Edges ``edges[e] = (left, right)``; parallel edges are allowed."""

    n_left: int
    n_right: int
    edges: tuple

    def __post_init__(self):
        for a, b in self.edges:
            if not (0 <= a < self.n_left and 0 <= b < self.n_right):
                raise MalformedInputError(f"edge ({a}, {b}) has an endpoint out of range")

    @classmethod
    def from_edges(cls, n_left: int, n_right: int, edges) -> "BipartiteMultigraph":
        return cls(n_left, n_right, tuple((int(a), int(b)) for a, b in edges))

    def degree(self) -> int | None:
        """Common degree of every vertex, or ``None`` if the graph is irregular."""
        left = [0] * self.n_left
        right = [0] * self.n_right
        for a, b in self.edges:
            left[a] += 1
            right[b] += 1
        degrees = set(left) | set(right)
        if len(degrees) > 1:
            return None
        return degrees.pop() if degrees else 0


def perfect_matching(n_left: int, n_right: int, edges: Sequence[tuple], alive: Sequence[int]) -> list[int] | None:
    """Augmenting-path perfect matching over the edge ids in ``alive``.

    Edges are scanned in id order, so the result is deterministic.  Returns
    the matched edge id per left vertex, or ``None``.
    """
    if n_left != n_right:
        return None
    adj: list[list[int]] = [[] for _ in range(n_left)]
    for e in sorted(alive):
        adj[edges[e][0]].append(e)
    match_left: list[int] = [-1] * n_left
    match_right: list[int] = [-1] * n_right
    for root in range(n_left):
        # iterative DFS over alternating paths
        parent_edge = {}
        visited_right = set()
        stack = [(root, iter(adj[root]))]
        found = None
        while stack and found is None:
            a, it = stack[-1]
            for e in it:
                b = edges[e][1]
                if b in visited_right:
                    continue
                visited_right.add(b)
                parent_edge[b] = (a, e)
                if match_right[b] == -1:
                    found = b
                else:
                    nxt = edges[match_right[b]][0]
                    stack.append((nxt, iter(adj[nxt])))
                break
            else:
                stack.pop()
        if found is None:
            return None
        b = found
        while True:
            a, e = parent_edge[b]
            prev = match_left[a]
            match_left[a] = e
            match_right[b] = e
            if a == root:
                break
            b = edges[prev][1]
    return match_left


def edge_coloring(graph: BipartiteMultigraph) -> list[list[int]]:
    """Split a ``k``-regular bipartite multigraph into ``k`` perfect matchings.

    Each matching is a list of edge ids.  Removing a perfect matching from a
    ``k``-regular graph leaves a ``(k-1)``-regular one, and regular bipartite
    graphs always have a perfect matching, so ``k`` rounds suffice.

    >>> g = BipartiteMultigraph.from_edges(2, 2, [(0, 0), (0, 1), (1, 0), (1, 1)])
    >>> edge_coloring(g)
    [[1, 2], [0, 3]]
    """
    k = graph.degree()
    if k is None or graph.n_left != graph.n_right:
        raise RegularityError("graph is not regular")
    alive = set(range(len(graph.edges)))
    colors = []
    for _ in range(k):
        matching = perfect_matching(graph.n_left, graph.n_right, graph.edges, alive)
        if matching is None:
            raise RegularityError("no perfect matching found in a regular graph")
        colors.append(sorted(matching))
        alive.difference_update(matching)
    return colors
