"""Simple undirected communication graphs.

Nodes are labeled ``1..n`` on every public surface. Neighbor sets are kept
sorted so that anything iterating over them is reproducible.
"""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


class GraphError(ValueError):
    """Raised for malformed graph input."""


@dataclass(frozen=True)
class Graph:
    """Immutable simple undirected graph on nodes ``1..n``.

    Attributes:
        n: Number of nodes.
        edges: Sorted tuple of ``(i, j)`` pairs with ``i < j``.
        neighbors: ``neighbors[i - 1]`` is the ascending tuple of neighbors of node ``i``.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    neighbors: tuple[tuple[int, ...], ...] = field(repr=False)

    def neighbors_of(self, i: int) -> tuple[int, ...]:
        self._check_node(i)
        return self.neighbors[i - 1]

    def degree(self, i: int) -> int:
        return len(self.neighbors_of(i))

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.neighbors)

    def _check_node(self, i: int) -> None:
        if not 1 <= i <= self.n:
            raise GraphError(f"node {i} out of range 1..{self.n}")


def build_graph(n: int, edges: Iterable[Sequence[int]]) -> Graph:
    """Build a simple undirected graph.

    Duplicate pairs and reversed orientations are merged. Self-loops and
    out-of-range endpoints are rejected.
    """
    if int(n) != n or n < 1:
        raise GraphError(f"node count must be a positive integer, got {n!r}")
    n = int(n)
    pairs: set[tuple[int, int]] = set()
    for pair in edges:
        if len(pair) != 2:
            raise GraphError(f"edge must have two endpoints, got {pair!r}")
        i, j = int(pair[0]), int(pair[1])
        if not (1 <= i <= n and 1 <= j <= n):
            raise GraphError(f"edge ({i}, {j}) out of range 1..{n}")
        if i == j:
            raise GraphError(f"self-loop at node {i}")
        pairs.add((min(i, j), max(i, j)))

    adjacency: list[set[int]] = [set() for _ in range(n)]
    for i, j in pairs:
        adjacency[i - 1].add(j)
        adjacency[j - 1].add(i)
    return Graph(
        n=n,
        edges=tuple(sorted(pairs)),
        neighbors=tuple(tuple(sorted(s)) for s in adjacency),
    )


def is_connected(g: Graph) -> bool:
    seen = {1}
    queue = deque([1])
    while queue:
        i = queue.popleft()
        for j in g.neighbors[i - 1]:
            if j not in seen:
                seen.add(j)
                queue.append(j)
    return len(seen) == g.n


def laplacian(g: Graph) -> np.ndarray:
    """Integer graph Laplacian ``D - A`` (row ``i - 1`` belongs to node ``i``)."""
    lap = np.zeros((g.n, g.n), dtype=np.int64)
    for i, j in g.edges:
        lap[i - 1, j - 1] = -1
        lap[j - 1, i - 1] = -1
    lap[np.diag_indices(g.n)] = g.degrees
    return lap


# -- named topologies -------------------------------------------------------

def path_graph(n: int) -> Graph:
    return build_graph(n, [(i, i + 1) for i in range(1, n)])


def complete_graph(n: int) -> Graph:
    return build_graph(n, [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)])


def fig6_graph() -> Graph:
    """Six-agent graph of the expected simulation: two stars joined at nodes 3 and 4."""
    return build_graph(6, [(1, 3), (2, 3), (3, 4), (4, 5), (4, 6)])


def worst_case_graph(n: int, r: int) -> Graph:
    """Hub-plus-clique graph: nodes ``2..n`` form a clique, node 1 touches ``2..r+1``."""
    if n < 3:
        raise GraphError(f"worst-case graph needs n >= 3, got {n}")
    if not 1 <= r <= n - 1:
        raise GraphError(f"r must lie in 1..{n - 1}, got {r}")
    edges = [(1, k) for k in range(2, r + 2)]
    edges += [(i, j) for i in range(2, n + 1) for j in range(i + 1, n + 1)]
    return build_graph(n, edges)


def random_connected_graph(
    n: int,
    rng: random.Random,
    p: float | None = None,
    max_rejections: int = 1000,
) -> Graph:
    """Erdős–Rényi graph conditioned on connectivity by rejection.

    The default edge probability is ``2 ln(n) / n`` (clipped to 1), just above
    the connectivity threshold, so instances stay sparse.
    """
    if n < 1:
        raise GraphError("n must be positive")
    if n == 1:
        return build_graph(1, [])
    if p is None:
        p = min(1.0, 2.0 * math.log(n) / n)
    pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    for _ in range(max_rejections):
        g = build_graph(n, [e for e in pairs if rng.random() < p])
        if is_connected(g):
            return g
    raise GraphError(f"no connected graph after {max_rejections} draws (n={n}, p={p})")


# -- edge-list text format ---------------------------------------------------

def parse_edge_list(text: str) -> Graph:
    """Parse ``n`` on the first data line, then one ``i j`` pair per line.

    Everything after ``#`` on a line is ignored.
    """
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append((lineno, line.split()))
    if not rows:
        raise GraphError("edge list is empty")
    lineno, head = rows[0]
    if len(head) != 1:
        raise GraphError(f"line {lineno}: expected node count, got {' '.join(head)!r}")
    try:
        n = int(head[0])
        edges = []
        for lineno, parts in rows[1:]:
            if len(parts) != 2:
                raise GraphError(f"line {lineno}: expected 'i j', got {' '.join(parts)!r}")
            edges.append((int(parts[0]), int(parts[1])))
    except ValueError as exc:
        if isinstance(exc, GraphError):
            raise
        raise GraphError(f"line {lineno}: {exc}") from None
    return build_graph(n, edges)


def read_edge_list(path: str | Path) -> Graph:
    return parse_edge_list(Path(path).read_text())


def format_edge_list(g: Graph) -> str:
    lines = [str(g.n)] + [f"{i} {j}" for i, j in g.edges]
    return "\n".join(lines) + "\n"
