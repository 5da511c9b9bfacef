"""Immutable simple undirected graphs and the distance primitives built on them.

Vertices are dense integers ``0..n-1``.  Edges keep their input order and the
position of an edge in :attr:`Graph.edges` is its ``EdgeId``.  Distances are hop
counts; an unreachable vertex has distance :data:`INFINITY` (``math.inf``), which
can never be mistaken for a real distance.

Neighbourhood sizes ``d_j(u)`` never count ``u`` itself.
"""

from __future__ import annotations

import math
import threading
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, dijkstra

from .errors import DuplicateEdge, EmptyGraph, SelfLoop, VertexOutOfRange

INFINITY = math.inf

# sources per dijkstra call in the batched neighbourhood counter
_BATCH = 256


class Graph:
    """A simple undirected graph, immutable after construction.

    Use :func:`build_graph` rather than calling the constructor directly.
    BFS results are memoized per instance behind a lock, so a graph can be
    shared between threads.
    """

    __slots__ = ("n", "edges", "adjacency", "_edge_index", "_bfs_cache", "_lock", "_csr")

    def __init__(self, n: int, edges: tuple[tuple[int, int], ...],
                 adjacency: tuple[tuple[tuple[int, int], ...], ...],
                 edge_index: dict[tuple[int, int], int]):
        self.n = n
        self.edges = edges
        self.adjacency = adjacency
        self._edge_index = edge_index
        self._bfs_cache: dict[int, tuple[float, ...]] = {}
        self._lock = threading.Lock()
        self._csr: csr_matrix | None = None

    @property
    def m(self) -> int:
        return len(self.edges)

    def degree(self, u: int) -> int:
        self._check_vertex(u)
        return len(self.adjacency[u])

    def degrees(self) -> np.ndarray:
        return np.fromiter((len(a) for a in self.adjacency), dtype=np.int64, count=self.n)

    def neighbors(self, u: int) -> list[int]:
        self._check_vertex(u)
        return [v for v, _ in self.adjacency[u]]

    def edge_id(self, u: int, v: int) -> int:
        """EdgeId of the edge joining ``u`` and ``v``; ``KeyError`` if absent."""
        return self._edge_index[(u, v) if u < v else (v, u)]

    def has_edge(self, u: int, v: int) -> bool:
        return ((u, v) if u < v else (v, u)) in self._edge_index

    def edge_set(self) -> frozenset[tuple[int, int]]:
        """Edges as canonical ``(min, max)`` pairs, ignoring EdgeIds."""
        return frozenset(self._edge_index)

    def csr(self) -> csr_matrix:
        """Symmetric 0/1 adjacency matrix (cached)."""
        with self._lock:
            if self._csr is None:
                if self.m:
                    e = np.asarray(self.edges, dtype=np.int64)
                    rows = np.concatenate([e[:, 0], e[:, 1]])
                    cols = np.concatenate([e[:, 1], e[:, 0]])
                else:
                    rows = cols = np.zeros(0, dtype=np.int64)
                data = np.ones(len(rows), dtype=np.float64)
                self._csr = csr_matrix((data, (rows, cols)), shape=(self.n, self.n))
            return self._csr

    def _check_vertex(self, u: int) -> None:
        if not 0 <= u < self.n:
            raise VertexOutOfRange(f"vertex {u} not in range 0..{self.n - 1}")

    def _distances(self, source: int) -> tuple[float, ...]:
        self._check_vertex(source)
        with self._lock:
            cached = self._bfs_cache.get(source)
        if cached is not None:
            return cached
        dist: list[float] = [INFINITY] * self.n
        dist[source] = 0
        queue = deque([source])
        adj = self.adjacency
        while queue:
            x = queue.popleft()
            dx = dist[x] + 1
            for y, _ in adj[x]:
                if dist[y] == INFINITY:
                    dist[y] = dx
                    queue.append(y)
        result = tuple(dist)
        with self._lock:
            self._bfs_cache.setdefault(source, result)
        return result

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n, self.edges))


@dataclass(frozen=True)
class DistanceMatrixView:
    """Hop distances from one source; unreachable vertices map to ``INFINITY``."""

    source: int
    dist: tuple[float, ...]

    def __getitem__(self, v: int) -> float:
        return self.dist[v]

    def __len__(self) -> int:
        return len(self.dist)


def build_graph(n: int, edge_pairs: Iterable[Sequence[int]]) -> Graph:
    """Build a graph on ``n`` vertices; EdgeIds follow the order of ``edge_pairs``."""
    if n < 0:
        raise VertexOutOfRange(f"vertex count must be nonnegative, got {n}")
    edges: list[tuple[int, int]] = []
    index: dict[tuple[int, int], int] = {}
    adjacency: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for pair in edge_pairs:
        u, v = (int(x) for x in pair)
        for x in (u, v):
            if not 0 <= x < n:
                raise VertexOutOfRange(f"edge ({u}, {v}): vertex {x} not in range 0..{n - 1}")
        if u == v:
            raise SelfLoop(f"self-loop at vertex {u}")
        key = (u, v) if u < v else (v, u)
        if key in index:
            raise DuplicateEdge(f"edge ({u}, {v}) appears more than once")
        eid = len(edges)
        index[key] = eid
        edges.append((u, v))
        adjacency[u].append((v, eid))
        adjacency[v].append((u, eid))
    return Graph(n, tuple(edges), tuple(tuple(a) for a in adjacency), index)


def bfs_distances(g: Graph, source: int) -> DistanceMatrixView:
    return DistanceMatrixView(source, g._distances(source))


def neighborhood_count(g: Graph, u: int, j: int) -> int:
    """``d_j(u)``: vertices other than ``u`` within distance ``j`` of ``u``."""
    if j < 1:
        raise ValueError(f"radius must be >= 1, got {j}")
    dist = g._distances(u)
    return sum(1 for d in dist if 0 < d <= j)


def neighborhood_counts(g: Graph, radius: int) -> np.ndarray:
    """``d_radius(u)`` for every vertex at once (radius 0 gives zeros).

    Runs bounded-depth searches in batches through scipy, which keeps memory at
    ``O(batch * n)`` and is what the large random-graph statistics rely on.
    """
    if radius < 0:
        raise ValueError(f"radius must be >= 0, got {radius}")
    if radius == 0 or g.n == 0:
        return np.zeros(g.n, dtype=np.int64)
    if radius == 1:
        return g.degrees()
    a = g.csr()
    out = np.empty(g.n, dtype=np.int64)
    for start in range(0, g.n, _BATCH):
        idx = np.arange(start, min(start + _BATCH, g.n))
        d = dijkstra(a, directed=False, indices=idx, unweighted=True, limit=radius + 0.5)
        out[idx] = np.count_nonzero(d <= radius, axis=1) - 1
    return out


def max_degree(g: Graph) -> int:
    return max((len(a) for a in g.adjacency), default=0)


def has_isolated_edge(g: Graph) -> bool:
    """True iff some edge has both endvertices of degree 1."""
    adj = g.adjacency
    return any(len(adj[u]) == 1 and len(adj[v]) == 1 for u, v in g.edges)


def line_graph(g: Graph) -> tuple[Graph, tuple[int, ...]]:
    """Line graph of ``g`` and the map from line-graph vertex to EdgeId.

    Line-graph vertex ``i`` stands for edge ``i`` of ``g``, so the map is the
    identity; it is returned so callers never have to rely on that.
    """
    if g.m == 0:
        raise EmptyGraph("line graph of a graph without edges")
    pairs: set[tuple[int, int]] = set()
    for incident in g.adjacency:
        ids = sorted(eid for _, eid in incident)
        for i, a in enumerate(ids):
            for b in ids[i + 1:]:
                pairs.add((a, b))
    lg = build_graph(g.m, sorted(pairs))
    return lg, tuple(range(g.m))


def graph_power(g: Graph, r: int) -> Graph:
    """``g^r``: same vertices, ``u ~ v`` iff ``1 <= dist(u, v) <= r``."""
    if r < 1:
        raise ValueError(f"power must be >= 1, got {r}")
    if r == 1:
        return g
    pairs = []
    adj = g.adjacency
    for s in range(g.n):
        seen = {s: 0}
        frontier = [s]
        for depth in range(1, r + 1):
            nxt = []
            for x in frontier:
                for y, _ in adj[x]:
                    if y not in seen:
                        seen[y] = depth
                        nxt.append(y)
            frontier = nxt
            if not frontier:
                break
        pairs.extend((s, t) for t in seen if t > s)
    pairs.sort()
    return build_graph(g.n, pairs)


def components(g: Graph) -> np.ndarray:
    """Connected-component label per vertex."""
    if g.n == 0:
        return np.zeros(0, dtype=np.int64)
    _, labels = connected_components(g.csr(), directed=False)
    return labels


def is_connected(g: Graph) -> bool:
    return g.n <= 1 or int(components(g).max()) == 0


def diameter(g: Graph) -> float:
    """Largest finite-or-infinite eccentricity; ``INFINITY`` if disconnected."""
    if g.n == 0:
        return 0
    return max(max(g._distances(s)) for s in range(g.n))
