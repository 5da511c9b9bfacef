"""Deterministic graph families used by experiment configs and tests."""

from __future__ import annotations

from itertools import combinations
from typing import Any, Mapping

import numpy as np

from .errors import ConfigError
from .graph import Graph, build_graph


def path_graph(n: int) -> Graph:
    return build_graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    return build_graph(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return build_graph(n, combinations(range(n), 2))


def star_graph(leaves: int) -> Graph:
    return build_graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def gnm_graph(n: int, m: int, seed: int) -> Graph:
    """Uniform graph with exactly ``m`` edges, EdgeIds in lexicographic pair order."""
    pairs = list(combinations(range(n), 2))
    if m > len(pairs):
        raise ValueError(f"{m} edges do not fit on {n} vertices")
    rng = np.random.default_rng(seed)
    pick = np.sort(rng.choice(len(pairs), size=m, replace=False))
    return build_graph(n, [pairs[i] for i in pick])


def random_connected_graph(n: int, m: int, seed: int) -> Graph:
    """Random spanning tree plus ``m - n + 1`` uniformly chosen extra edges."""
    if n < 2 or m < n - 1 or m > n * (n - 1) // 2:
        raise ValueError(f"no connected simple graph with n={n}, m={m}")
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    tree = set()
    for i in range(1, n):
        u, v = int(order[i]), int(order[rng.integers(0, i)])
        tree.add((min(u, v), max(u, v)))
    rest = [p for p in combinations(range(n), 2) if p not in tree]
    extra = rng.choice(len(rest), size=m - (n - 1), replace=False) if m > n - 1 else []
    edges = sorted(tree | {rest[i] for i in extra})
    return build_graph(n, edges)


def random_bounded_degree_graph(n: int, m: int, max_degree: int, seed: int,
                                attempts: int = 100) -> Graph:
    """Random graph with ``m`` edges and every degree at most ``max_degree``.

    Edges are added one at a time between uniformly chosen unsaturated
    vertices; the whole draw restarts (with a derived seed) if it gets stuck.
    """
    if 2 * m > n * max_degree:
        raise ValueError(f"{m} edges cannot fit on {n} vertices with max degree {max_degree}")
    rng = np.random.default_rng(seed)
    for _ in range(attempts):
        deg = np.zeros(n, dtype=np.int64)
        edges: set[tuple[int, int]] = set()
        stuck = 0
        while len(edges) < m and stuck < 50 * n:
            free = np.flatnonzero(deg < max_degree)
            if len(free) < 2:
                break
            u, v = (int(x) for x in rng.choice(free, size=2, replace=False))
            key = (min(u, v), max(u, v))
            if key in edges:
                stuck += 1
                continue
            edges.add(key)
            deg[u] += 1
            deg[v] += 1
        if len(edges) == m:
            return build_graph(n, sorted(edges))
    raise RuntimeError(f"could not place {m} edges with max degree {max_degree} on {n} vertices")


def graph_from_spec(spec: Mapping[str, Any]) -> Graph:
    """Build a graph from a generator spec such as ``{"kind": "cycle", "n": 6}``."""
    kind = spec.get("kind")
    try:
        if kind == "path":
            return path_graph(int(spec["n"]))
        if kind == "cycle":
            return cycle_graph(int(spec["n"]))
        if kind == "complete":
            return complete_graph(int(spec["n"]))
        if kind == "star":
            return star_graph(int(spec["leaves"]))
        if kind == "gnm":
            return gnm_graph(int(spec["n"]), int(spec["m"]), int(spec["seed"]))
        if kind == "connected":
            return random_connected_graph(int(spec["n"]), int(spec["m"]), int(spec["seed"]))
        if kind == "bounded_degree":
            return random_bounded_degree_graph(int(spec["n"]), int(spec["m"]),
                                               int(spec["max_degree"]), int(spec["seed"]))
    except KeyError as exc:
        raise ConfigError(f"generator {kind!r} needs parameter {exc.args[0]!r}",
                          field="generator") from exc
    raise ConfigError(f"unknown generator kind {kind!r}", field="generator.kind")
