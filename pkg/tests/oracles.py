"""Reference implementations that share no code with the package's solvers.

Distances come from networkx; k-strong validity is checked pair by pair from
the definition, and maxima come from enumerating every edge subset.
"""

from itertools import combinations

import networkx as nx

from strongmatch.graph import Graph


def nx_graph(g: Graph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges)
    return h


def pair_conflicts(g: Graph, k: int) -> list[int]:
    """Bitmask per edge of the edges it may not share a k-strong matching with."""
    dist = dict(nx.all_pairs_shortest_path_length(nx_graph(g)))
    out = [0] * g.m
    for i, j in combinations(range(g.m), 2):
        a, b = g.edges[i], g.edges[j]
        close = any(y in dist[x] and dist[x][y] <= k for x in a for y in b)
        if close or set(a) & set(b):
            out[i] |= 1 << j
            out[j] |= 1 << i
    return out


def valid_subsets(g: Graph, k: int):
    conf = pair_conflicts(g, k)
    for mask in range(1 << g.m):
        if all(not (conf[e] & mask) for e in range(g.m) if mask >> e & 1):
            yield mask


def brute_nu(g: Graph, k: int) -> int:
    return max(bin(s).count("1") for s in valid_subsets(g, k))


def brute_m_k(g: Graph, weights, k: int) -> float:
    """Minimum weight over the maximum-size k-strong matchings."""
    best = None
    for s in valid_subsets(g, k):
        ids = [e for e in range(g.m) if s >> e & 1]
        key = (-len(ids), sum(weights[e] for e in ids))
        if best is None or key < best:
            best = key
    return best[1]
