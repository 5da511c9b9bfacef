"""k-strong matchings: validity, exact and greedy maxima, neighbourhood bounds.

A matching is *k-strong* when no path with at most ``k`` edges joins endvertices
of two different matching edges.  ``k = 0`` is an ordinary matching and
``k = 1`` an induced matching.

Maximum k-strong matchings are exactly the maximum independent sets of the
conflict graph ``L(g)^(k+1)`` (the (k+1)-th power of the line graph): two edges
conflict iff their line-graph distance is at most ``k + 1``, i.e. iff some pair
of their endvertices is within host distance ``k``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable

import numpy as np
from scipy.sparse import csr_matrix, identity

from . import mis
from .errors import (
    EmptyGraph,
    IsolatedEdgePresent,
    KTooSmall,
    NotAMatching,
    UnknownEdgeId,
    ZeroDenominator,
    ZeroMinNeighborhood,
)
from .graph import Graph, graph_power, has_isolated_edge, line_graph, max_degree, neighborhood_counts


@dataclass(frozen=True)
class Matching:
    """A set of EdgeIds together with the strength ``k`` it is claimed to have."""

    edge_ids: frozenset[int]
    k: int = 0

    @classmethod
    def of(cls, edge_ids: Iterable[int], k: int = 0) -> "Matching":
        return cls(frozenset(int(e) for e in edge_ids), k)

    @property
    def size(self) -> int:
        return len(self.edge_ids)

    def sorted_ids(self) -> list[int]:
        return sorted(self.edge_ids)

    def to_json(self) -> dict[str, Any]:
        return {"k": self.k, "edge_ids": self.sorted_ids(), "size": self.size}

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> "Matching":
        return cls.of(obj["edge_ids"], obj["k"])


def _fraction_json(x: Fraction | None) -> dict[str, int] | None:
    return None if x is None else {"num": x.numerator, "den": x.denominator}


@dataclass(frozen=True)
class BoundsReport:
    """Neighbourhood bounds on the k-strong matching number.

    Lower fields come from :func:`nu_lower_bounds`, upper fields from
    :func:`nu_upper_bound`; a field that was not computed is ``None``.
    """

    k: int
    nu_avg_lower: Fraction | None = None
    nu_maxdeg_lower: Fraction | None = None
    degree_sum: int | None = None
    k1: int | None = None
    nu_upper: Fraction | None = None

    def to_json(self) -> dict[str, Any]:
        return {
            "k": self.k,
            "nu_avg_lower": _fraction_json(self.nu_avg_lower),
            "nu_maxdeg_lower": _fraction_json(self.nu_maxdeg_lower),
            "degree_sum": self.degree_sum,
            "k1": self.k1,
            "nu_upper": _fraction_json(self.nu_upper),
        }


def _check_ids(g: Graph, edge_ids: Iterable[int]) -> list[int]:
    ids = list(edge_ids)
    for e in ids:
        if not 0 <= e < g.m:
            raise UnknownEdgeId(f"edge id {e} not in range 0..{g.m - 1}")
    return ids


def is_matching(g: Graph, edge_ids: Iterable[int]) -> bool:
    seen: set[int] = set()
    for e in _check_ids(g, edge_ids):
        u, v = g.edges[e]
        if u in seen or v in seen:
            return False
        seen.add(u)
        seen.add(v)
    return True


def is_k_strong(g: Graph, matching: Matching | Iterable[int], k: int) -> bool:
    """Check strength ``k`` by bounded BFS in the host graph.

    Paths may run through matching edges themselves.
    """
    ids = sorted(matching.edge_ids) if isinstance(matching, Matching) else sorted(set(matching))
    if not is_matching(g, ids):
        raise NotAMatching(f"edges {ids} are not vertex-disjoint")
    if k < 0:
        raise ValueError(f"k must be nonnegative, got {k}")
    owner: dict[int, int] = {}
    for e in ids:
        u, v = g.edges[e]
        owner[u] = owner[v] = e
    adj = g.adjacency
    for e in ids:
        u, v = g.edges[e]
        seen = {u: 0, v: 0}
        queue = deque([u, v])
        while queue:
            x = queue.popleft()
            o = owner.get(x)
            if o is not None and o != e:
                return False
            d = seen[x]
            if d == k:
                continue
            for y, _ in adj[x]:
                if y not in seen:
                    seen[y] = d + 1
                    queue.append(y)
    return True


def conflict_graph(g: Graph, k: int) -> Graph:
    """``L(g)^(k+1)``; vertex ``i`` is EdgeId ``i``."""
    if k < 0:
        raise ValueError(f"k must be nonnegative, got {k}")
    lg, _ = line_graph(g)
    return graph_power(lg, k + 1)


def conflict_matrix(g: Graph, k: int) -> csr_matrix:
    """Sparse 0/1 adjacency of ``L(g)^(k+1)``, built from host reachability.

    Edges ``e`` and ``f`` conflict iff some endvertex pair is within distance
    ``k``.  Used where building the line-graph power explicitly is too slow.
    """
    if g.m == 0:
        raise EmptyGraph("conflict graph of a graph without edges")
    if k < 0:
        raise ValueError(f"k must be nonnegative, got {k}")
    n, m = g.n, g.m
    e = np.asarray(g.edges, dtype=np.int64)
    inc = csr_matrix(
        (np.ones(2 * m, dtype=np.float64),
         (np.concatenate([e[:, 0], e[:, 1]]), np.concatenate([np.arange(m), np.arange(m)]))),
        shape=(n, m),
    )
    a = g.csr()
    reach = identity(n, format="csr", dtype=np.float64)
    for _ in range(k):
        reach = reach + reach @ a
        reach.data[:] = 1.0
    c = (inc.T @ reach @ inc).tocsr()
    c.setdiag(0)
    c.eliminate_zeros()
    c.data[:] = 1.0
    c.sort_indices()
    return c


def conflict_bitsets(g: Graph, k: int) -> list[int]:
    cg = conflict_graph(g, k)
    return mis.bitset_adjacency(cg.n, cg.edges)


def max_k_strong_exact(g: Graph, k: int,
                       max_nodes: int | None = mis.DEFAULT_MAX_NODES) -> tuple[int, Matching]:
    """``nu_k(g)`` with the lexicographically smallest maximum witness."""
    if g.m == 0:
        raise EmptyGraph("strong matching number of a graph without edges")
    adj = conflict_bitsets(g, k)
    chosen = mis.max_independent_set(adj, max_nodes)
    return len(chosen), Matching.of(chosen, k)


def greedy_k_strong(g: Graph, k: int) -> tuple[int, Matching]:
    """Min-degree greedy on the conflict graph; polynomial time."""
    if g.m == 0:
        raise EmptyGraph("strong matching of a graph without edges")
    chosen = mis.greedy_min_degree(conflict_matrix(g, k))
    return len(chosen), Matching.of(chosen, k)


def greedy_guarantee(g: Graph, k: int) -> int:
    """``ceil(m / (d_av + 1))`` for the conflict graph, the greedy's floor."""
    c = conflict_matrix(g, k)
    m_l = c.shape[0]
    # d_av = nnz / m_l, so m_l / (d_av + 1) = m_l^2 / (nnz + m_l), exactly
    return -(-(m_l * m_l) // (c.nnz + m_l))


def k1_of(k: int) -> int:
    """Half-radius used by the upper bound: (k-1)/2 for odd k, (k-2)/2 for even k."""
    return (k - 1) // 2 if k % 2 else (k - 2) // 2


def degree_sum_denominator(g: Graph, k: int) -> int:
    """``sum_u d_1(u) * (d_{k+1}(u) - 1)``."""
    d1 = g.degrees()
    dk = neighborhood_counts(g, k + 1)
    return int(np.sum(d1 * (dk - 1) * (d1 > 0)))


def nu_lower_bounds(g: Graph, k: int) -> BoundsReport:
    """Average-degree and maximum-degree lower bounds, as exact rationals."""
    if g.m == 0:
        raise EmptyGraph("bounds of a graph without edges")
    if k < 0:
        raise ValueError(f"k must be nonnegative, got {k}")
    if has_isolated_edge(g):
        raise IsolatedEdgePresent("the lower bounds need a graph without isolated edges")
    denom = degree_sum_denominator(g, k)
    if denom == 0:
        raise ZeroDenominator("sum of d_1(u)(d_{k+1}(u)-1) is zero")
    m = g.m
    delta = max_degree(g)
    return BoundsReport(
        k=k,
        nu_avg_lower=Fraction(m * m, 4 * denom),
        nu_maxdeg_lower=Fraction(m, 8 * delta ** (k + 1)),
        degree_sum=denom,
    )


def nu_upper_bound(g: Graph, k: int) -> BoundsReport:
    """``n / min_u d_{k1}(u)`` for ``k >= 3``."""
    if k < 3:
        raise KTooSmall(f"the upper bound needs k >= 3, got {k}")
    k1 = k1_of(k)
    counts = neighborhood_counts(g, k1)
    low = int(counts.min()) if g.n else 0
    if low == 0:
        raise ZeroMinNeighborhood(f"some vertex has no other vertex within distance {k1}")
    return BoundsReport(k=k, k1=k1, nu_upper=Fraction(g.n, low))


def bounds_report(g: Graph, k: int) -> BoundsReport:
    """Lower bounds, plus the upper bound when ``k >= 3`` and it is defined."""
    low = nu_lower_bounds(g, k)
    if k < 3:
        return low
    try:
        up = nu_upper_bound(g, k)
    except ZeroMinNeighborhood:
        return BoundsReport(k=k, nu_avg_lower=low.nu_avg_lower, nu_maxdeg_lower=low.nu_maxdeg_lower,
                            degree_sum=low.degree_sum, k1=k1_of(k))
    return BoundsReport(k=k, nu_avg_lower=low.nu_avg_lower, nu_maxdeg_lower=low.nu_maxdeg_lower,
                        degree_sum=low.degree_sum, k1=up.k1, nu_upper=up.nu_upper)


def ceil_fraction(x: Fraction) -> int:
    return -(-x.numerator // x.denominator)


__all__ = [
    "BoundsReport",
    "Matching",
    "bounds_report",
    "ceil_fraction",
    "conflict_bitsets",
    "conflict_graph",
    "conflict_matrix",
    "degree_sum_denominator",
    "greedy_guarantee",
    "greedy_k_strong",
    "is_k_strong",
    "is_matching",
    "k1_of",
    "max_k_strong_exact",
    "nu_lower_bounds",
    "nu_upper_bound",
]

