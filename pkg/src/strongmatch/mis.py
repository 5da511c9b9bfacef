"""Maximum independent set search on bitset adjacency.

A graph here is ``adj: list[int]`` where bit ``j`` of ``adj[i]`` is set iff
``i ~ j``.  Every exact routine branches on the lowest-index candidate vertex
and tries "include" before "exclude", so solutions are visited in
lexicographic order of their sorted vertex lists.  Only strict improvements
replace the incumbent, which makes the returned set the lexicographically
smallest optimum.

Pruning uses a greedy clique cover of the remaining candidates: an independent
set takes at most one vertex per clique.  Candidates with no neighbour among
the candidates are taken immediately; every optimal completion contains them.
"""

from __future__ import annotations

import itertools
import math
from typing import Iterator, Sequence

import numpy as np
from scipy.sparse import csr_matrix

from .errors import BudgetExceeded

DEFAULT_MAX_NODES = 5_000_000


class EnumerationLimit(Exception):
    """More maximum independent sets exist than the caller allowed."""


def bits(x: int) -> Iterator[int]:
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def mask_of(vertices: Sequence[int]) -> int:
    out = 0
    for v in vertices:
        out |= 1 << v
    return out


def bitset_adjacency(n: int, edges: Sequence[tuple[int, int]]) -> list[int]:
    adj = [0] * n
    for u, v in edges:
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    return adj


def bitset_components(adj: list[int]) -> list[int]:
    """Vertex masks of the connected components, ordered by smallest vertex."""
    remaining = (1 << len(adj)) - 1
    comps = []
    while remaining:
        low = remaining & -remaining
        comp = low
        frontier = low
        while frontier:
            nxt = 0
            for v in bits(frontier):
                nxt |= adj[v]
            frontier = nxt & ~comp
            comp |= frontier
        comps.append(comp)
        remaining &= ~comp
    return comps


def clique_cover(adj: list[int], cand: int) -> list[int]:
    """Greedy partition of ``cand`` into cliques (first fit in index order)."""
    members: list[int] = []
    common: list[int] = []
    for v in bits(cand):
        bit = 1 << v
        for i, com in enumerate(common):
            if com & bit:
                members[i] |= bit
                common[i] = com & adj[v]
                break
        else:
            members.append(bit)
            common.append(adj[v])
    return members


def _cover_size(adj: list[int], cand: int) -> int:
    common: list[int] = []
    for v in bits(cand):
        bit = 1 << v
        for i, com in enumerate(common):
            if com & bit:
                common[i] = com & adj[v]
                break
        else:
            common.append(adj[v])
    return len(common)


def greedy_bits(adj: list[int], cand: int) -> int:
    """Min-degree greedy independent set inside ``cand`` (ties: smallest index)."""
    chosen = 0
    while cand:
        best_v, best_d = -1, -1
        for v in bits(cand):
            d = (adj[v] & cand).bit_count()
            if best_v < 0 or d < best_d:
                best_v, best_d = v, d
                if d == 0:
                    break
        bit = 1 << best_v
        chosen |= bit
        cand &= ~(adj[best_v] | bit)
    return chosen


def _isolated_in(adj: list[int], cand: int) -> int:
    free = 0
    for v in bits(cand):
        if not adj[v] & cand:
            free |= 1 << v
    return free


class _Budget:
    __slots__ = ("left", "limit")

    def __init__(self, limit: int | None):
        self.limit = limit
        self.left = math.inf if limit is None else limit

    def tick(self) -> None:
        self.left -= 1
        if self.left < 0:
            raise BudgetExceeded(f"branch and bound exceeded {self.limit} nodes")


def _max_in_component(adj: list[int], comp: int, budget: _Budget) -> int:
    # threshold starts one below the greedy size so a tying optimum is still found
    best_size = greedy_bits(adj, comp).bit_count() - 1
    best = 0

    def rec(chosen: int, size: int, cand: int) -> None:
        nonlocal best_size, best
        budget.tick()
        free = _isolated_in(adj, cand)
        if free:
            chosen |= free
            size += free.bit_count()
            cand &= ~free
        if not cand:
            if size > best_size:
                best_size, best = size, chosen
            return
        if size + _cover_size(adj, cand) <= best_size:
            return
        low = cand & -cand
        v = low.bit_length() - 1
        rec(chosen | low, size + 1, cand & ~adj[v] & ~low)
        rec(chosen, size, cand & ~low)

    rec(0, 0, comp)
    return best


def max_independent_set(adj: list[int], max_nodes: int | None = DEFAULT_MAX_NODES) -> list[int]:
    """Lexicographically smallest maximum independent set, as sorted vertex list."""
    budget = _Budget(max_nodes)
    out = 0
    for comp in bitset_components(adj):
        out |= _max_in_component(adj, comp, budget)
    return list(bits(out))


def _min_weight_in_component(adj: list[int], comp: int, weights: Sequence[float],
                             alpha: int, budget: _Budget) -> tuple[int, float]:
    best_w = math.inf
    best = 0

    def rec(chosen: int, size: int, weight: float, cand: int) -> None:
        nonlocal best_w, best
        budget.tick()
        free = _isolated_in(adj, cand)
        if free:
            chosen |= free
            size += free.bit_count()
            for v in bits(free):
                weight += weights[v]
            cand &= ~free
        need = alpha - size
        if not cand:
            if need == 0 and weight < best_w:
                best_w, best = weight, chosen
            return
        cover = clique_cover(adj, cand)
        if len(cover) < need:
            return
        mins = sorted(min(weights[v] for v in bits(c)) for c in cover)
        if weight + sum(mins[:need]) >= best_w:
            return
        low = cand & -cand
        v = low.bit_length() - 1
        rec(chosen | low, size + 1, weight + weights[v], cand & ~adj[v] & ~low)
        rec(chosen, size, weight, cand & ~low)

    rec(0, 0, 0.0, comp)
    return best, best_w


def component_sizes(adj: list[int], max_nodes: int | None = DEFAULT_MAX_NODES) -> list[tuple[int, int]]:
    """``(component mask, independence number)`` for every component."""
    budget = _Budget(max_nodes)
    return [(comp, _max_in_component(adj, comp, budget).bit_count())
            for comp in bitset_components(adj)]


def min_weight_maximum_independent_set(
    adj: list[int],
    weights: Sequence[float],
    max_nodes: int | None = DEFAULT_MAX_NODES,
    sizes: list[tuple[int, int]] | None = None,
) -> list[int]:
    """Among maximum independent sets, the one of least total weight.

    Weights must be nonnegative.  Ties in weight go to the lexicographically
    smallest vertex list.  Components are solved independently; pass ``sizes``
    from :func:`component_sizes` to skip recomputing them.
    """
    if sizes is None:
        sizes = component_sizes(adj, max_nodes)
    budget = _Budget(max_nodes)
    out = 0
    for comp, alpha in sizes:
        chosen, _ = _min_weight_in_component(adj, comp, weights, alpha, budget)
        out |= chosen
    return list(bits(out))


def _enumerate_component(adj: list[int], comp: int, alpha: int, limit: int,
                         budget: _Budget) -> list[int]:
    found: list[int] = []

    def rec(chosen: int, size: int, cand: int) -> None:
        budget.tick()
        free = _isolated_in(adj, cand)
        if free:
            chosen |= free
            size += free.bit_count()
            cand &= ~free
        if not cand:
            if size == alpha:
                found.append(chosen)
                if len(found) > limit:
                    raise EnumerationLimit(f"more than {limit} maximum sets")
            return
        if size + _cover_size(adj, cand) < alpha:
            return
        low = cand & -cand
        v = low.bit_length() - 1
        rec(chosen | low, size + 1, cand & ~adj[v] & ~low)
        rec(chosen, size, cand & ~low)

    rec(0, 0, comp)
    return found


def enumerate_component_sets(
    adj: list[int],
    sizes: list[tuple[int, int]],
    limit: int = 100_000,
    max_nodes: int | None = DEFAULT_MAX_NODES,
) -> list[list[int]]:
    """Maximum independent sets of each component (as masks, lexicographic order).

    A maximum set of the whole graph is one choice per component.  Raises
    :class:`EnumerationLimit` if any component has more than ``limit`` of them.
    """
    budget = _Budget(max_nodes)
    return [_enumerate_component(adj, comp, alpha, limit, budget) for comp, alpha in sizes]


def enumerate_maximum_independent_sets(
    adj: list[int],
    limit: int = 100_000,
    max_nodes: int | None = DEFAULT_MAX_NODES,
) -> list[tuple[int, ...]]:
    """All maximum independent sets in lexicographic order.

    Raises :class:`EnumerationLimit` when there are more than ``limit``.
    """
    per_comp = enumerate_component_sets(adj, component_sizes(adj, max_nodes), limit, max_nodes)
    total = 1
    for sets in per_comp:
        total *= len(sets)
        if total > limit:
            raise EnumerationLimit(f"more than {limit} maximum sets")
    out = []
    for combo in itertools.product(*per_comp):
        mask = 0
        for c in combo:
            mask |= c
        out.append(tuple(bits(mask)))
    out.sort()
    return out


def greedy_min_degree(conflict: csr_matrix) -> list[int]:
    """Min-degree greedy independent set on a sparse symmetric 0/1 matrix.

    Repeatedly takes a vertex of minimum remaining degree (smallest index on
    ties) and deletes it with its neighbours.  The result has size at least
    ``sum(1 / (deg(v) + 1))``.
    """
    n = conflict.shape[0]
    if n == 0:
        return []
    indptr = conflict.indptr
    indices = conflict.indices
    key = np.diff(indptr).astype(np.int64)
    dead = n + 1
    alive = np.ones(n, dtype=bool)
    chosen = []
    while True:
        v = int(np.argmin(key))
        if key[v] >= dead:
            break
        chosen.append(v)
        nb = indices[indptr[v]:indptr[v + 1]]
        removed = np.concatenate(([v], nb[alive[nb]]))
        alive[removed] = False
        key[removed] = dead
        touched = np.concatenate([indices[indptr[r]:indptr[r + 1]] for r in removed])
        touched = touched[alive[touched]]
        if touched.size:
            key -= np.bincount(touched, minlength=n)
    chosen.sort()
    return chosen


def caro_wei_bound(degrees: np.ndarray) -> float:
    """``sum(1 / (d + 1))``, the guaranteed size of the min-degree greedy."""
    return float(np.sum(1.0 / (np.asarray(degrees, dtype=np.float64) + 1.0)))
