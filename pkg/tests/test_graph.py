import math
import threading

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from strongmatch.errors import DuplicateEdge, EmptyGraph, SelfLoop, VertexOutOfRange
from strongmatch.generators import complete_graph, cycle_graph, path_graph, star_graph
from strongmatch.graph import (
    INFINITY,
    bfs_distances,
    build_graph,
    components,
    diameter,
    graph_power,
    has_isolated_edge,
    is_connected,
    line_graph,
    max_degree,
    neighborhood_count,
    neighborhood_counts,
)

from oracles import nx_graph


@st.composite
def graphs(draw, max_n=12, min_m=0):
    n = draw(st.integers(2, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, min_size=min(min_m, len(pairs)),
                           max_size=min(30, len(pairs))))
    return build_graph(n, chosen)


def test_path_construction():
    g = build_graph(4, [(0, 1), (1, 2), (2, 3)])
    assert g.n == 4 and g.m == 3
    assert g.edge_id(2, 1) == 1
    assert g.neighbors(1) == [0, 2]


def test_cycle_construction():
    g = build_graph(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)])
    assert all(g.degree(u) == 2 for u in range(6))
    assert g == cycle_graph(6)


@pytest.mark.parametrize("n,pairs,err", [
    (3, [(0, 1), (0, 1)], DuplicateEdge),
    (3, [(0, 1), (1, 0)], DuplicateEdge),
    (3, [(1, 1)], SelfLoop),
    (3, [(0, 3)], VertexOutOfRange),
    (3, [(-1, 2)], VertexOutOfRange),
])
def test_build_rejects(n, pairs, err):
    with pytest.raises(err):
        build_graph(n, pairs)


def test_bfs_examples():
    c6 = cycle_graph(6)
    assert bfs_distances(c6, 0)[3] == 3
    p4 = path_graph(4)
    d = bfs_distances(p4, 0)
    assert d[3] == 3 and d[1] == 1 and d[0] == 0
    two = build_graph(4, [(0, 1), (2, 3)])
    assert bfs_distances(two, 0)[2] == INFINITY
    assert math.isinf(INFINITY)
    with pytest.raises(VertexOutOfRange):
        bfs_distances(p4, 4)


def test_neighborhood_examples():
    assert neighborhood_count(path_graph(4), 1, 1) == 2
    c6 = cycle_graph(6)
    assert all(neighborhood_count(c6, u, 2) == 4 for u in range(6))
    g = build_graph(3, [(0, 1)])
    assert [neighborhood_count(g, 2, j) for j in (1, 2, 5)] == [0, 0, 0]
    with pytest.raises(VertexOutOfRange):
        neighborhood_count(g, 3, 1)


def test_max_degree_examples():
    assert max_degree(path_graph(4)) == 2
    assert max_degree(star_graph(3)) == 3
    assert max_degree(build_graph(5, [])) == 0


def test_isolated_edge_examples():
    assert has_isolated_edge(build_graph(2, [(0, 1)]))
    assert not has_isolated_edge(path_graph(4))
    assert has_isolated_edge(build_graph(5, [(0, 1), (2, 3), (3, 4), (2, 4)]))


def test_line_graph_examples():
    lg, mapping = line_graph(path_graph(4))
    assert lg.edge_set() == {(0, 1), (1, 2)}
    assert mapping == (0, 1, 2)
    tri, _ = line_graph(complete_graph(3))
    assert tri.edge_set() == {(0, 1), (0, 2), (1, 2)}
    two, _ = line_graph(build_graph(4, [(0, 1), (2, 3)]))
    assert two.n == 2 and two.m == 0
    with pytest.raises(EmptyGraph):
        line_graph(build_graph(3, []))


def test_graph_power_examples():
    lg, _ = line_graph(path_graph(4))
    assert graph_power(lg, 2).edge_set() == complete_graph(3).edge_set()
    c6 = cycle_graph(6)
    assert graph_power(c6, 1).edge_set() == c6.edge_set()
    assert graph_power(c6, 3).edge_set() == complete_graph(6).edge_set()


def test_components_and_diameter():
    g = build_graph(5, [(0, 1), (2, 3), (3, 4)])
    assert not is_connected(g)
    labels = components(g)
    assert labels[0] == labels[1] != labels[2]
    assert math.isinf(diameter(g))
    assert diameter(cycle_graph(6)) == 3


@settings(max_examples=60, deadline=None)
@given(graphs(max_n=15))
def test_bfs_matches_networkx_and_is_symmetric(g):
    ref = dict(nx.all_pairs_shortest_path_length(nx_graph(g)))
    for u in range(g.n):
        d = bfs_distances(g, u)
        for v in range(g.n):
            assert d[v] == ref[u].get(v, INFINITY)
            assert d[v] == bfs_distances(g, v)[u]
        for a, b in g.edges:
            assert d[a] <= d[b] + 1 and d[b] <= d[a] + 1


@settings(max_examples=60, deadline=None)
@given(graphs(max_n=15))
def test_neighborhood_count_monotone_and_batched(g):
    prev = [0] * g.n
    for j in range(1, 6):
        batch = neighborhood_counts(g, j)
        for u in range(g.n):
            assert batch[u] == neighborhood_count(g, u, j) >= prev[u]
        prev = list(batch)
    if g.m and is_connected(g):
        dia = int(diameter(g))
        assert all(neighborhood_count(g, u, dia) == g.n - 1 for u in range(g.n))


@settings(max_examples=60, deadline=None)
@given(graphs(max_n=12, min_m=1))
def test_line_graph_degrees(g):
    lg, _ = line_graph(g)
    assert lg.n == g.m
    for e, (u, v) in enumerate(g.edges):
        assert lg.degree(e) == g.degree(u) + g.degree(v) - 2


@settings(max_examples=40, deadline=None)
@given(graphs(max_n=12), st.integers(1, 4))
def test_graph_power_nesting(g, r):
    assert graph_power(g, r).edge_set() <= graph_power(g, r + 1).edge_set()
    assert graph_power(g, 1).edge_set() == g.edge_set()
    ref = dict(nx.all_pairs_shortest_path_length(nx_graph(g), cutoff=r))
    expect = {(u, v) for u in ref for v, d in ref[u].items() if u < v and 1 <= d <= r}
    assert graph_power(g, r).edge_set() == expect


@settings(max_examples=60, deadline=None)
@given(graphs())
def test_degree_sum_and_symmetric_adjacency(g):
    assert int(g.degrees().sum()) == 2 * g.m
    for u in range(g.n):
        for v, e in g.adjacency[u]:
            assert (u, e) in g.adjacency[v]


def test_bfs_cache_is_thread_safe():
    g = cycle_graph(200)
    results = []

    def work():
        results.append([bfs_distances(g, u)[(u + 100) % 200] for u in range(200)])

    threads = [threading.Thread(target=work) for _ in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(r == [100] * 200 for r in results)
