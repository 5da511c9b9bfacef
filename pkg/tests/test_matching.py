from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from strongmatch.errors import (
    EmptyGraph,
    IsolatedEdgePresent,
    KTooSmall,
    NotAMatching,
    UnknownEdgeId,
    ZeroMinNeighborhood,
)
from strongmatch.generators import complete_graph, cycle_graph, path_graph, random_connected_graph
from strongmatch.graph import build_graph, has_isolated_edge, is_connected
from strongmatch.matching import (
    BoundsReport,
    Matching,
    bounds_report,
    ceil_fraction,
    conflict_bitsets,
    conflict_matrix,
    greedy_guarantee,
    greedy_k_strong,
    is_k_strong,
    is_matching,
    k1_of,
    max_k_strong_exact,
    nu_lower_bounds,
    nu_upper_bound,
)

from oracles import brute_nu, nx_graph, pair_conflicts
from test_graph import graphs

P4 = path_graph(4)
C6 = cycle_graph(6)


def test_is_matching_examples():
    assert is_matching(P4, {0, 2})
    assert not is_matching(P4, {0, 1})
    assert is_matching(P4, set())
    with pytest.raises(UnknownEdgeId):
        is_matching(P4, {3})


def test_is_k_strong_examples():
    assert is_k_strong(P4, Matching.of([0, 2]), 0)
    assert not is_k_strong(P4, Matching.of([0, 2]), 1)
    assert is_k_strong(C6, Matching.of([C6.edge_id(0, 1), C6.edge_id(3, 4)]), 1)
    with pytest.raises(NotAMatching):
        is_k_strong(P4, [0, 1], 0)


@pytest.mark.parametrize("g,k,size", [(P4, 0, 2), (P4, 1, 1), (C6, 0, 3), (C6, 1, 2), (C6, 2, 1)])
def test_exact_examples(g, k, size):
    got, witness = max_k_strong_exact(g, k)
    assert got == size == witness.size
    assert is_k_strong(g, witness, k)


def test_exact_witness_is_lexicographically_smallest():
    assert max_k_strong_exact(P4, 0)[1].sorted_ids() == [0, 2]
    assert max_k_strong_exact(P4, 1)[1].sorted_ids() == [0]
    assert max_k_strong_exact(C6, 1)[1].sorted_ids() == [0, 3]


def test_empty_graph_errors():
    g = build_graph(3, [])
    for fn in (max_k_strong_exact, greedy_k_strong, nu_lower_bounds):
        with pytest.raises(EmptyGraph):
            fn(g, 1)


@pytest.mark.parametrize("g,k,size", [(P4, 1, 1), (C6, 0, 3), (build_graph(2, [(0, 1)]), 0, 1),
                                      (build_graph(2, [(0, 1)]), 5, 1)])
def test_greedy_examples(g, k, size):
    got, witness = greedy_k_strong(g, k)
    assert got == size
    assert is_k_strong(g, witness, k)


def test_lower_bound_examples():
    r = nu_lower_bounds(P4, 0)
    assert (r.nu_avg_lower, r.nu_maxdeg_lower, r.degree_sum) == (Fraction(9, 16), Fraction(3, 16), 4)
    r = nu_lower_bounds(C6, 0)
    assert (r.nu_avg_lower, r.nu_maxdeg_lower, r.degree_sum) == (Fraction(3, 4), Fraction(6, 16), 12)
    with pytest.raises(IsolatedEdgePresent):
        nu_lower_bounds(build_graph(2, [(0, 1)]), 0)


def test_upper_bound_examples():
    r = nu_upper_bound(C6, 3)
    assert (r.k1, r.nu_upper) == (1, Fraction(3))
    assert r.nu_upper >= max_k_strong_exact(C6, 3)[0] == 1
    assert nu_upper_bound(C6, 4).nu_upper == 3 and k1_of(4) == 1
    assert nu_upper_bound(path_graph(10), 3).nu_upper == 10
    with pytest.raises(KTooSmall):
        nu_upper_bound(C6, 2)
    with pytest.raises(ZeroMinNeighborhood):
        nu_upper_bound(build_graph(5, [(0, 1), (1, 2), (2, 3)]), 3)


def test_k1_definition():
    assert [k1_of(k) for k in range(3, 10)] == [1, 1, 2, 2, 3, 3, 4]


def test_bounds_report_json():
    r = bounds_report(C6, 3)
    js = r.to_json()
    assert js["nu_upper"] == {"num": 3, "den": 1}
    assert js["nu_avg_lower"]["den"] > 0
    assert bounds_report(P4, 1).nu_upper is None
    # an endpoint of P10 has d_1 = 1 but the path's ends sit far apart: still defined
    assert bounds_report(path_graph(10), 3).nu_upper == 10
    assert BoundsReport(k=0).to_json()["nu_upper"] is None


def test_matching_json_round_trip():
    m = Matching.of([5, 1, 3], 2)
    assert m.to_json() == {"k": 2, "edge_ids": [1, 3, 5], "size": 3}
    assert Matching.from_json(m.to_json()) == m


def test_average_bound_fails_on_dense_graphs():
    # K_17 at k = 1: d_1 = d_2 = 16 everywhere, so the statistic is
    # 136^2 / (4 * 17 * 16 * 15) = 17/15, whose ceiling 2 exceeds nu_1 = 1
    # (any two edges of K_17 are joined by an edge).
    g = complete_graph(17)
    r = nu_lower_bounds(g, 1)
    assert r.nu_avg_lower == Fraction(136 * 136, 4 * 17 * 16 * 15)
    assert r.nu_avg_lower == Fraction(17, 15)
    assert ceil_fraction(r.nu_avg_lower) == 2
    assert max_k_strong_exact(g, 1)[0] == 1


@settings(max_examples=80, deadline=None)
@given(graphs(max_n=9, min_m=1), st.integers(0, 3))
def test_exact_matches_brute_force(g, k):
    if g.m > 12:
        return
    size, witness = max_k_strong_exact(g, k)
    assert size == brute_nu(g, k)
    assert is_k_strong(g, witness, k)


@settings(max_examples=80, deadline=None)
@given(graphs(max_n=12, min_m=1), st.integers(0, 3))
def test_conflict_routes_agree(g, k):
    bitsets = conflict_bitsets(g, k)
    assert bitsets == pair_conflicts(g, k)
    c = conflict_matrix(g, k)
    for e in range(g.m):
        row = set(c.indices[c.indptr[e]:c.indptr[e + 1]].tolist())
        assert row == {f for f in range(g.m) if bitsets[e] >> f & 1}


@settings(max_examples=60, deadline=None)
@given(graphs(max_n=10, min_m=1))
def test_monotone_in_k_and_classical_matching(g):
    sizes = [max_k_strong_exact(g, k)[0] for k in range(5)]
    assert sizes == sorted(sizes, reverse=True)
    assert sizes[0] == len(nx.max_weight_matching(nx_graph(g), maxcardinality=True))


@settings(max_examples=60, deadline=None)
@given(graphs(max_n=10, min_m=1), st.integers(0, 4), st.data())
def test_subset_closure_and_strength_nesting(g, k, data):
    _, witness = max_k_strong_exact(g, k)
    ids = witness.sorted_ids()
    sub = data.draw(st.lists(st.sampled_from(ids), unique=True)) if ids else []
    assert is_k_strong(g, sub, k)
    assert all(is_k_strong(g, witness, j) for j in range(k + 1))


@settings(max_examples=60, deadline=None)
@given(graphs(max_n=10, min_m=1), st.integers(0, 4))
def test_greedy_guarantee_and_dominance(g, k):
    size, witness = greedy_k_strong(g, k)
    assert is_k_strong(g, witness, k)
    assert greedy_guarantee(g, k) <= size <= max_k_strong_exact(g, k)[0]


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 14), st.integers(0, 10_000), st.integers(0, 5))
def test_bounds_sandwich_on_sparse_connected_graphs(n, seed, extra):
    m = min(n - 1 + extra, n * (n - 1) // 2)
    g = random_connected_graph(n, m, seed)
    assert is_connected(g) and not has_isolated_edge(g)
    for k in range(4):
        r = nu_lower_bounds(g, k)
        nu = max_k_strong_exact(g, k)[0]
        assert r.nu_maxdeg_lower <= r.nu_avg_lower
        assert ceil_fraction(r.nu_maxdeg_lower) <= nu
    for k in (3, 4, 5):
        assert max_k_strong_exact(g, k)[0] <= nu_upper_bound(g, k).nu_upper
