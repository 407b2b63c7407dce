"""Tests for bitset graphs, complements, neighbourhoods and the exact copy searches."""

import sys
from pathlib import Path

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

REPO_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO_ROOT / "core" / "lab"))

from graph_core import (
    Embedding,
    Graph,
    MultipartiteWitness,
    bits,
    check_embedding,
    check_multipartite,
    complement,
    contains_forest_copy,
    find_multipartite,
    find_subgraph_copy,
    mask_of,
    neighborhood,
)
from lab_utils import PreconditionViolated, SearchBudgetExceeded
from tree_tools import RootedForest


def cycle(n):
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


@st.composite
def graphs(draw, max_n=9):
    n = draw(st.integers(min_value=0, max_value=max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return Graph.from_edges(n, chosen)


# --- construction ---

class TestGraph:
    def test_from_edges_symmetric(self):
        g = Graph.from_edges(3, [(0, 1), (1, 2)])
        assert g.has_edge(1, 0) and g.has_edge(2, 1)
        assert not g.has_edge(0, 2)
        assert g.edges() == [(0, 1), (1, 2)]
        assert g.edge_count() == 2
        assert g.max_degree() == 2

    def test_self_loop_rejected(self):
        with pytest.raises(ValueError, match="self-loop"):
            Graph.from_edges(2, [(1, 1)])

    def test_edge_outside_range_rejected(self):
        with pytest.raises(ValueError):
            Graph.from_edges(2, [(0, 2)])

    def test_vertex_limit(self):
        import config_loader
        config_loader.set_runtime_overrides([("graph.max_vertices", "4")])
        with pytest.raises(PreconditionViolated):
            Graph.empty(5)

    def test_networkx_round_trip_preserves_edges(self):
        nxg = nx.petersen_graph()
        g = Graph.from_networkx(nxg)
        assert g.n == 10
        assert g.edge_count() == 15
        assert nx.is_isomorphic(g.to_networkx(), nxg)

    def test_bit_helpers(self):
        assert bits(mask_of([5, 0, 3])) == [0, 3, 5]


# --- complement ---

class TestComplement:
    def test_complete_to_empty(self):
        assert complement(Graph.complete(3)) == Graph.empty(3)

    def test_empty_to_complete(self):
        assert complement(Graph.empty(5)) == Graph.complete(5)

    @given(graphs())
    def test_involution(self, g):
        assert complement(complement(g)) == g

    @given(graphs())
    def test_edge_counts_add_up(self, g):
        assert g.edge_count() + complement(g).edge_count() == g.n * (g.n - 1) // 2


# --- neighbourhoods ---

class TestNeighborhood:
    def test_single_edge(self):
        g = Graph.from_edges(2, [(0, 1)])
        assert neighborhood(g, {0}) == frozenset({1})

    def test_open_excludes_the_set(self):
        g = Graph.complete(4)
        assert neighborhood(g, {0, 1}) == frozenset({2, 3})
        assert neighborhood(g, {0, 1}, mode="gamma") == frozenset({0, 1, 2, 3})

    def test_universe_restricts(self):
        g = Graph.complete(5)
        assert neighborhood(g, {0}, universe=[0, 1, 2]) == frozenset({1, 2})

    def test_universe_outside_graph_rejected(self):
        with pytest.raises(PreconditionViolated):
            neighborhood(Graph.complete(3), {0}, universe=[7])

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            neighborhood(Graph.complete(3), {0}, mode="closed")


# --- multipartite search ---

class TestFindMultipartite:
    def test_c4_is_k22(self):
        parts = find_multipartite(cycle(4), [2, 2])
        assert set(parts) == {frozenset({0, 2}), frozenset({1, 3})}

    def test_one_part_is_any_m_vertices(self):
        parts = find_multipartite(Graph.empty(6), [4])
        assert len(parts) == 1 and len(parts[0]) == 4

    def test_empty_graph_has_no_edge(self):
        assert find_multipartite(Graph.empty(5), [1, 1]) is None

    def test_complete_tripartite_found(self):
        g = Graph.from_networkx(nx.complete_multipartite_graph(1, 2, 2))
        parts = find_multipartite(g, [1, 2, 2])
        assert check_multipartite(g, parts, [1, 2, 2]) == []

    def test_decreasing_sizes_rejected(self):
        with pytest.raises(PreconditionViolated):
            find_multipartite(Graph.complete(4), [2, 1])

    def test_budget_exhaustion(self):
        with pytest.raises(SearchBudgetExceeded):
            # triangle-free host: every first choice is tried and fails
            find_multipartite(Graph.from_networkx(nx.complete_bipartite_graph(6, 6)), [1, 1, 1], budget=5)

    @settings(max_examples=60)
    @given(graphs(max_n=8), st.sampled_from([(1, 1), (1, 2), (2, 2), (1, 1, 1)]))
    def test_agrees_with_brute_force(self, g, sizes):
        found = find_multipartite(g, sizes)
        if found is not None:
            assert check_multipartite(g, found, sizes) == []
        else:
            pattern = Graph.from_networkx(nx.complete_multipartite_graph(*sizes))
            matcher = nx.algorithms.isomorphism.GraphMatcher(g.to_networkx(), pattern.to_networkx())
            assert not matcher.subgraph_is_monomorphic()

    def test_witness_checked_in_complement(self):
        g = complement(cycle(4))
        witness = MultipartiteWitness((frozenset({0, 2}), frozenset({1, 3})))
        assert witness.problems_in_complement(g, [2, 2]) == []
        assert witness.sizes == (2, 2)


# --- pattern and forest copies ---

class TestCopies:
    def test_p3_in_triangle(self):
        emb = contains_forest_copy(Graph.complete(3), RootedForest.path(3))
        assert emb is not None
        assert check_embedding(Graph.complete(3), emb) == []

    def test_claw_not_in_c5(self):
        assert contains_forest_copy(cycle(5), RootedForest.star(4)) is None

    def test_spanning_path_in_prism(self):
        prism = Graph.from_networkx(nx.circular_ladder_graph(3))
        emb = contains_forest_copy(prism, RootedForest.path(6))
        assert emb is not None
        assert sorted(emb.images) == list(range(6))
        assert check_embedding(prism, emb) == []

    def test_universe_confines_copy(self):
        emb = contains_forest_copy(Graph.complete(6), RootedForest.path(3), universe=[3, 4, 5])
        assert set(emb.images) == {3, 4, 5}

    def test_through_edge(self):
        host = cycle(6)
        mapping = find_subgraph_copy(host, Graph.complete(2), through_edge=(2, 3))
        assert set(mapping.values()) == {2, 3}
        assert find_subgraph_copy(host, Graph.complete(2), through_edge=(0, 3)) is None

    def test_check_embedding_reports_non_edge(self):
        f = RootedForest.path(3)
        emb = Embedding(f, (0, 2, 4))
        problems = check_embedding(cycle(6), emb)
        assert problems and "non-edge" in problems[0]

    def test_check_embedding_roots(self):
        f = RootedForest.path(2)
        emb = Embedding(f, (0, 1), roots=(1,))
        assert any("prescribed" in p for p in check_embedding(Graph.complete(2), emb))
