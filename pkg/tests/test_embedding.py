"""Tests for the forest embeddings and the witnesses they fall back to."""

import sys
from pathlib import Path

import networkx as nx
import pytest

REPO_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO_ROOT / "core" / "lab"))

from embedding import (
    LinkageParams,
    SOUND_COEFFICIENT,
    e2_problems,
    embed_avoiding_bipartite,
    embed_avoiding_multipartite,
    embed_many_leaves,
    embed_two_trees,
    embed_via_linkage,
    fp_embed_forest,
    fp_hypothesis_check,
    fp_slack,
    many_leaves_goodness,
    matchable_core,
    near_extremal_embed,
)
from graph_core import Embedding, Graph, MultipartiteWitness, check_embedding, complement
from lab_utils import (
    CapExceeded,
    HypothesisViolated,
    NoEmbedding,
    PreconditionViolated,
    ScaleInfeasible,
    SearchBudgetExceeded,
    Unresolved,
    WitnessCascade,
)
from tree_tools import RootedForest, random_bounded_tree


def clique_edges(vertices):
    vertices = list(vertices)
    return [(u, v) for i, u in enumerate(vertices) for v in vertices[i + 1:]]


def k2_40_complement():
    """An edge {0, 1} and a K_40 on 2..41 with nothing between them."""
    return complement(Graph.from_networkx(nx.complete_bipartite_graph(2, 40)))


# --- critical-set induction ---

class TestFpEmbedForest:
    def test_single_vertices_stay_at_roots(self):
        g = Graph.complete(20)
        forest = RootedForest((-1, -1))
        emb = fp_embed_forest(g, (3, 5), forest, 1, 1, 2)
        assert emb.images == (3, 5)
        assert emb.certified
        assert emb.metadata["e2"] is True

    def test_certified_path(self):
        g = Graph.complete(50)
        emb = fp_embed_forest(g, (7,), RootedForest.path(8), 2, 2, 8, mode="certified")
        assert emb.certified and emb.images[0] == 7
        assert check_embedding(g, emb) == []
        assert e2_problems(g, emb.images, 2, 2) == []

    def test_small_host_falls_back_to_search(self):
        # |Gamma(S)| = 20 < M + 10*delta*m = 48, so only the search applies
        g = Graph.complete(20)
        emb = fp_embed_forest(g, (0,), RootedForest.path(8), 2, 2, 8)
        assert not emb.certified
        assert emb.metadata["mode"] == "heuristic"
        assert emb.metadata["e2"] is True
        assert "large-set" in emb.metadata["reason"]

    def test_certified_refuses_failed_hypothesis(self):
        with pytest.raises(HypothesisViolated) as exc:
            fp_embed_forest(Graph.complete(20), (0,), RootedForest.path(8), 2, 2, 8, mode="certified")
        assert len(exc.value.witness) == 2

    def test_certified_caps(self):
        with pytest.raises(CapExceeded):
            fp_embed_forest(Graph.complete(60), (0,), RootedForest.path(30), 2, 1, 30, mode="certified")

    def test_two_trees_in_regular_host(self):
        g = Graph.from_networkx(nx.random_regular_graph(8, 60, seed=5))
        t1 = random_bounded_tree(10, 3, 0.5, seed=1)
        t2 = random_bounded_tree(10, 3, 0.5, seed=2)
        forest = RootedForest(t1.parent + tuple(p + 10 if p >= 0 else -1 for p in t2.parent), 3)
        emb = fp_embed_forest(g, (0, 30), forest, 3, 2, 20)
        assert check_embedding(g, emb) == []
        assert emb.roots == (0, 30)

    def test_input_checks(self):
        g = Graph.complete(10)
        with pytest.raises(PreconditionViolated):
            fp_embed_forest(g, (0,), RootedForest.path(5), 2, 1, 4)
        with pytest.raises(PreconditionViolated):
            fp_embed_forest(g, (0, 1), RootedForest.path(3), 2, 1, 4)
        with pytest.raises(PreconditionViolated):
            fp_embed_forest(g, (0,), RootedForest.path(3), 2, 1, 4, mode="greedy")

    def test_exhausted_search_is_a_definite_answer(self):
        # vertex 1 has no free neighbour for the second step of the path
        g = Graph.from_edges(3, [(0, 1)])
        with pytest.raises(NoEmbedding) as exc:
            fp_embed_forest(g, (0,), RootedForest.path(3), 2, 1, 3, mode="heuristic")
        assert not isinstance(exc.value, Unresolved)

    def test_budget_runs_out_before_the_search_ends(self):
        with pytest.raises(SearchBudgetExceeded):
            fp_embed_forest(Graph.complete(10), (0,), RootedForest.path(8), 2, 1, 8,
                            mode="heuristic", budget=2)

    def test_critical_sets_steer_the_images(self):
        # 34 and 35 see exactly 4*delta clique vertices each, so {34}, {35}
        # and {34, 35} stay critical and their neighbourhoods stay unused
        edges = clique_edges(range(34)) + [(34, v) for v in range(1, 5)] + [(35, v) for v in range(5, 9)]
        g = Graph.from_edges(36, edges)
        emb = fp_embed_forest(g, (0,), RootedForest.path(3), 1, 3, 3, mode="certified")
        assert emb.certified
        assert emb.images == (0, 9, 10)
        assert not set(emb.images) & set(range(1, 9))
        log = emb.metadata["critical_log"]
        assert len(log) == 2
        for step in log:
            assert step["critical"] == [[34], [35], [34, 35]]
            weights = {int(x): w for x, w in step["weights"].items()}
            for a in step["critical"]:
                for b in step["critical"]:
                    union = set(a) | set(b)
                    assert len(union) <= 3
                    assert fp_slack(g, union, weights, 1) == 0
        assert log[1]["weights"] == {"0": 1, "9": 2}

    def test_slack_counts_root_weights(self):
        g = Graph.complete(6)
        # Gamma({0}) - X = {1..5} - {0} has 5 members; weight of root 0 is 2
        assert fp_slack(g, {0}, {0: 2}, 1) == 3
        assert fp_slack(g, {1}, {0: 2}, 1) == 0

    def test_hypothesis_check_kinds(self):
        check = fp_hypothesis_check(Graph.empty(10), (0,), RootedForest.path(2), 1, 1, 2)
        assert not check.holds and check.kind == "small"


# --- bipartite and multipartite avoidance ---

class TestAvoidingBipartite:
    def test_complete_host_embeds(self):
        g = Graph.complete(100)
        t = random_bounded_tree(20, 3, 0.5, seed=9)
        out = embed_avoiding_bipartite(g, t, 3, 2, 2)
        assert isinstance(out, Embedding)
        assert out.certified
        assert check_embedding(g, out) == []

    def test_witness_from_non_expanding_pair(self):
        g = k2_40_complement()
        out = embed_avoiding_bipartite(g, RootedForest.path(3), 2, 2, 2, coefficient=0)
        assert isinstance(out, MultipartiteWitness)
        assert out.parts[0] == frozenset({0, 1})
        assert out.problems_in_complement(g, [2, 2]) == []

    def test_single_vertex(self):
        out = embed_avoiding_bipartite(Graph.complete(5), RootedForest.path(1), 1, 1, 1, coefficient=0)
        assert out.images == (0,)

    def test_host_size_checked(self):
        with pytest.raises(PreconditionViolated):
            embed_avoiding_bipartite(Graph.complete(60), RootedForest.path(20), 3, 2, 2)

    def test_forest_is_chained(self):
        g = Graph.complete(30)
        f = RootedForest((-1, 0, -1, 2, 2))
        out = embed_avoiding_bipartite(g, f, 2, 1, 1, coefficient=0)
        assert out.forest == f
        assert check_embedding(g, out) == []


class TestAvoidingMultipartite:
    def test_k1_is_always_a_witness(self):
        with pytest.raises(WitnessCascade) as exc:
            embed_avoiding_multipartite(Graph.complete(4), RootedForest.path(3), 2, 1, 3)
        assert exc.value.witness.sizes == (3,)

    def test_k2_is_the_bipartite_step(self):
        g = Graph.complete(30)
        t = random_bounded_tree(20, 3, 0.5, seed=3)
        emb = embed_avoiding_multipartite(g, t, 3, 2, 2, coefficient=0)
        assert [step["outcome"] for step in emb.metadata["trace"]] == ["embedded"]

    def test_descent_ends_in_witness(self):
        g = k2_40_complement()
        with pytest.raises(WitnessCascade) as exc:
            embed_avoiding_multipartite(g, RootedForest.path(3), 2, 2, 2, coefficient=0)
        assert exc.value.witness.problems_in_complement(g, [2, 2]) == []

    def test_k3_embeds_after_one_descent(self):
        cross = [(5 * i, 42 + 5 * i) for i in range(8)]
        g = Graph.from_edges(80, clique_edges(range(40)) + clique_edges(range(40, 80)) + cross)
        t = random_bounded_tree(12, 3, 0.5, seed=4)
        emb = embed_avoiding_multipartite(g, t, 3, 3, 2, coefficient=3)
        assert [step["outcome"] for step in emb.metadata["trace"]] == ["witness", "embedded"]
        assert check_embedding(g, emb) == []
        assert min(emb.images) >= 40


class TestTwoTrees:
    def test_union_is_embedded(self):
        g = Graph.complete(20)
        emb = embed_two_trees(g, RootedForest.path(3), RootedForest.path(4), 2, 3, 1, coefficient=0)
        assert emb.forest.n == 7
        assert check_embedding(g, emb) == []

    def test_needs_k3(self):
        with pytest.raises(PreconditionViolated):
            embed_two_trees(Graph.complete(20), RootedForest.path(3), RootedForest.path(4), 2, 2, 1)

    def test_order_of_trees(self):
        with pytest.raises(PreconditionViolated):
            embed_two_trees(Graph.complete(20), RootedForest.path(4), RootedForest.path(3), 2, 3, 1,
                            coefficient=0)


# --- many leaves ---

class TestManyLeaves:
    def test_star_in_complete_host(self):
        t = RootedForest.star(8)
        emb = embed_many_leaves(Graph.complete(8), t, 7, (1, 1), coefficient=0)
        assert isinstance(emb, Embedding)
        assert check_embedding(Graph.complete(8), emb) == []

    def test_empty_host_gives_witness(self):
        g = Graph.empty(4)
        out = embed_many_leaves(g, RootedForest.star(4), 3, (1, 1), coefficient=0)
        assert isinstance(out, MultipartiteWitness)
        assert out.problems_in_complement(g, [1, 1]) == []

    def test_leaf_count_required(self):
        with pytest.raises(PreconditionViolated):
            embed_many_leaves(Graph.complete(8), RootedForest.star(8), 7, (1, 1))

    def test_goodness_report(self):
        h = Graph.complete(3)
        report = many_leaves_goodness(RootedForest.star(41), h, delta=1)
        assert report.chi == 3 and report.sigma == 1
        assert report.classes == (1, 1, 1)
        assert report.by_size and report.by_class
        assert not many_leaves_goodness(RootedForest.star(40), h, delta=1).by_size


# --- linked systems ---

class TestViaLinkage:
    Z, X, W = range(50), range(50, 56), range(56, 60)

    def test_path_through_connections(self):
        g = Graph.complete(60)
        params = LinkageParams(r=6, y=1, k=3, m=1, delta=2, coefficient=0)
        emb = embed_via_linkage(g, self.Z, self.X, self.W, RootedForest.path(24), params)
        assert check_embedding(g, emb) == []
        assert emb.metadata["paths"] == 1

    def test_no_bare_paths(self):
        params = LinkageParams(r=6, y=1, k=3, m=1, delta=9, coefficient=0)
        with pytest.raises(PreconditionViolated):
            embed_via_linkage(Graph.complete(60), self.Z, self.X, self.W, RootedForest.star(10), params)

    def test_zero_paths_is_two_tree_embedding(self):
        g = Graph.complete(60)
        params = LinkageParams(r=6, y=1, k=3, m=1, delta=2, coefficient=0, paths=0)
        emb = embed_via_linkage(g, self.Z, self.X, self.W, RootedForest.path(24), params)
        assert set(emb.images) <= set(self.Z)
        assert "trace" in emb.metadata

    def test_r_too_short_for_connections(self):
        params = LinkageParams(r=5, y=1, k=3, m=1, delta=2, coefficient=0)
        with pytest.raises(ScaleInfeasible):
            embed_via_linkage(Graph.complete(60), self.Z, self.X, self.W, RootedForest.path(24), params)

    def test_regions_must_be_disjoint(self):
        params = LinkageParams(r=6, y=1, k=3, m=1, delta=2)
        with pytest.raises(PreconditionViolated):
            embed_via_linkage(Graph.complete(10), range(5), range(4, 8), [9], RootedForest.path(6), params)

    def test_matchable_core_drops_unmatched(self):
        # vertex 2 has no neighbour in X = {3, 4}
        g = Graph.from_edges(5, [(0, 3), (1, 4), (0, 1), (1, 2)])
        assert matchable_core(g, [0, 1, 2], [3, 4], 2) == frozenset({0, 1})


# --- near-extremal hosts ---

class TestNearExtremal:
    def test_split_vertex_carries_the_centroid(self):
        edges = clique_edges(range(30)) + clique_edges(range(30, 60))
        edges += [(60, v) for v in (0, 1, 2, 30, 31, 32)]
        g = Graph.from_edges(61, edges)
        t = random_bounded_tree(20, 3, 0.5, seed=6)
        emb = near_extremal_embed(g, [range(30), range(30, 60)], t, (1, 1, 1), 3, 1)
        assert isinstance(emb, Embedding)
        assert check_embedding(g, emb) == []
        assert any(step["stage"] == "split" for step in emb.metadata["trace"])

    def test_one_part_degenerates_to_direct_embedding(self):
        g = Graph.complete(25)
        emb = near_extremal_embed(g, [range(25)], RootedForest.path(20), (1, 1), 2, 1)
        assert isinstance(emb, Embedding)
        assert emb.metadata["trace"][-1]["stage"] == "embed"

    def test_planted_witness(self):
        g = Graph.from_edges(12, clique_edges(range(11)))
        out = near_extremal_embed(g, [range(11)], RootedForest.path(20), (1, 1), 2, 1)
        assert isinstance(out, MultipartiteWitness)
        assert out.problems_in_complement(g, [1, 1]) == []
        assert frozenset({11}) in out.parts

    def test_parts_must_be_independent(self):
        g = Graph.complete(10)
        with pytest.raises(PreconditionViolated):
            near_extremal_embed(g, [range(5), range(5, 10)], RootedForest.path(3), (1, 1, 1), 1, 1)

    def test_needs_k_at_least_two(self):
        with pytest.raises(PreconditionViolated):
            near_extremal_embed(Graph.complete(5), [], RootedForest.path(3), (1,), 1, 1)


def test_sound_coefficient_value():
    assert SOUND_COEFFICIENT == 13
