"""Tests for the goodness pipeline dispatch, stage traces and outcome kinds."""

import sys
from pathlib import Path

import networkx as nx
import pytest

REPO_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO_ROOT / "core" / "lab"))

from graph_core import Graph, check_embedding, complement
from lab_utils import PipelineStageError, PreconditionViolated, SearchBudget, Unresolved
from pipeline import PipelineConstants, StageTrace, goodness_pipeline
from tree_tools import RootedForest


def stages(outcome):
    return [rec["stage"] for rec in outcome.trace]


# --- constants ---

class TestConstants:
    def test_from_config_matches_defaults(self):
        assert PipelineConstants.from_config() == PipelineConstants()

    def test_overrides(self):
        c = PipelineConstants.from_config(r=5, q=None)
        assert c.r == 5 and c.q == PipelineConstants().q

    def test_unknown_constant(self):
        with pytest.raises(PreconditionViolated):
            PipelineConstants.from_config(bogus=1)

    def test_asymptotic_values(self):
        c = PipelineConstants.asymptotic(100)
        assert c.coefficient == 13
        assert c.r > 100 and c.y == 5
        with pytest.raises(PreconditionViolated):
            PipelineConstants.asymptotic(2)

    def test_json_keys(self):
        assert set(PipelineConstants().to_json()) == {
            "d", "r", "y", "u", "coefficient", "q", "w", "family_cap", "split_fraction"}


class TestStageTrace:
    def test_failure_is_recorded(self):
        trace = StageTrace(SearchBudget(10))
        with pytest.raises(Unresolved):
            with trace.stage("demo") as rec:
                rec["extra"] = 1
                raise Unresolved("boom")
        assert trace.records == [{"stage": "demo", "outcome": "Unresolved", "extra": 1,
                                  "detail": "boom", "nodes": 0, "timing": None}]

    def test_note(self):
        trace = StageTrace(SearchBudget(10))
        trace.note("scale", "infeasible", detail="x")
        assert trace.records[0]["outcome"] == "infeasible"


# --- outcomes ---

class TestGoodnessPipeline:
    def test_single_part_is_any_m_vertices(self):
        out = goodness_pipeline(Graph.complete(5), RootedForest.path(3), None, (3,))
        assert out.kind == "witness"
        assert out.witness.parts == (frozenset({0, 1, 2}),)
        assert stages(out) == ["trivial"]

    def test_single_part_too_large(self):
        with pytest.raises(PipelineStageError) as exc:
            goodness_pipeline(Graph.complete(2), RootedForest.path(3), None, (3,))
        assert exc.value.stage == "trivial"

    def test_path_with_two_leaves_goes_many_leaves(self):
        g = Graph.complete(25)
        out = goodness_pipeline(g, RootedForest.path(20), 2, (2, 2), PipelineConstants())
        assert out.kind == "embedding"
        assert stages(out) == ["many-leaves"]
        assert check_embedding(g, out.embedding) == []

    def test_bare_paths_split_and_cover(self):
        g = Graph.complete(26)
        out = goodness_pipeline(g, RootedForest.path(25), None, (2, 2), PipelineConstants())
        assert out.kind == "embedding"
        assert stages(out) == ["prune", "split", "core-embed", "path-cover"]
        assert out.embedding.metadata["split"] == [22, 4]
        assert check_embedding(g, out.embedding) == []

    def test_non_expanding_pair_is_a_witness(self):
        # edge {0, 1} with nothing else around it, next to a K_40
        g = complement(Graph.from_networkx(nx.complete_bipartite_graph(2, 40)))
        out = goodness_pipeline(g, RootedForest.path(25), None, (2, 2), PipelineConstants())
        assert out.kind == "witness"
        assert out.witness.problems_in_complement(g, [2, 2]) == []
        assert out.trace[-1]["stage"] == "prune"
        assert out.trace[-1]["outcome"] == "witness"
        assert out.witness.parts[0] == frozenset({0, 1})

    def test_three_parts_many_leaves(self):
        g = Graph.complete(13)
        out = goodness_pipeline(g, RootedForest.star(7), None, (1, 1, 1), PipelineConstants())
        assert out.kind == "embedding"
        assert stages(out) == ["many-leaves"]

    def test_three_parts_witness_in_empty_host(self):
        g = Graph.empty(13)
        out = goodness_pipeline(g, RootedForest.star(7), None, (1, 1, 1), PipelineConstants())
        assert out.kind == "witness"
        assert out.witness.problems_in_complement(g, [1, 1, 1]) == []

    def test_host_too_small_to_extract_parts(self):
        out = goodness_pipeline(Graph.complete(29), RootedForest.path(25), None, (1, 1, 1), PipelineConstants())
        assert out.kind == "infeasible"
        assert "extracting" in out.reason
        assert out.trace[-1]["stage"] == "scale"
        assert out.to_json()["constants"]["q"] == 5

    def test_stage_errors_name_the_stage(self):
        with pytest.raises(PipelineStageError) as exc:
            goodness_pipeline(Graph.complete(20), RootedForest.path(25), None, (2, 2), PipelineConstants())
        assert exc.value.stage == "prune"

    def test_input_checks(self):
        with pytest.raises(PreconditionViolated):
            goodness_pipeline(Graph.complete(5), RootedForest((-1, -1)), None, (1, 1))
        with pytest.raises(PreconditionViolated):
            goodness_pipeline(Graph.complete(5), RootedForest.star(4), 2, (1, 1))
        with pytest.raises(PreconditionViolated):
            goodness_pipeline(Graph.complete(5), RootedForest.path(3), None, (2, 1))
