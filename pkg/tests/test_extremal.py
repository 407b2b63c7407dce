"""Tests for the clique blow-up colorings behind the lower bounds."""

import sys
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

REPO_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO_ROOT / "core" / "lab"))

from extremal import EdgeColoring, burr_bound, burr_coloring, clique_blowup_coloring, tightness_coloring
from graph_core import Graph, contains_forest_copy, find_multipartite
from lab_utils import PreconditionViolated
from tree_tools import RootedForest


class TestBurrBound:
    def test_values(self):
        assert burr_bound(4, 3, 1) == 7
        assert burr_bound(3, 3, 1) == 5
        assert burr_bound(1, 1, 1) == 1

    @pytest.mark.parametrize("args", [(0, 2, 1), (3, 0, 1), (3, 2, 0)])
    def test_rejects_non_positive(self, args):
        with pytest.raises(PreconditionViolated):
            burr_bound(*args)


class TestBlowups:
    def test_blocks_and_edges(self):
        c = clique_blowup_coloring([2, 0, 3])
        assert c.cliques == ((0, 1), (2, 3, 4))
        assert c.n == 5
        assert c.red.edge_count() == 1 + 3
        assert c.blue.edge_count() == 10 - 4

    def test_negative_size(self):
        with pytest.raises(PreconditionViolated):
            clique_blowup_coloring([2, -1])

    def test_burr_coloring_avoids_both(self):
        c = burr_coloring(4, 3, 1)
        assert c.n == burr_bound(4, 3, 1) - 1
        assert contains_forest_copy(c.red, RootedForest.path(4)) is None
        assert contains_forest_copy(c.blue, RootedForest.path(3)) is not None
        # blue is bipartite between the two red triangles
        assert find_multipartite(c.blue, [1, 1, 1]) is None

    def test_tightness_coloring(self):
        c = tightness_coloring(3, 2)
        assert len(c.cliques) == 3 and c.n == 6
        assert contains_forest_copy(c.red, RootedForest.path(3)) is None
        assert find_multipartite(c.blue, [3, 3]) is None
        assert find_multipartite(c.blue, [2, 2]) is not None

    def test_to_json(self):
        c = EdgeColoring(Graph.from_edges(3, [(0, 2)]))
        assert c.to_json() == {"N": 3, "red": [[0, 2]]}

    @given(st.lists(st.integers(0, 6), max_size=5))
    def test_red_components_are_the_blocks(self, sizes):
        c = clique_blowup_coloring(sizes)
        assert c.n == sum(sizes)
        assert c.red.edge_count() == sum(s * (s - 1) // 2 for s in sizes)
        assert c.red.edge_count() + c.blue.edge_count() == c.n * (c.n - 1) // 2
