"""Tests for the demanded Hall extension and its deficiency certificates."""

import sys
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

REPO_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO_ROOT / "core" / "lab"))

from lab_utils import PreconditionViolated
from matching import (
    Deficiency,
    DemandedBipartite,
    HallForest,
    brute_force_deficiency,
    check_hall_result,
    hall_extension_forest,
)


@st.composite
def demanded(draw):
    na = draw(st.integers(1, 10))
    nb = draw(st.integers(0, 10))
    a = list(range(na))
    b = list(range(na, na + nb))
    pairs = [(x, y) for x in a for y in b]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    demands = {x: draw(st.integers(0, 3)) for x in a}
    return DemandedBipartite.build(a, b, edges, demands)


class TestHallExtension:
    def test_complete_bipartite_unit_demand(self):
        db = DemandedBipartite.build([0, 1, 2], [3, 4, 5], [(x, y) for x in range(3) for y in range(3, 6)],
                                     {0: 1, 1: 1, 2: 1})
        result = hall_extension_forest(db)
        assert isinstance(result, HallForest)
        assert check_hall_result(db, result) == []
        assert sorted(y for ys in result.assignment.values() for y in ys) == [3, 4, 5]

    def test_single_neighbour_double_demand(self):
        db = DemandedBipartite.build([0], [1], [(0, 1)], {0: 2})
        result = hall_extension_forest(db)
        assert isinstance(result, Deficiency)
        assert result.s == frozenset({0})
        assert result.neighbourhood == frozenset({1})
        assert result.demand == 2

    def test_zero_demand_needs_nothing(self):
        db = DemandedBipartite.build([0, 1], [2], [], {})
        result = hall_extension_forest(db)
        assert result.assignment == {0: (), 1: ()}

    def test_shared_neighbour_is_deficient(self):
        db = DemandedBipartite.build([0, 1, 2], [3, 4, 5], [(0, 3), (1, 3), (2, 4), (2, 5)], {0: 1, 1: 1, 2: 2})
        result = hall_extension_forest(db)
        assert isinstance(result, Deficiency)
        assert check_hall_result(db, result) == []
        assert result.s == frozenset({0, 1})

    def test_overlapping_sides_rejected(self):
        with pytest.raises(PreconditionViolated):
            DemandedBipartite.build([0, 1], [1, 2], [], {})

    def test_negative_demand_rejected(self):
        with pytest.raises(PreconditionViolated):
            DemandedBipartite.build([0], [1], [(0, 1)], {0: -1})

    def test_edge_outside_sides_rejected(self):
        with pytest.raises(PreconditionViolated):
            DemandedBipartite.build([0], [1], [(1, 0)], {0: 1})

    @settings(max_examples=300)
    @given(demanded())
    def test_agrees_with_hall_oracle(self, db):
        result = hall_extension_forest(db)
        assert check_hall_result(db, result) == []
        expected = brute_force_deficiency(db)
        if expected is None:
            assert isinstance(result, HallForest)
        else:
            assert isinstance(result, Deficiency)
