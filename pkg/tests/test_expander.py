"""Tests for d-expansion checks, closure rules, non-expanding sets and partitions."""

import sys
from fractions import Fraction
from pathlib import Path

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

REPO_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO_ROOT / "core" / "lab"))

from expander import (
    ExpansionParams,
    as_fraction,
    check_d_expands,
    expansion_threshold,
    first_violator,
    maximal_nonexpanding_set,
    partition_expansion,
    partition_factors,
    report_problems,
    subset_expansion_closure,
)
from graph_core import Graph
from lab_utils import CapExceeded, HypothesisViolated, PreconditionViolated


def k8_with_tail():
    """K_8 on 0..7 with the pendant path 0-8-9."""
    edges = [(u, v) for u in range(8) for v in range(u + 1, 8)] + [(0, 8), (8, 9)]
    return Graph.from_edges(10, edges)


# --- parameters ---

class TestParameters:
    def test_fraction_inputs(self):
        assert as_fraction("3/2") == Fraction(3, 2)
        assert as_fraction(0.25) == Fraction(1, 4)
        assert as_fraction(2) == 2

    def test_threshold(self):
        assert expansion_threshold(5, 2) == 2
        assert expansion_threshold(20, 20) == 1
        assert expansion_threshold(7, 0) == 0

    def test_params_validate(self):
        with pytest.raises(PreconditionViolated):
            ExpansionParams(Fraction(-1))
        assert ExpansionParams("5/2").d == Fraction(5, 2)


# --- check_d_expands ---

class TestCheckDExpands:
    def test_complete_graph_expands(self):
        assert check_d_expands(Graph.complete(10), range(5), 2).holds

    def test_edgeless_fails_on_singleton(self):
        g = Graph.empty(6)
        report = check_d_expands(g, range(4), 1)
        assert not report.holds
        assert report.condition == 1
        assert report.violating_set == frozenset({0})
        assert report_problems(g, range(4), 1, report) == []

    def test_condition_two_witness(self):
        # two disjoint K_6's: a pair inside one misses the other clique
        edges = [(u, v) for base in (0, 6) for u in range(base, base + 6) for v in range(u + 1, base + 6)]
        g = Graph.from_edges(12, edges)
        report = check_d_expands(g, range(12), 3)
        assert report.condition == 2
        assert report.violating_set == frozenset({0, 1})
        assert report.partner_set == frozenset({6, 7})
        assert report_problems(g, range(12), 3, report) == []

    def test_zero_factor_is_vacuous(self):
        assert check_d_expands(Graph.empty(4), range(4), 0).holds

    def test_w_outside_universe(self):
        with pytest.raises(PreconditionViolated):
            check_d_expands(Graph.complete(5), [4], 1, universe=[0, 1])

    def test_cap(self):
        with pytest.raises(CapExceeded):
            check_d_expands(Graph.complete(20), range(20), 1, cap=3)

    @settings(max_examples=50)
    @given(st.integers(3, 9), st.floats(0.2, 0.9), st.integers(0, 10 ** 6),
           st.sampled_from([Fraction(1), Fraction(3, 2), Fraction(2)]))
    def test_failing_report_rechecks(self, n, p, seed, d):
        g = Graph.from_networkx(nx.gnp_random_graph(n, p, seed=seed))
        w = range(0, n, 2)
        report = check_d_expands(g, w, d)
        assert report_problems(g, w, d, report) == []


# --- closure rules ---

class TestClosure:
    def test_w_equals_z_degenerates_to_premise(self):
        g = Graph.complete(8)
        report = subset_expansion_closure(g, range(4), range(4), 2, 2)
        assert report.premise.holds and report.subgraph.holds
        assert report.superset.holds
        # c == d: the weaker conclusion is the premise itself
        assert report.weaker == report.premise

    def test_inapplicable_conclusions_are_none(self):
        report = subset_expansion_closure(Graph.complete(6), [0], [0, 1], Fraction(3, 2), 3)
        assert report.superset is None
        assert report.weaker is None

    def test_w_outside_z(self):
        with pytest.raises(PreconditionViolated):
            subset_expansion_closure(Graph.complete(4), [0, 3], [0, 1], 2, 2)

    @settings(max_examples=150)
    @given(st.integers(4, 10), st.floats(0.5, 0.95), st.integers(0, 10 ** 6), st.data())
    def test_conclusions_follow_from_premise(self, n, p, seed, data):
        g = Graph.from_networkx(nx.gnp_random_graph(n, p, seed=seed))
        z = data.draw(st.lists(st.integers(0, n - 1), min_size=1, unique=True))
        w = data.draw(st.lists(st.sampled_from(sorted(z)), min_size=1, unique=True))
        d = data.draw(st.sampled_from([Fraction(1), Fraction(2), Fraction(5, 2), Fraction(3)]))
        c = d / (d - 1) if d > 1 else d
        report = subset_expansion_closure(g, w, z, d, c)
        if report.premise.holds:
            assert report.subgraph.holds
            assert report.superset is None or report.superset.holds
            assert report.weaker is None or report.weaker.holds


# --- maximal non-expanding sets ---

class TestMaximalNonexpanding:
    def test_well_connected_graph(self):
        assert maximal_nonexpanding_set(Graph.complete(8), 2, 1, strict=False) == frozenset()

    def test_isolated_vertex_absorbed(self):
        g = Graph.from_edges(6, [(u, v) for u in range(5) for v in range(u + 1, 5)])
        assert maximal_nonexpanding_set(g, 2, 1, strict=False) == frozenset({5})

    def test_pendant_chain_absorbed(self):
        g = k8_with_tail()
        x = maximal_nonexpanding_set(g, 3, 1, strict=False)
        assert x == frozenset({8, 9})
        # residual graph has no violator left
        assert first_violator(g, 3, 1, False, removed=x) is None

    def test_growth_past_cap_is_a_witness(self):
        g = k8_with_tail()
        with pytest.raises(HypothesisViolated) as exc:
            maximal_nonexpanding_set(g, 2, 2, strict=False)
        assert exc.value.witness == frozenset({8, 9})

    def test_within_restricts_counted_neighbours(self):
        g = Graph.complete(6)
        # only vertex 5 counts: every singleton outside it sees one counted neighbour
        assert first_violator(g, 1, 1, True, within=[5]) == frozenset({5})

    def test_cap_checked(self):
        with pytest.raises(CapExceeded):
            maximal_nonexpanding_set(Graph.complete(4), 50, 1, strict=False)


# --- partitions ---

class TestPartition:
    def test_factors(self):
        assert partition_factors(20, (10, 10)) == (Fraction(2), Fraction(2))
        assert partition_factors(5, (7,)) == (Fraction(1),)

    def test_complete_graph_split(self):
        g = Graph.complete(40)
        w = range(20)
        parts = partition_expansion(g, w, 20, (10, 10), seed=3)
        assert sorted(len(p) for p in parts) == [10, 10]
        assert frozenset().union(*parts) == frozenset(w)
        for part, di in zip(parts, partition_factors(20, (10, 10))):
            assert check_d_expands(g, part, di).holds

    def test_single_part(self):
        g = Graph.complete(12)
        (part,) = partition_expansion(g, range(6), 5, (6,))
        assert part == frozenset(range(6))

    def test_sizes_must_cover_w(self):
        with pytest.raises(PreconditionViolated):
            partition_expansion(Graph.complete(10), range(6), 2, (2, 2))

    def test_premise_required(self):
        with pytest.raises(PreconditionViolated):
            partition_expansion(Graph.empty(6), range(4), 1, (2, 2))
