"""Tests for disjoint path routing, linked systems, joins, short path families and covers."""

import sys
from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO_ROOT / "core" / "lab"))

from graph_core import Graph
from lab_utils import CapExceeded, PreconditionViolated
from linkage import (
    LinkageRequest,
    LinkedSpec,
    LinkedSystem,
    Routing,
    check_linked_system,
    check_routing,
    collect_short_path_families,
    count_requests,
    cover_with_paths,
    family_problems,
    find_disjoint_paths,
    join_many,
    join_two,
)


def clique_edges(vertices):
    vertices = list(vertices)
    return [(u, v) for i, u in enumerate(vertices) for v in vertices[i + 1:]]


def clique_system(offset, size, x_size, spec):
    vertices = range(offset, offset + size)
    return LinkedSystem(frozenset(vertices[:x_size]), frozenset(vertices[x_size:]), spec)


# --- routing ---

class TestFindDisjointPaths:
    def test_two_pairs_in_k12(self):
        g = Graph.complete(12)
        req = LinkageRequest.build([(0, 1), (2, 3)], [3, 3])
        w = range(4, 12)
        routing = find_disjoint_paths(g, req, w)
        assert routing is not None
        assert check_routing(g, req, routing, w) == []

    def test_no_pairs(self):
        routing = find_disjoint_paths(Graph.complete(3), LinkageRequest.build([], []), [2])
        assert routing == Routing(())

    def test_not_enough_interior(self):
        req = LinkageRequest.build([(0, 1)], [5])
        assert find_disjoint_paths(Graph.complete(6), req, [2, 3, 4]) is None

    def test_length_one_needs_edge(self):
        g = Graph.from_edges(3, [(0, 2), (2, 1)])
        assert find_disjoint_paths(g, LinkageRequest.build([(0, 1)], [1]), [2]) is None
        assert find_disjoint_paths(g, LinkageRequest.build([(0, 1)], [2]), [2]).paths == ((0, 2, 1),)

    def test_exact_length_on_a_cycle(self):
        g = Graph.from_edges(6, [(i, (i + 1) % 6) for i in range(6)])
        req = LinkageRequest.build([(0, 3)], [3])
        routing = find_disjoint_paths(g, req, [1, 2, 4, 5])
        assert routing.paths[0] in ((0, 1, 2, 3), (0, 5, 4, 3))
        assert find_disjoint_paths(g, LinkageRequest.build([(0, 3)], [4]), [1, 2, 4, 5]) is None

    def test_endpoint_in_w_rejected(self):
        with pytest.raises(PreconditionViolated):
            find_disjoint_paths(Graph.complete(4), LinkageRequest.build([(0, 1)], [2]), [1, 2])

    def test_request_validation(self):
        with pytest.raises(PreconditionViolated):
            LinkageRequest.build([(0, 1), (1, 2)], [2, 2])
        with pytest.raises(PreconditionViolated):
            LinkageRequest.build([(0, 1)], [0])

    def test_check_routing_flags_reuse(self):
        g = Graph.complete(6)
        req = LinkageRequest.build([(0, 1), (2, 3)], [2, 2])
        bad = Routing(((0, 4, 1), (2, 4, 3)))
        assert any("reuses" in p for p in check_routing(g, req, bad, [4, 5]))


# --- linked systems ---

class TestCheckLinkedSystem:
    def test_k10_is_linked(self):
        result = check_linked_system(Graph.complete(10), range(4), range(4, 10), LinkedSpec(1, 2, 4))
        assert result.holds
        assert result.requests == 18

    def test_no_room(self):
        result = check_linked_system(Graph.complete(10), range(4), range(4, 10), LinkedSpec(1, 8, 8))
        assert not result.holds
        assert result.counterexample.lengths == (8,)

    def test_vacuous_specs(self):
        assert check_linked_system(Graph.complete(4), range(4), [], LinkedSpec(0, 1, 3)).vacuous
        assert check_linked_system(Graph.complete(4), range(4), [], LinkedSpec(1, 3, 2)).vacuous
        assert check_linked_system(Graph.complete(4), [0], [1, 2], LinkedSpec(1, 1, 2)).vacuous

    def test_request_count_and_cap(self):
        assert count_requests(4, LinkedSpec(2, 1, 3)) == 1 * 3 * 9
        with pytest.raises(CapExceeded):
            check_linked_system(Graph.complete(10), range(4), range(4, 10), LinkedSpec(2, 1, 3), cap=10)

    def test_system_admission(self):
        system = clique_system(0, 6, 2, LinkedSpec(1, 2, 3))
        with pytest.raises(PreconditionViolated):
            system.route(Graph.complete(6), LinkageRequest.build([(0, 1)], [5]))


# --- joins ---

def two_cliques_joined():
    """Two K_9 systems (X = 3 vertices) and three single-edge connectors."""
    spec = LinkedSpec(1, 2, 7)
    sys1 = clique_system(0, 9, 3, spec)
    sys2 = clique_system(9, 9, 3, spec)
    connectors = [(0, 9), (1, 10), (2, 11)]
    g = Graph.from_edges(18, clique_edges(range(9)) + clique_edges(range(9, 18)) + connectors)
    return g, sys1, sys2, connectors


class TestJoinTwo:
    def test_spec(self):
        g, sys1, sys2, connectors = two_cliques_joined()
        joined = join_two(sys1, sys2, connectors, g)
        assert joined.spec == LinkedSpec(1, 7, 7)
        assert joined.x == sys1.x | sys2.x
        assert {0, 9, 1, 10, 2, 11} <= joined.w

    def test_joined_router_is_valid(self):
        g, sys1, sys2, connectors = two_cliques_joined()
        joined = join_two(sys1, sys2, connectors, g)
        result = check_linked_system(g, joined.x, joined.w, joined.spec,
                                     router=lambda host, req: joined.route(host, req))
        assert result.holds
        assert result.requests == 15

    def test_cross_request_uses_a_free_connector(self):
        g, sys1, sys2, connectors = two_cliques_joined()
        joined = join_two(sys1, sys2, connectors, g)
        req = LinkageRequest.build([(10, 0)], [7])
        routing = joined.route(g, req)
        assert check_routing(g, req, routing, joined.w - req.endpoints) == []
        assert 2 in routing.paths[0] and 11 in routing.paths[0]

    def test_same_side_request_stays_inside(self):
        g, sys1, sys2, connectors = two_cliques_joined()
        joined = join_two(sys1, sys2, connectors, g)
        routing = joined.route(g, LinkageRequest.build([(0, 1)], [7]))
        assert set(routing.paths[0]) <= sys1.x | sys1.w

    def test_no_connectors_is_vacuous(self):
        g, sys1, sys2, _ = two_cliques_joined()
        joined = join_two(sys1, sys2, [], g)
        assert joined.spec.s == 0 and joined.spec.vacuous

    def test_connector_is_reoriented(self):
        g, sys1, sys2, _ = two_cliques_joined()
        joined = join_two(sys1, sys2, [(9, 0), (10, 1), (11, 2)], g)
        assert joined.connectors[0] == (0, 9)

    def test_overlap_rejected(self):
        g, sys1, _, _ = two_cliques_joined()
        with pytest.raises(PreconditionViolated):
            join_two(sys1, sys1, [], g)

    def test_connector_must_be_a_path(self):
        g, sys1, sys2, _ = two_cliques_joined()
        with pytest.raises(PreconditionViolated):
            join_two(sys1, sys2, [(0, 10)], g)


def three_cliques():
    spec = LinkedSpec(1, 2, 15)
    systems = [clique_system(base, 20, 6, spec) for base in (0, 20, 40)]
    families = {(0, 1): [(0, 20), (1, 21), (2, 22)], (1, 2): [(23, 40), (24, 41), (25, 42)]}
    edges = [e for base in (0, 20, 40) for e in clique_edges(range(base, base + 20))]
    edges += [e for family in families.values() for e in family]
    return Graph.from_edges(60, edges), systems, families


class TestJoinMany:
    def test_single_system_is_identity(self):
        _, systems, _ = three_cliques()
        assert join_many(systems[:1], [], {}, Graph.complete(3)) is systems[0]

    def test_path_of_three_systems(self):
        g, systems, families = three_cliques()
        joined = join_many(systems, [(0, 1), (1, 2)], families, g, s=1)
        assert joined.spec == LinkedSpec(1, 15, 15)
        assert joined.metadata["required_family_size"] == 45
        result = check_linked_system(g, joined.x, joined.w, joined.spec,
                                     router=lambda host, req: joined.route(host, req))
        assert result.holds
        assert result.requests == 153

    def test_disconnected_f_rejected(self):
        g, systems, families = three_cliques()
        with pytest.raises(PreconditionViolated):
            join_many(systems, [(0, 1)], families, g, s=1)

    def test_short_family_rejected(self):
        g, systems, families = three_cliques()
        families[(1, 2)] = families[(1, 2)][:2]
        with pytest.raises(PreconditionViolated):
            join_many(systems, [(0, 1), (1, 2)], families, g, s=1)


# --- short path families ---

class TestShortPathFamilies:
    def test_disjoint_components(self):
        g = Graph.from_edges(6, clique_edges(range(3)) + clique_edges(range(3, 6)))
        families = collect_short_path_families(g, [[0], [3]], [], cap=5)
        assert families[(0, 1)].paths == ()
        assert family_problems(g, [[0], [3]], [], 0, 1, families[(0, 1)]) == []

    def test_matching_edges(self):
        g = Graph.from_edges(10, [(i, i + 5) for i in range(5)])
        m_sets = [range(5), range(5, 10)]
        family = collect_short_path_families(g, m_sets, [], cap=8)[(0, 1)]
        assert family.paths == tuple((i, i + 5) for i in range(5))
        assert not family.truncated
        assert family_problems(g, m_sets, [], 0, 1, family) == []

    def test_cap_truncates(self):
        g = Graph.from_edges(10, [(i, i + 5) for i in range(5)])
        family = collect_short_path_families(g, [range(5), range(5, 10)], [], cap=3)[(0, 1)]
        assert len(family.paths) == 3
        assert family.truncated

    def test_forbidden_interior(self):
        g = Graph.from_edges(3, [(0, 1), (1, 2)])
        assert collect_short_path_families(g, [[0], [2]], [1], cap=3)[(0, 1)].paths == ()
        assert collect_short_path_families(g, [[0], [2]], [], cap=3)[(0, 1)].paths == ((0, 1, 2),)

    def test_overlapping_sets_rejected(self):
        with pytest.raises(PreconditionViolated):
            collect_short_path_families(Graph.complete(4), [[0, 1], [1, 2]], [], cap=3)


# --- covers ---

class TestCoverWithPaths:
    def test_single_pair_along_a_path(self):
        g = Graph.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)])
        routing = cover_with_paths(g, [(0, 4)], 4, [1, 2, 3])
        assert routing.paths == ((0, 1, 2, 3, 4),)

    def test_k12_exact_cover(self):
        g = Graph.complete(12)
        w = range(4, 12)
        routing = cover_with_paths(g, [(0, 1), (2, 3)], 5, w)
        used = {v for path in routing.paths for v in path[1:-1]}
        assert used == set(w)

    def test_size_mismatch(self):
        with pytest.raises(PreconditionViolated):
            cover_with_paths(Graph.complete(12), [(0, 1), (2, 3)], 5, range(4, 11))
