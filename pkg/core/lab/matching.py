#!/usr/bin/env python3
"""
Goodness Lab - Hall Extension

Attach prescribed numbers of pendant vertices: every a in A gets exactly
l(a) private neighbours from B, or a set S of A with |N(S)| < sum l(S)
certifies that this is impossible.

Each a is split into l(a) clones and a maximum matching is run on the
clone graph (networkx Hopcroft-Karp). If a clone stays unmatched, the
vertices reachable from unmatched clones by alternating paths give the
deficient set.

Usage:
    from matching import DemandedBipartite, hall_extension_forest
    db = DemandedBipartite.build([0], [1, 2], [(0, 1), (0, 2)], {0: 2})
    result = hall_extension_forest(db)
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable

import networkx as nx
from networkx.algorithms import bipartite

from lab_utils import PreconditionViolated


@dataclass(frozen=True)
class DemandedBipartite:
    """Bipartite graph (A, B) with a demand l(a) >= 0 on every a in A."""

    a: tuple[int, ...]
    b: tuple[int, ...]
    edges: frozenset[tuple[int, int]]
    demands: dict[int, int] = field(compare=False)

    def __post_init__(self):
        a_set, b_set = set(self.a), set(self.b)
        if a_set & b_set:
            raise PreconditionViolated(f"A and B overlap in {sorted(a_set & b_set)}")
        for x, y in self.edges:
            if x not in a_set or y not in b_set:
                raise PreconditionViolated(f"edge ({x}, {y}) is not in A x B")
        for x, k in self.demands.items():
            if x not in a_set:
                raise PreconditionViolated(f"demand on {x}, which is not in A")
            if k < 0:
                raise PreconditionViolated(f"negative demand {k} on {x}")

    @classmethod
    def build(cls, a: Iterable[int], b: Iterable[int], edges: Iterable[tuple[int, int]],
              demands: dict[int, int]) -> "DemandedBipartite":
        a = tuple(sorted(set(a)))
        full = {x: int(demands.get(x, 0)) for x in a}
        full.update({x: int(k) for x, k in demands.items() if x not in full})
        return cls(a, tuple(sorted(set(b))), frozenset((int(x), int(y)) for x, y in edges), full)

    def demand(self, x: int) -> int:
        return self.demands.get(x, 0)

    def neighbors(self, x: int) -> list[int]:
        return sorted(y for a, y in self.edges if a == x)

    def neighborhood(self, s: Iterable[int]) -> frozenset[int]:
        s = set(s)
        return frozenset(y for a, y in self.edges if a in s)

    def to_json(self) -> dict:
        return {
            "A": list(self.a),
            "B": list(self.b),
            "edges": [list(e) for e in sorted(self.edges)],
            "demands": {str(x): self.demand(x) for x in self.a},
        }


@dataclass(frozen=True)
class HallForest:
    """assignment[a] = the l(a) vertices of B attached to a."""

    assignment: dict[int, tuple[int, ...]]

    def to_json(self) -> dict:
        return {"kind": "forest", "assignment": {str(a): list(bs) for a, bs in sorted(self.assignment.items())}}


@dataclass(frozen=True)
class Deficiency:
    s: frozenset[int]
    neighbourhood: frozenset[int]
    demand: int

    def to_json(self) -> dict:
        return {"kind": "deficiency", "S": sorted(self.s), "N": sorted(self.neighbourhood), "demand": self.demand}


def hall_extension_forest(db: DemandedBipartite) -> HallForest | Deficiency:
    clones: list[int] = []
    for x in db.a:
        clones.extend([x] * db.demand(x))
    c = len(clones)
    b_index = {y: c + i for i, y in enumerate(db.b)}

    clone_graph = nx.Graph()
    clone_graph.add_nodes_from(range(c), bipartite=0)
    clone_graph.add_nodes_from(range(c, c + len(db.b)), bipartite=1)
    by_origin: dict[int, list[int]] = {}
    for x, y in sorted(db.edges):
        by_origin.setdefault(x, []).append(b_index[y])
    for i, x in enumerate(clones):
        for node in by_origin.get(x, ()):
            clone_graph.add_edge(i, node)

    matching = bipartite.hopcroft_karp_matching(clone_graph, top_nodes=range(c))
    unmatched = [i for i in range(c) if i not in matching]
    if not unmatched:
        assignment: dict[int, list[int]] = {x: [] for x in db.a}
        for i, x in enumerate(clones):
            assignment[x].append(db.b[matching[i] - c])
        return HallForest({x: tuple(sorted(ys)) for x, ys in assignment.items()})

    # alternating reachability from the unmatched clones
    reached = set(unmatched)
    queue = deque(unmatched)
    while queue:
        i = queue.popleft()
        for node in clone_graph[i]:
            partner = matching.get(node)
            if partner is not None and partner not in reached:
                reached.add(partner)
                queue.append(partner)
    s = frozenset(clones[i] for i in reached)
    return Deficiency(s, db.neighborhood(s), sum(db.demand(x) for x in s))


def check_hall_result(db: DemandedBipartite, result: HallForest | Deficiency) -> list[str]:
    problems = []
    if isinstance(result, Deficiency):
        nbhd = db.neighborhood(result.s)
        demand = sum(db.demand(x) for x in result.s)
        if not result.s <= set(db.a):
            problems.append("deficient set leaves A")
        if len(nbhd) >= demand:
            problems.append(f"|N(S)| = {len(nbhd)} is not below the demand {demand}")
        return problems
    used: set[int] = set()
    for x in db.a:
        ys = result.assignment.get(x, ())
        if len(ys) != db.demand(x):
            problems.append(f"{x} received {len(ys)} vertices, demand {db.demand(x)}")
        for y in ys:
            if (x, y) not in db.edges:
                problems.append(f"({x}, {y}) is not an edge")
            if y in used:
                problems.append(f"{y} assigned twice")
            used.add(y)
    return problems


def brute_force_deficiency(db: DemandedBipartite) -> frozenset[int] | None:
    """Smallest, then lexicographically first, S violating Hall's inequality."""
    for size in range(1, len(db.a) + 1):
        for s in combinations(db.a, size):
            if len(db.neighborhood(s)) < sum(db.demand(x) for x in s):
                return frozenset(s)
    return None
