#!/usr/bin/env python3
"""
Goodness Lab - Linked Systems

(X, W) is an (s, d-, d+)-linked system when any s disjoint terminal pairs
in X can be joined by vertex-disjoint paths of any prescribed lengths in
[d-, d+] whose interiors lie in W. Lengths always count edges.

- find_disjoint_paths: backtracking router (exact within its node budget)
- check_linked_system: the definition, by enumerating every request
- join_two / join_many: build bigger systems from smaller ones plus short
  connector paths; the joined system routes by splitting cross requests
- collect_short_path_families: greedy maximal families of <=3-edge paths
- cover_with_paths: paths of one length that use every vertex of W

Usage:
    from linkage import LinkageRequest, find_disjoint_paths
    req = LinkageRequest.build([(0, 1)], [3])
    routing = find_disjoint_paths(g, req, range(2, 10))
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace
from itertools import combinations, product
from math import comb, prod
from typing import Callable, Iterable, Iterator

import networkx as nx

from lab_utils import (
    CapExceeded,
    LemmaViolation,
    PreconditionViolated,
    SearchBudget,
    ensure_budget,
    setup_path,
)

setup_path()
from config_loader import get_request_cap  # noqa: E402
from graph_core import Graph, bits, mask_of, popcount  # noqa: E402


@dataclass(frozen=True)
class LinkedSpec:
    """(s, d_min, d_max); an empty length range makes the system vacuous."""

    s: int
    d_min: int
    d_max: int

    def __post_init__(self):
        if self.s < 0:
            raise PreconditionViolated(f"pair count must be >= 0, got {self.s}")
        if self.d_min < 1:
            raise PreconditionViolated(f"minimum length must be positive, got {self.d_min}")

    @property
    def vacuous(self) -> bool:
        return self.s == 0 or self.d_min > self.d_max

    def to_json(self) -> dict:
        return {"s": self.s, "dmin": self.d_min, "dmax": self.d_max}


@dataclass(frozen=True)
class LinkageRequest:
    pairs: tuple[tuple[int, int], ...]
    lengths: tuple[int, ...]

    def __post_init__(self):
        if len(self.pairs) != len(self.lengths):
            raise PreconditionViolated(f"{len(self.pairs)} pairs but {len(self.lengths)} lengths")
        ends = self.endpoints
        if len(ends) != 2 * len(self.pairs):
            raise PreconditionViolated("request endpoints must be distinct")
        if any(d < 1 for d in self.lengths):
            raise PreconditionViolated(f"path lengths must be positive: {list(self.lengths)}")

    @classmethod
    def build(cls, pairs: Iterable[tuple[int, int]], lengths: Iterable[int]) -> "LinkageRequest":
        return cls(tuple((int(x), int(y)) for x, y in pairs), tuple(int(d) for d in lengths))

    @property
    def endpoints(self) -> frozenset[int]:
        return frozenset(v for pair in self.pairs for v in pair)

    def to_json(self) -> dict:
        return {"pairs": [list(p) for p in self.pairs], "lengths": list(self.lengths)}


@dataclass(frozen=True)
class Routing:
    paths: tuple[tuple[int, ...], ...]

    def to_json(self) -> list:
        return [list(p) for p in self.paths]


def check_routing(g: Graph, req: LinkageRequest, routing: Routing, w: Iterable[int]) -> list[str]:
    """Problems with ``routing`` as an answer to ``req`` inside W (empty = valid)."""
    w = set(w)
    problems = []
    if len(routing.paths) != len(req.pairs):
        return [f"{len(routing.paths)} paths for {len(req.pairs)} pairs"]
    seen: set[int] = set()
    for i, (path, (x, y), d) in enumerate(zip(routing.paths, req.pairs, req.lengths)):
        if path[0] != x or path[-1] != y:
            problems.append(f"path {i} runs {path[0]}..{path[-1]}, expected {x}..{y}")
        if len(path) - 1 != d:
            problems.append(f"path {i} has length {len(path) - 1}, expected {d}")
        for a, b in zip(path, path[1:]):
            if not (0 <= a < g.n and 0 <= b < g.n) or not g.has_edge(a, b):
                problems.append(f"path {i}: {a}-{b} is not an edge")
        outside = [v for v in path[1:-1] if v not in w]
        if outside:
            problems.append(f"path {i}: interior vertices {outside} outside W")
        clash = seen.intersection(path)
        if clash or len(set(path)) != len(path):
            problems.append(f"path {i} reuses vertices {sorted(clash)}")
        seen.update(path)
    return problems


# ---------------------------------------------------------------------------
# router
# ---------------------------------------------------------------------------

def _distances_to(g: Graph, target: int, through: int) -> dict[int, int]:
    """BFS distances to ``target`` along paths whose other vertices lie in ``through``."""
    dist = {target: 0}
    queue = deque([target])
    while queue:
        u = queue.popleft()
        for v in bits(g.adj[u] & through):
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def find_disjoint_paths(g: Graph, req: LinkageRequest, w: Iterable[int],
                        budget: SearchBudget | int | None = None) -> Routing | None:
    """Disjoint paths of the requested lengths with interiors in W, or None.

    Pairs are routed in request order; each path grows from x_i through
    ascending W vertices, pruned by the BFS distance to y_i and by the
    interior vertices still available for the later pairs.
    """
    wmask = mask_of(w)
    ends = req.endpoints
    if mask_of(ends) & wmask:
        raise PreconditionViolated(f"request endpoints {sorted(ends & set(bits(wmask)))} lie in W")
    if any(not 0 <= v < g.n for v in ends) or wmask & ~g.full_mask:
        raise PreconditionViolated("request or W leaves the graph")
    if sum(d - 1 for d in req.lengths) > popcount(wmask):
        return None
    budget = ensure_budget(budget, "path routing")
    k = len(req.pairs)
    reserve = [sum(d - 1 for d in req.lengths[i + 1:]) for i in range(k)]
    paths: list[tuple[int, ...]] = [()] * k
    used = 0

    def route(i: int) -> bool:
        nonlocal used
        if i == k:
            return True
        x, y = req.pairs[i]
        length = req.lengths[i]
        if length == 1:
            if not g.has_edge(x, y):
                return False
            paths[i] = (x, y)
            return route(i + 1)
        dist = _distances_to(g, y, wmask & ~used)
        walk = [x]

        def extend(v: int, left: int) -> bool:
            # left = edges still to take from v
            nonlocal used
            if left == 1:
                if not g.has_edge(v, y):
                    return False
                paths[i] = tuple(walk) + (y,)
                return route(i + 1)
            if popcount(wmask & ~used) - reserve[i] < left - 1:
                return False
            for u in bits(g.adj[v] & wmask & ~used):
                if dist.get(u, left) > left - 1:
                    continue
                budget.tick()
                used |= 1 << u
                walk.append(u)
                if extend(u, left - 1):
                    return True
                walk.pop()
                used &= ~(1 << u)
            return False

        return extend(x, length)

    if route(0):
        return Routing(tuple(paths))
    return None


# ---------------------------------------------------------------------------
# linked systems
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LinkedSystem:
    """(X, W) with a claimed spec, routed by the backtracking solver."""

    x: frozenset[int]
    w: frozenset[int]
    spec: LinkedSpec
    metadata: dict = field(default_factory=dict, compare=False)

    def admission_problems(self, req: LinkageRequest) -> list[str]:
        problems = []
        if len(req.pairs) > self.spec.s:
            problems.append(f"{len(req.pairs)} pairs exceed s = {self.spec.s}")
        outside = sorted(req.endpoints - self.x)
        if outside:
            problems.append(f"endpoints {outside} outside X")
        for d in req.lengths:
            if not self.spec.d_min <= d <= self.spec.d_max:
                problems.append(f"length {d} outside [{self.spec.d_min}, {self.spec.d_max}]")
        return problems

    def route(self, g: Graph, req: LinkageRequest, budget: SearchBudget | int | None = None) -> Routing | None:
        problems = self.admission_problems(req)
        if problems:
            raise PreconditionViolated("; ".join(problems))
        return find_disjoint_paths(g, req, self.w - req.endpoints, budget)

    def to_json(self) -> dict:
        return {"X": sorted(self.x), "W": sorted(self.w), "spec": self.spec.to_json()}


@dataclass(frozen=True)
class JoinedSystem(LinkedSystem):
    """Two systems plus connector paths, each connector oriented X1 -> X2."""

    first: LinkedSystem | None = None
    second: LinkedSystem | None = None
    connectors: tuple[tuple[int, ...], ...] = ()

    def route(self, g: Graph, req: LinkageRequest, budget: SearchBudget | int | None = None) -> Routing | None:
        problems = self.admission_problems(req)
        if problems:
            raise PreconditionViolated("; ".join(problems))
        budget = ensure_budget(budget, "joined routing")
        x1, x2 = self.first.x, self.second.x
        ends = req.endpoints
        free = [p for p in self.connectors if not ends.intersection(p)]
        side1: list[int] = []
        side2: list[int] = []
        cross: list[tuple[int, bool, tuple[int, ...]]] = []
        for i, (x, y) in enumerate(req.pairs):
            if x in x1 and y in x1:
                side1.append(i)
            elif x in x2 and y in x2:
                side2.append(i)
            else:
                if len(cross) == len(free):
                    raise LemmaViolation(f"no free connector left for pair {i}")
                cross.append((i, x in x2, free[len(cross)]))

        pairs1 = [req.pairs[i] for i in side1]
        lengths1 = [req.lengths[i] for i in side1]
        pairs2 = [req.pairs[i] for i in side2]
        lengths2 = [req.lengths[i] for i in side2]
        d1 = self.first.spec.d_min
        for i, flipped, conn in cross:
            x, y = req.pairs[i][::-1] if flipped else req.pairs[i]
            pairs1.append((x, conn[0]))
            lengths1.append(d1)
            pairs2.append((conn[-1], y))
            lengths2.append(req.lengths[i] - d1 - (len(conn) - 1))

        r1 = self.first.route(g, LinkageRequest.build(pairs1, lengths1), budget)
        if r1 is None:
            return None
        r2 = self.second.route(g, LinkageRequest.build(pairs2, lengths2), budget)
        if r2 is None:
            return None

        out: list[tuple[int, ...]] = [()] * len(req.pairs)
        for j, i in enumerate(side1):
            out[i] = r1.paths[j]
        for j, i in enumerate(side2):
            out[i] = r2.paths[j]
        for j, (i, flipped, conn) in enumerate(cross):
            q1 = r1.paths[len(side1) + j]
            q2 = r2.paths[len(side2) + j]
            path = q1 + conn[1:] + q2[1:]
            out[i] = path[::-1] if flipped else path
        return Routing(tuple(out))

    def to_json(self) -> dict:
        out = super().to_json()
        out["connectors"] = [list(p) for p in self.connectors]
        return out


def _orient_connector(g: Graph, path: Iterable[int], x1: frozenset[int], x2: frozenset[int],
                      blocked: frozenset[int]) -> tuple[int, ...]:
    path = tuple(path)
    if not 2 <= len(path) <= 4:
        raise PreconditionViolated(f"connector {list(path)} must have 1 to 3 edges")
    if path[0] in x2 and path[-1] in x1:
        path = path[::-1]
    if path[0] not in x1 or path[-1] not in x2:
        raise PreconditionViolated(f"connector {list(path)} does not run from X1 to X2")
    for a, b in zip(path, path[1:]):
        if not g.has_edge(a, b):
            raise PreconditionViolated(f"connector {list(path)}: {a}-{b} is not an edge")
    inner = blocked.intersection(path[1:-1])
    if inner:
        raise PreconditionViolated(f"connector {list(path)} passes through {sorted(inner)}")
    return path


def join_two(sys1: LinkedSystem, sys2: LinkedSystem, connectors: Iterable[Iterable[int]],
             g: Graph) -> JoinedSystem:
    """Join two systems by disjoint connector paths of at most 3 edges.

    The result is (X1 | X2, W1 | W2 | connector vertices) with spec
    (min(s1, s2, t // 3), d1- + d2- + 3, min(d1+, d2+)).
    """
    overlap = (sys1.x | sys1.w) & (sys2.x | sys2.w)
    if overlap:
        raise PreconditionViolated(f"systems overlap in {sorted(overlap)}")
    blocked = sys1.x | sys1.w | sys2.x | sys2.w
    oriented = []
    seen: set[int] = set()
    for path in connectors:
        path = _orient_connector(g, path, sys1.x, sys2.x, blocked)
        clash = seen.intersection(path)
        if clash:
            raise PreconditionViolated(f"connector {list(path)} meets another connector at {sorted(clash)}")
        seen.update(path)
        oriented.append(path)
    spec = LinkedSpec(
        min(sys1.spec.s, sys2.spec.s, len(oriented) // 3),
        sys1.spec.d_min + sys2.spec.d_min + 3,
        min(sys1.spec.d_max, sys2.spec.d_max),
    )
    return JoinedSystem(
        x=sys1.x | sys2.x,
        w=sys1.w | sys2.w | frozenset(seen),
        spec=spec,
        first=sys1,
        second=sys2,
        connectors=tuple(oriented),
    )


def join_many(systems: list[LinkedSystem], f_edges: Iterable[tuple[int, int]],
              families: dict[tuple[int, int], list[tuple[int, ...]]], g: Graph,
              s: int | None = None) -> LinkedSystem:
    """Join k systems along a connected auxiliary graph F on 0..k-1.

    F is reduced to a BFS spanning tree from 0; for each tree edge, 3s
    paths of its family are picked one by one avoiding every path already
    picked, and the systems are joined in tree order. The result claims
    (s, k(d- + 3), d+) with d- the largest and d+ the smallest bound among
    the inputs. Families are looked up under (min, max) of the edge.
    """
    k = len(systems)
    if k == 0:
        raise PreconditionViolated("join_many needs at least one system")
    if k == 1:
        return systems[0]
    aux = nx.Graph()
    aux.add_nodes_from(range(k))
    aux.add_edges_from(sorted((min(a, b), max(a, b)) for a, b in f_edges))
    if not nx.is_connected(aux):
        raise PreconditionViolated("auxiliary graph F is not connected")
    for i in range(k):
        for j in range(i + 1, k):
            overlap = (systems[i].x | systems[i].w) & (systems[j].x | systems[j].w)
            if overlap:
                raise PreconditionViolated(f"systems {i} and {j} overlap in {sorted(overlap)}")
    smallest_s = min(sys.spec.s for sys in systems)
    s = smallest_s if s is None else s
    if not 0 <= s <= smallest_s:
        raise PreconditionViolated(f"s = {s} must lie in [0, {smallest_s}]")
    d_min = max(sys.spec.d_min for sys in systems)
    d_max = min(sys.spec.d_max for sys in systems)
    blocked = frozenset().union(*(sys.x | sys.w for sys in systems))

    picked: set[int] = set()
    joined = systems[0]
    smallest_family = None
    for parent, child in nx.bfs_edges(aux, 0):
        key = (min(parent, child), max(parent, child))
        family = families.get(key, [])
        smallest_family = len(family) if smallest_family is None else min(smallest_family, len(family))
        chosen = []
        for path in family:
            path = tuple(path)
            if len(chosen) == 3 * s:
                break
            if picked.intersection(path):
                continue
            if blocked.intersection(path[1:-1]):
                raise PreconditionViolated(f"family path {list(path)} passes through a system")
            chosen.append(path)
            picked.update(path)
        if len(chosen) < 3 * s:
            raise PreconditionViolated(
                f"edge {key}: only {len(chosen)} disjoint family paths, need {3 * s}")
        joined = join_two(joined, systems[child], chosen, g)

    final = LinkedSpec(s, k * (d_min + 3), d_max)
    meta = {"k": k, "required_family_size": 15 * k * s, "smallest_family": smallest_family}
    return replace(joined, spec=final, metadata=meta)


# ---------------------------------------------------------------------------
# checking the definition
# ---------------------------------------------------------------------------

def _pairings(items: list[int]) -> Iterator[list[tuple[int, int]]]:
    if not items:
        yield []
        return
    first = items[0]
    for j in range(1, len(items)):
        rest = items[1:j] + items[j + 1:]
        for tail in _pairings(rest):
            yield [(first, items[j])] + tail


def _double_factorial(n: int) -> int:
    return prod(range(n, 0, -2)) if n > 0 else 1


@dataclass(frozen=True)
class LinkedCheck:
    holds: bool
    requests: int
    vacuous: bool = False
    counterexample: LinkageRequest | None = None

    def to_json(self) -> dict:
        return {
            "holds": self.holds,
            "requests": self.requests,
            "vacuous": self.vacuous,
            "counterexample": None if self.counterexample is None else self.counterexample.to_json(),
        }


def count_requests(x_size: int, spec: LinkedSpec) -> int:
    if spec.vacuous or x_size < 2 * spec.s:
        return 0
    lengths = spec.d_max - spec.d_min + 1
    return comb(x_size, 2 * spec.s) * _double_factorial(2 * spec.s - 1) * lengths ** spec.s


def check_linked_system(g: Graph, x: Iterable[int], w: Iterable[int], spec: LinkedSpec,
                        cap: int | None = None, budget: SearchBudget | int | None = None,
                        router: Callable[[Graph, LinkageRequest], Routing | None] | None = None) -> LinkedCheck:
    """Route every request of exactly s pairs from X; the first failure is the counterexample.

    With ``router`` the given routing procedure is checked instead of the
    solver; every routing it returns must be valid.
    """
    x = sorted(set(x))
    w = frozenset(w)
    total = count_requests(len(x), spec)
    if total == 0:
        return LinkedCheck(True, 0, vacuous=True)
    cap = get_request_cap() if cap is None else cap
    if total > cap:
        raise CapExceeded(f"{total} linkage requests exceed the cap of {cap}")
    budget = ensure_budget(budget, "linked system check")
    lengths = range(spec.d_min, spec.d_max + 1)
    checked = 0
    for ends in combinations(x, 2 * spec.s):
        for pairing in _pairings(list(ends)):
            for ds in product(lengths, repeat=spec.s):
                req = LinkageRequest(tuple(pairing), tuple(ds))
                inner = w - req.endpoints
                if router is None:
                    routing = find_disjoint_paths(g, req, inner, budget)
                else:
                    routing = router(g, req)
                    if routing is not None:
                        problems = check_routing(g, req, routing, inner)
                        if problems:
                            raise LemmaViolation("joined router returned an invalid routing: " + "; ".join(problems))
                checked += 1
                if routing is None:
                    return LinkedCheck(False, checked, counterexample=req)
    return LinkedCheck(True, checked)


# ---------------------------------------------------------------------------
# short path families
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ShortPathFamily:
    """Disjoint <=3-edge paths between two sets; ``truncated`` when the cap stopped the search."""

    paths: tuple[tuple[int, ...], ...]
    truncated: bool

    def to_json(self) -> dict:
        return {"paths": [list(p) for p in self.paths], "truncated": self.truncated}


def find_short_path(g: Graph, sources: int, targets: int, through: int) -> tuple[int, ...] | None:
    """Shortest path of at most 3 edges from the ``sources`` mask to the ``targets`` mask,
    interior vertices in ``through``. Ties break towards lower labels."""
    parent: dict[int, int] = {}
    frontier = bits(sources)
    seen = sources
    for _ in range(3):
        nxt = []
        for u in frontier:
            hit = g.adj[u] & targets & ~(1 << u)
            if hit:
                end = (hit & -hit).bit_length() - 1
                path = [end, u]
                while path[-1] in parent:
                    path.append(parent[path[-1]])
                return tuple(reversed(path))
            for v in bits(g.adj[u] & through & ~seen):
                seen |= 1 << v
                parent[v] = u
                nxt.append(v)
        frontier = nxt
    return None


def collect_short_path_families(g: Graph, m_sets: list[Iterable[int]], forbidden: Iterable[int],
                                cap: int) -> dict[tuple[int, int], ShortPathFamily]:
    """For each i < j, a greedy maximal family of disjoint <=3-edge paths from
    M_i to M_j whose interiors avoid ``forbidden`` and every M set."""
    masks = [mask_of(m) for m in m_sets]
    for i in range(len(masks)):
        for j in range(i + 1, len(masks)):
            if masks[i] & masks[j]:
                raise PreconditionViolated(f"M_{i} and M_{j} overlap")
    all_m = 0
    for mask in masks:
        all_m |= mask
    open_mask = g.full_mask & ~mask_of(forbidden) & ~all_m
    families = {}
    for i in range(len(masks)):
        for j in range(i + 1, len(masks)):
            used = 0
            paths = []
            truncated = False
            while True:
                if len(paths) == cap:
                    truncated = True
                    break
                path = find_short_path(g, masks[i] & ~used, masks[j] & ~used, open_mask & ~used)
                if path is None:
                    break
                paths.append(path)
                used |= mask_of(path)
            families[(i, j)] = ShortPathFamily(tuple(paths), truncated)
    return families


def family_problems(g: Graph, m_sets: list[Iterable[int]], forbidden: Iterable[int],
                    i: int, j: int, family: ShortPathFamily) -> list[str]:
    """Validate a family and, unless truncated, re-search for an augmenting path."""
    problems = []
    mi, mj = frozenset(m_sets[i]), frozenset(m_sets[j])
    all_m = frozenset().union(*(frozenset(m) for m in m_sets))
    forbidden = frozenset(forbidden)
    used: set[int] = set()
    for path in family.paths:
        if path[0] not in mi or path[-1] not in mj:
            problems.append(f"path {list(path)} does not run from M_{i} to M_{j}")
        if not 2 <= len(path) <= 4:
            problems.append(f"path {list(path)} has {len(path) - 1} edges")
        for a, b in zip(path, path[1:]):
            if not g.has_edge(a, b):
                problems.append(f"path {list(path)}: {a}-{b} is not an edge")
        if (forbidden | all_m).intersection(path[1:-1]):
            problems.append(f"path {list(path)} has a blocked interior vertex")
        if used.intersection(path):
            problems.append(f"path {list(path)} meets an earlier path")
        used.update(path)
    if not family.truncated:
        used_mask = mask_of(used)
        open_mask = g.full_mask & ~mask_of(forbidden) & ~mask_of(all_m) & ~used_mask
        extra = find_short_path(g, mask_of(mi) & ~used_mask, mask_of(mj) & ~used_mask, open_mask)
        if extra is not None:
            problems.append(f"family is not maximal: {list(extra)} is still available")
    return problems


# ---------------------------------------------------------------------------
# covering W
# ---------------------------------------------------------------------------

def cover_with_paths(g: Graph, pairs: Iterable[tuple[int, int]], length: int, w: Iterable[int],
                     budget: SearchBudget | int | None = None) -> Routing | None:
    """Disjoint paths of ``length`` edges joining the pairs and covering all of W.

    Needs |W| = |pairs| * (length - 1); any routing then uses every W vertex.
    """
    pairs = [tuple(p) for p in pairs]
    w = sorted(set(w))
    if length < 1:
        raise PreconditionViolated(f"path length must be positive, got {length}")
    if len(w) != len(pairs) * (length - 1):
        raise PreconditionViolated(
            f"|W| = {len(w)} but {len(pairs)} paths of length {length} have {len(pairs) * (length - 1)} interior vertices")
    req = LinkageRequest.build(pairs, [length] * len(pairs))
    return find_disjoint_paths(g, req, w, budget)
