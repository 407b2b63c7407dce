#!/usr/bin/env python3
"""
Goodness Lab - Tree Tools

Rooted forests with a degree bound, seeded random trees, and the
combinatorial surgery the embedding lemmas run on trees:

- leaves_or_bare_paths: many leaves, or many disjoint bare paths of length r
- centroid_split: one vertex whose removal leaves two sides of size <= 2n/3
- strip_bare_path_interiors / strip_leaves: the reduced forest plus what is
  needed to lift an embedding of it back to the original tree

All path lengths count edges. A bare path of length r has r+1 vertices and
its r-1 interior vertices have degree exactly 2 in the tree.

Usage:
    from tree_tools import random_bounded_tree, leaves_or_bare_paths
    t = random_bounded_tree(50, 3, 0.2, seed=7)
    split = leaves_or_bare_paths(t, 3)
"""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

from lab_utils import InvalidPaths, LemmaViolation, PreconditionViolated


@dataclass(frozen=True)
class RootedForest:
    """Forest on 0..n-1 given by a parent array (-1 marks a root).

    ``delta`` is the declared degree bound; it defaults to the actual
    maximum degree and may never be below it.
    """

    parent: tuple[int, ...]
    delta: int | None = None

    def __post_init__(self):
        n = len(self.parent)
        for v, p in enumerate(self.parent):
            if p == v or not -1 <= p < n:
                raise ValueError(f"vertex {v} has invalid parent {p}")
        if len(self.bfs_order) != n:
            raise ValueError("parent array contains a cycle")
        actual = max(self.degrees, default=0)
        if self.delta is None:
            object.__setattr__(self, "delta", actual)
        elif actual > self.delta:
            raise PreconditionViolated(f"maximum degree {actual} exceeds declared bound {self.delta}")

    # -- constructors --------------------------------------------------------

    @classmethod
    def from_parents(cls, parents: Iterable[int], delta: int | None = None) -> "RootedForest":
        return cls(tuple(int(p) for p in parents), delta)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], roots: Iterable[int] | None = None,
                   delta: int | None = None) -> "RootedForest":
        """Orient an undirected forest away from ``roots`` (lowest vertex per component by default)."""
        nbrs: list[list[int]] = [[] for _ in range(n)]
        count = 0
        for u, v in edges:
            nbrs[u].append(v)
            nbrs[v].append(u)
            count += 1
        parent = [-2] * n
        starts = list(roots) if roots is not None else []
        starts += [v for v in range(n)]
        for s in starts:
            if parent[s] != -2:
                continue
            parent[s] = -1
            queue = deque([s])
            while queue:
                u = queue.popleft()
                for w in sorted(nbrs[u]):
                    if parent[w] == -2:
                        parent[w] = u
                        queue.append(w)
        if count != n - sum(1 for p in parent if p == -1):
            raise ValueError("edge list is not a forest")
        return cls(tuple(parent), delta)

    @classmethod
    def path(cls, n: int) -> "RootedForest":
        return cls(tuple(v - 1 for v in range(n)))

    @classmethod
    def star(cls, n: int) -> "RootedForest":
        """Star on n vertices, centre 0."""
        return cls(tuple([-1] + [0] * (n - 1)))

    @classmethod
    def spider(cls, legs: int, length: int) -> "RootedForest":
        """Centre 0 with ``legs`` paths of ``length`` edges each."""
        parent = [-1]
        for _ in range(legs):
            prev = 0
            for _ in range(length):
                parent.append(prev)
                prev = len(parent) - 1
        return cls(tuple(parent))

    # -- structure -----------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.parent)

    @cached_property
    def roots(self) -> tuple[int, ...]:
        return tuple(v for v, p in enumerate(self.parent) if p == -1)

    @cached_property
    def children(self) -> tuple[tuple[int, ...], ...]:
        kids: list[list[int]] = [[] for _ in self.parent]
        for v, p in enumerate(self.parent):
            if p >= 0:
                kids[p].append(v)
        return tuple(tuple(k) for k in kids)

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        return tuple(len(self.children[v]) + (self.parent[v] >= 0) for v in range(self.n))

    @cached_property
    def bfs_order(self) -> tuple[int, ...]:
        """Roots in order, each tree breadth first, children ascending."""
        order = []
        for r in (v for v, p in enumerate(self.parent) if p == -1):
            queue = deque([r])
            while queue:
                u = queue.popleft()
                order.append(u)
                queue.extend(self.children[u])
                if len(order) > len(self.parent):
                    return tuple(order)
        return tuple(order)

    @property
    def is_tree(self) -> bool:
        return len(self.roots) == 1

    def degree(self, v: int) -> int:
        return self.degrees[v]

    def neighbors(self, v: int) -> list[int]:
        out = list(self.children[v])
        if self.parent[v] >= 0:
            out.append(self.parent[v])
        return sorted(out)

    def edges(self) -> list[tuple[int, int]]:
        return [(p, v) for v, p in enumerate(self.parent) if p >= 0]

    def subtree(self, v: int) -> list[int]:
        out = []
        stack = [v]
        while stack:
            u = stack.pop()
            out.append(u)
            stack.extend(self.children[u])
        return sorted(out)

    def trees(self) -> list[list[int]]:
        return [self.subtree(r) for r in self.roots]

    def induced(self, keep: Iterable[int]) -> tuple["RootedForest", tuple[int, ...]]:
        """Sub-forest on ``keep`` relabelled 0.. in ascending order of old label.

        A kept vertex whose parent is dropped becomes a root. Returns the
        forest and ``original_ids`` (new label -> old label).
        """
        keep = tuple(sorted(set(keep)))
        index = {old: new for new, old in enumerate(keep)}
        parents = tuple(index.get(self.parent[old], -1) if self.parent[old] >= 0 else -1 for old in keep)
        return RootedForest(parents, self.delta), keep


def forest_union(forests: Iterable[RootedForest]) -> tuple[RootedForest, tuple[int, ...]]:
    """Disjoint union; returns the forest and each input's label offset."""
    parents: list[int] = []
    offsets = []
    delta = 0
    for f in forests:
        offset = len(parents)
        offsets.append(offset)
        parents.extend(p + offset if p >= 0 else -1 for p in f.parent)
        delta = max(delta, f.delta)
    return RootedForest(tuple(parents), delta), tuple(offsets)


def random_bounded_tree(n: int, delta: int, leaf_bias: float, seed: int) -> RootedForest:
    """Seeded random tree on n vertices with maximum degree <= delta.

    Each new vertex either extends the most recent vertex (probability
    1 - leaf_bias) or hangs off a uniformly random vertex with spare
    degree. leaf_bias 0 gives a path, 1 gives the bushiest trees.
    """
    if n < 1:
        raise PreconditionViolated("a tree needs at least one vertex")
    if delta < 1 or (delta == 1 and n > 2):
        raise PreconditionViolated(f"no tree on {n} vertices has maximum degree {delta}")
    if not 0.0 <= leaf_bias <= 1.0:
        raise PreconditionViolated(f"leaf_bias must lie in [0, 1], got {leaf_bias}")
    rng = random.Random(seed)
    parent = [-1] * n
    deg = [0] * n
    spare = [0]
    slot = {0: 0}

    def close(v: int) -> None:
        i = slot.pop(v)
        last = spare.pop()
        if last != v:
            spare[i] = last
            slot[last] = i

    for v in range(1, n):
        if rng.random() < leaf_bias or deg[v - 1] >= delta:
            p = spare[rng.randrange(len(spare))]
        else:
            p = v - 1
        parent[v] = p
        deg[p] += 1
        deg[v] = 1
        if deg[p] == delta:
            close(p)
        if delta > 1:
            slot[v] = len(spare)
            spare.append(v)
    return RootedForest(tuple(parent), delta)


def leaves(t: RootedForest) -> frozenset[int]:
    """Vertices of degree <= 1."""
    return frozenset(v for v in range(t.n) if t.degree(v) <= 1)


# ---------------------------------------------------------------------------
# bare paths
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BarePathCollection:
    r: int
    paths: tuple[tuple[int, ...], ...]

    def to_json(self) -> dict:
        return {"r": self.r, "paths": [list(p) for p in self.paths]}


@dataclass(frozen=True)
class Decomposition:
    """Outcome of leaves_or_bare_paths: exactly one of leaves / paths is set."""

    kind: str
    need: int
    leaves: frozenset[int] | None = None
    paths: BarePathCollection | None = None

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind, "need": self.need}
        if self.leaves is not None:
            out["leaves"] = sorted(self.leaves)
        if self.paths is not None:
            out.update(self.paths.to_json())
        return out


def _degree_two_chains(t: RootedForest) -> list[list[int]]:
    """Maximal runs of degree-2 vertices, each padded with its two outside neighbours."""
    deg = t.degrees
    seen = [False] * t.n
    walks = []
    for v in range(t.n):
        if deg[v] != 2 or seen[v]:
            continue
        prev, cur = -1, v
        while True:
            step = [w for w in t.neighbors(cur) if deg[w] == 2 and w != prev]
            if not step:
                break
            prev, cur = cur, step[0]
        chain = [cur]
        seen[cur] = True
        prev = -1
        while True:
            step = [w for w in t.neighbors(cur) if deg[w] == 2 and w != prev and not seen[w]]
            if not step:
                break
            prev, cur = cur, step[0]
            chain.append(cur)
            seen[cur] = True
        inside = set(chain)
        if len(chain) == 1:
            a, b = t.neighbors(chain[0])
        else:
            a = next(w for w in t.neighbors(chain[0]) if w not in inside)
            b = next(w for w in t.neighbors(chain[-1]) if w not in inside)
        walks.append([a] + chain + [b])
    return walks


def harvest_bare_paths(t: RootedForest, r: int) -> BarePathCollection:
    """Cut every degree-2 chain greedily into disjoint bare paths of length r."""
    if r < 1:
        raise PreconditionViolated(f"bare path length must be positive, got {r}")
    used: set[int] = set()
    paths = []
    for walk in _degree_two_chains(t):
        start = 1 if walk[0] in used else 0
        end = len(walk) - 2 if walk[-1] in used else len(walk) - 1
        j = start
        while j + r <= end:
            piece = tuple(walk[j:j + r + 1])
            paths.append(piece)
            used.update(piece)
            j += r + 1
    return BarePathCollection(r, tuple(paths))


def check_bare_paths(t: RootedForest, coll: BarePathCollection) -> list[str]:
    problems = []
    seen: set[int] = set()
    for i, path in enumerate(coll.paths):
        if len(path) != coll.r + 1:
            problems.append(f"path {i} has {len(path) - 1} edges, expected {coll.r}")
            continue
        if any(not 0 <= v < t.n for v in path):
            problems.append(f"path {i} leaves the tree")
            continue
        for a, b in zip(path, path[1:]):
            if t.parent[a] != b and t.parent[b] != a:
                problems.append(f"path {i}: {a}-{b} is not a tree edge")
        for v in path[1:-1]:
            if t.degree(v) != 2:
                problems.append(f"path {i}: interior vertex {v} has degree {t.degree(v)}")
        clash = seen.intersection(path)
        if clash or len(set(path)) != len(path):
            problems.append(f"path {i} reuses vertices {sorted(clash)}")
        seen.update(path)
    return problems


def leaves_or_bare_paths(t: RootedForest, r: int) -> Decomposition:
    """At least ceil(n/4r) leaves, or at least that many disjoint bare paths of length r."""
    if not t.is_tree:
        raise PreconditionViolated("leaves_or_bare_paths needs a tree")
    if t.n <= 2 or r <= 2:
        raise PreconditionViolated(f"need n > 2 and r > 2, got n={t.n}, r={r}")
    need = math.ceil(t.n / (4 * r))
    found = leaves(t)
    if len(found) >= need:
        return Decomposition("leaves", need, leaves=found)
    coll = harvest_bare_paths(t, r)
    if len(coll.paths) < need:
        raise LemmaViolation(f"tree with {len(found)} leaves yielded only {len(coll.paths)} bare paths, need {need}")
    return Decomposition("paths", need, paths=coll)


# ---------------------------------------------------------------------------
# centroid split
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CentroidSplit:
    centroid: int
    a: frozenset[int]
    b: frozenset[int]
    a_roots: tuple[int, ...]
    b_roots: tuple[int, ...]

    def to_json(self) -> dict:
        return {"centroid": self.centroid, "A": sorted(self.a), "B": sorted(self.b)}


def centroid_split(t: RootedForest) -> CentroidSplit:
    """Centroid u and a split of T - u into sides with no edge across, each <= floor(2n/3)."""
    if not t.is_tree or t.n < 2:
        raise PreconditionViolated("centroid_split needs a tree on at least 2 vertices")
    n = t.n
    size = [1] * n
    for v in reversed(t.bfs_order):
        if t.parent[v] >= 0:
            size[t.parent[v]] += size[v]
    u = next(v for v in range(n)
             if max([size[c] for c in t.children[v]] + [n - size[v]] * (t.parent[v] >= 0)) <= n // 2)
    # (size, representative, member vertices, neighbour of u inside)
    parts = [(size[c], c, t.subtree(c), c) for c in t.children[u]]
    if t.parent[u] >= 0:
        below = set(t.subtree(u))
        parts.append((n - size[u], t.parent[u], [v for v in range(n) if v not in below], t.parent[u]))
    parts.sort(key=lambda p: (-p[0], p[1]))
    side_a: list[int] = []
    side_b: list[int] = []
    roots_a: list[int] = []
    roots_b: list[int] = []
    for _, _, members, root in parts:
        if len(side_a) <= len(side_b):
            side_a.extend(members)
            roots_a.append(root)
        else:
            side_b.extend(members)
            roots_b.append(root)
    return CentroidSplit(u, frozenset(side_a), frozenset(side_b), tuple(sorted(roots_a)), tuple(sorted(roots_b)))


def check_centroid_split(t: RootedForest, split: CentroidSplit) -> list[str]:
    problems = []
    n = t.n
    if split.a & split.b or split.centroid in split.a | split.b:
        problems.append("sides overlap")
    if len(split.a) + len(split.b) + 1 != n:
        problems.append("sides do not cover T - u")
    limit = (2 * n) // 3
    for name, side in (("A", split.a), ("B", split.b)):
        if len(side) > limit:
            problems.append(f"side {name} has {len(side)} > {limit} vertices")
    for u, v in t.edges():
        if (u in split.a and v in split.b) or (u in split.b and v in split.a):
            problems.append(f"edge ({u},{v}) crosses the split")
    return problems


# ---------------------------------------------------------------------------
# stripping
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StrippedPaths:
    """Forest left after deleting bare-path interiors.

    ``pairs`` are the path endpoints in new labels; ``paths`` the original
    paths in old labels; ``original_ids[new] = old``.
    """

    forest: RootedForest
    original_ids: tuple[int, ...]
    pairs: tuple[tuple[int, int], ...]
    paths: tuple[tuple[int, ...], ...]
    r: int


@dataclass(frozen=True)
class StrippedLeaves:
    """Forest left after deleting leaves; ``groups[v]`` lists the old labels hanging off new vertex v."""

    forest: RootedForest
    original_ids: tuple[int, ...]
    groups: dict[int, tuple[int, ...]]

    @property
    def demands(self) -> dict[int, int]:
        return {v: len(g) for v, g in self.groups.items()}


def strip_bare_path_interiors(t: RootedForest, coll: BarePathCollection) -> StrippedPaths:
    problems = check_bare_paths(t, coll)
    if problems:
        raise InvalidPaths("; ".join(problems))
    interior = {v for path in coll.paths for v in path[1:-1]}
    forest, original = t.induced(v for v in range(t.n) if v not in interior)
    index = {old: new for new, old in enumerate(original)}
    pairs = tuple((index[p[0]], index[p[-1]]) for p in coll.paths)
    return StrippedPaths(forest, original, pairs, coll.paths, coll.r)


def strip_leaves(t: RootedForest) -> StrippedLeaves:
    """Delete all leaves. On K_2 the lower vertex is kept with demand 1."""
    if not t.is_tree or t.n < 2:
        raise PreconditionViolated("strip_leaves needs a tree on at least 2 vertices")
    if t.n == 2:
        forest, original = t.induced([0])
        return StrippedLeaves(forest, original, {0: (1,)})
    removed = leaves(t)
    forest, original = t.induced(v for v in range(t.n) if v not in removed)
    index = {old: new for new, old in enumerate(original)}
    groups: dict[int, list[int]] = {}
    for leaf in sorted(removed):
        (host,) = t.neighbors(leaf)
        groups.setdefault(index[host], []).append(leaf)
    return StrippedLeaves(forest, original, {v: tuple(g) for v, g in sorted(groups.items())})
