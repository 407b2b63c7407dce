#!/usr/bin/env python3
"""
Goodness Lab - Graph Core

Simple undirected graphs on dense labels 0..n-1 stored as adjacency bitsets
(one Python int per vertex), plus the exact searches every other module
leans on: complete multipartite subgraphs, pattern copies, forest copies.

Vertex sets cross module boundaries as frozensets; inside the searches they
are int masks (bit v set <=> vertex v present).

Usage:
    from graph_core import Graph, complement, find_multipartite
    g = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
    parts = find_multipartite(complement(g), [1, 2])
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import networkx as nx

from lab_utils import (
    PreconditionViolated,
    SearchBudget,
    ensure_budget,
    setup_path,
)

setup_path()
from config_loader import get_max_vertices  # noqa: E402
from tree_tools import RootedForest  # noqa: E402


# ---------------------------------------------------------------------------
# bitset helpers
# ---------------------------------------------------------------------------

def mask_of(vertices: Iterable[int]) -> int:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


def bits(mask: int) -> list[int]:
    """Members of a mask in ascending order."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def popcount(mask: int) -> int:
    return mask.bit_count()


def as_set(mask: int) -> frozenset[int]:
    return frozenset(bits(mask))


# ---------------------------------------------------------------------------
# Graph
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Graph:
    """Simple graph; ``adj[v]`` is the bitset of neighbours of ``v``."""

    n: int
    adj: tuple[int, ...]

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("vertex count must be non-negative")
        if self.n > get_max_vertices():
            raise PreconditionViolated(
                f"graph has {self.n} vertices, configured limit is {get_max_vertices()}")
        if len(self.adj) != self.n:
            raise ValueError(f"adjacency has {len(self.adj)} rows for {self.n} vertices")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        rows = [0] * n
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) outside 0..{n - 1}")
            if u == v:
                raise ValueError(f"self-loop at {u}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, tuple(rows))

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n, (0,) * n)

    @classmethod
    def complete(cls, n: int) -> "Graph":
        full = (1 << n) - 1
        return cls(n, tuple(full & ~(1 << v) for v in range(n)))

    @classmethod
    def from_networkx(cls, nxg: nx.Graph) -> "Graph":
        """Relabel nodes to 0..n-1 in sorted order and copy the edges."""
        nodes = sorted(nxg.nodes())
        index = {node: i for i, node in enumerate(nodes)}
        return cls.from_edges(len(nodes), ((index[a], index[b]) for a, b in nxg.edges() if a != b))

    def to_networkx(self) -> nx.Graph:
        nxg = nx.Graph()
        nxg.add_nodes_from(range(self.n))
        nxg.add_edges_from(self.edges())
        return nxg

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def neighbors(self, v: int) -> list[int]:
        return bits(self.adj[v])

    def edges(self) -> list[tuple[int, int]]:
        out = []
        for u in range(self.n):
            for v in bits(self.adj[u] >> (u + 1)):
                out.append((u, u + 1 + v))
        return out

    def edge_count(self) -> int:
        return sum(row.bit_count() for row in self.adj) // 2

    def max_degree(self) -> int:
        return max((row.bit_count() for row in self.adj), default=0)


def complement(g: Graph) -> Graph:
    full = g.full_mask
    return Graph(g.n, tuple(full & ~row & ~(1 << v) for v, row in enumerate(g.adj)))


def universe_mask(g: Graph, universe: Iterable[int] | None) -> int:
    """Mask of the subgraph a search is confined to (whole graph when None)."""
    if universe is None:
        return g.full_mask
    mask = mask_of(universe)
    if mask & ~g.full_mask:
        raise PreconditionViolated("universe contains vertices outside the graph")
    return mask


def union_mask(g: Graph, smask: int) -> int:
    """Bitset of the union of the neighbourhoods of the members of ``smask``."""
    out = 0
    for v in bits(smask):
        out |= g.adj[v]
    return out


def neighborhood(g: Graph, s: Iterable[int], mode: str = "open",
                 universe: Iterable[int] | None = None) -> frozenset[int]:
    """Neighbourhood of a vertex set.

    ``open``: N(S), neighbours outside S. ``gamma``: the union of the
    individual neighbourhoods, which may meet S.
    """
    smask = mask_of(s)
    out = union_mask(g, smask) & universe_mask(g, universe)
    if mode == "open":
        out &= ~smask
    elif mode != "gamma":
        raise ValueError(f"unknown neighbourhood mode {mode!r}")
    return as_set(out)


# ---------------------------------------------------------------------------
# complete multipartite subgraphs
# ---------------------------------------------------------------------------

def check_sizes(sizes: Iterable[int]) -> tuple[int, ...]:
    sizes = tuple(int(m) for m in sizes)
    if not sizes:
        raise PreconditionViolated("a multipartite graph needs at least one part")
    if any(m < 1 for m in sizes):
        raise PreconditionViolated(f"part sizes must be positive: {sizes}")
    if list(sizes) != sorted(sizes):
        raise PreconditionViolated(f"part sizes must be non-decreasing: {sizes}")
    return sizes


@dataclass(frozen=True)
class MultipartiteWitness:
    """Parts of a complete multipartite graph found in the complement of a host."""

    parts: tuple[frozenset[int], ...]

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(p) for p in self.parts)

    def problems_in_complement(self, g: Graph, sizes: Iterable[int] | None = None) -> list[str]:
        """Every cross-part pair must be a non-edge of ``g``."""
        return check_multipartite(complement(g), self.parts, sizes)

    def to_json(self) -> dict:
        return {"parts": [sorted(p) for p in self.parts]}


def check_multipartite(g: Graph, parts, sizes: Iterable[int] | None = None) -> list[str]:
    """Problems with ``parts`` as a copy of K_{m_1..m_k} inside ``g``."""
    problems = []
    parts = [frozenset(p) for p in parts]
    if sizes is not None:
        sizes = tuple(sizes)
        if tuple(len(p) for p in parts) != sizes:
            problems.append(f"part sizes {[len(p) for p in parts]} != {list(sizes)}")
    seen: set[int] = set()
    for i, part in enumerate(parts):
        for v in part:
            if not 0 <= v < g.n:
                problems.append(f"part {i}: vertex {v} outside graph")
            elif v in seen:
                problems.append(f"vertex {v} in more than one part")
            seen.add(v)
    if problems:
        return problems
    for i in range(len(parts)):
        for j in range(i + 1, len(parts)):
            for u in sorted(parts[i]):
                missing = mask_of(parts[j]) & ~g.adj[u]
                if missing:
                    problems.append(f"parts {i},{j}: {u} not adjacent to {bits(missing)}")
    return problems


def find_multipartite(g: Graph, sizes: Iterable[int], budget: SearchBudget | int | None = None,
                      universe: Iterable[int] | None = None) -> tuple[frozenset[int], ...] | None:
    """Exact search for a copy of K_{m_1..m_k} in ``g``.

    Parts are filled in the given order, members of a part in ascending
    label order. Returns None when the search space is exhausted.
    """
    sizes = check_sizes(sizes)
    budget = ensure_budget(budget, "multipartite search")
    allowed = universe_mask(g, universe)
    k = len(sizes)
    tail = [sum(sizes[i:]) for i in range(k + 1)]
    chosen: list[list[int]] = [[] for _ in range(k)]

    def fill(i: int, pick_from: int, later: int) -> bool:
        # pick_from: candidates for part i; later: candidates for parts > i
        part = chosen[i]
        need = sizes[i] - len(part)
        if need == 0:
            if i + 1 == k:
                return True
            return fill(i + 1, later, later)
        pool = pick_from
        while pool:
            if popcount(pool) < need:
                return False
            low = pool & -pool
            v = low.bit_length() - 1
            pool ^= low
            nxt_later = later & g.adj[v] & ~low
            if popcount(nxt_later) < tail[i + 1]:
                continue
            budget.tick()
            part.append(v)
            if fill(i, pool, nxt_later):
                return True
            part.pop()
        return False

    if popcount(allowed) < tail[0]:
        return None
    if fill(0, allowed, allowed):
        return tuple(frozenset(p) for p in chosen)
    return None


# ---------------------------------------------------------------------------
# pattern copies
# ---------------------------------------------------------------------------

def _connectivity_order(pattern: Graph, first: tuple[int, ...] = ()) -> list[int]:
    """Order pattern vertices so each one sees as many earlier neighbours as possible."""
    order = list(first)
    placed = mask_of(order)
    while len(order) < pattern.n:
        best = None
        best_key = None
        for v in range(pattern.n):
            if placed >> v & 1:
                continue
            key = (popcount(pattern.adj[v] & placed), pattern.degree(v), -v)
            if best_key is None or key > best_key:
                best, best_key = v, key
        order.append(best)
        placed |= 1 << best
    return order


def _extend_copy(host: Graph, pattern: Graph, order: list[int], mapping: dict[int, int],
                 allowed: int, budget: SearchBudget) -> dict[int, int] | None:
    position = {v: i for i, v in enumerate(order)}
    earlier = [[u for u in pattern.neighbors(v) if position[u] < position[v]] for v in order]
    host_degree = [popcount(host.adj[x] & allowed) for x in range(host.n)]
    used = mask_of(mapping.values())

    def place(i: int) -> bool:
        nonlocal used
        if i == len(order):
            return True
        w = order[i]
        if w in mapping:
            x = mapping[w]
            if any(not host.has_edge(x, mapping[u]) for u in earlier[i]):
                return False
            return place(i + 1)
        cand = allowed & ~used
        for u in earlier[i]:
            cand &= host.adj[mapping[u]]
        need = pattern.degree(w)
        for x in bits(cand):
            if host_degree[x] < need:
                continue
            budget.tick()
            mapping[w] = x
            used |= 1 << x
            if place(i + 1):
                return True
            used &= ~(1 << x)
            del mapping[w]
        return False

    if place(0):
        return dict(mapping)
    return None


def find_subgraph_copy(host: Graph, pattern: Graph, budget: SearchBudget | int | None = None,
                       universe: Iterable[int] | None = None,
                       through_edge: tuple[int, int] | None = None) -> dict[int, int] | None:
    """Injective map pattern -> host sending edges to edges, or None.

    With ``through_edge`` only copies using that host edge are searched;
    the coloring search uses this after colouring a single edge.
    """
    budget = ensure_budget(budget, "subgraph search")
    allowed = universe_mask(host, universe)
    if pattern.n == 0:
        return {}
    if pattern.n > popcount(allowed):
        return None
    if through_edge is None:
        return _extend_copy(host, pattern, _connectivity_order(pattern), {}, allowed, budget)

    u, v = through_edge
    if not host.has_edge(u, v) or not (allowed >> u & 1 and allowed >> v & 1):
        return None
    for a, b in pattern.edges():
        for x, y in ((a, b), (b, a)):
            found = _extend_copy(host, pattern, _connectivity_order(pattern, (x, y)),
                                 {x: u, y: v}, allowed, budget)
            if found is not None:
                return found
    return None


# ---------------------------------------------------------------------------
# forest embeddings
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Embedding:
    """Injective map from forest vertices to host vertices preserving edges.

    ``images[v]`` is the host vertex of forest vertex ``v``. ``roots`` lists
    prescribed host roots, one per tree in ``forest.roots`` order, when the
    embedding was asked to honour them. ``certified`` marks embeddings built
    by the certified induction.
    """

    forest: RootedForest
    images: tuple[int, ...]
    roots: tuple[int, ...] | None = None
    certified: bool = False
    metadata: dict = field(default_factory=dict, compare=False)

    @property
    def image_set(self) -> frozenset[int]:
        return frozenset(self.images)

    def to_json(self) -> dict:
        return {
            "images": list(self.images),
            "roots": None if self.roots is None else list(self.roots),
            "certified": self.certified,
        }


def check_embedding(g: Graph, emb: Embedding, universe: Iterable[int] | None = None) -> list[str]:
    """Problems with ``emb`` as an embedding into ``g`` (empty list = valid)."""
    problems = []
    f = emb.forest
    if len(emb.images) != f.n:
        return [f"{len(emb.images)} images for a forest on {f.n} vertices"]
    allowed = universe_mask(g, universe)
    if len(set(emb.images)) != len(emb.images):
        problems.append("images are not distinct")
    for v, x in enumerate(emb.images):
        if not 0 <= x < g.n:
            problems.append(f"vertex {v} mapped outside the host: {x}")
        elif not allowed >> x & 1:
            problems.append(f"vertex {v} mapped outside the allowed region: {x}")
    if problems:
        return problems
    for u, v in f.edges():
        if not g.has_edge(emb.images[u], emb.images[v]):
            problems.append(f"edge ({u},{v}) maps to non-edge ({emb.images[u]},{emb.images[v]})")
    if emb.roots is not None:
        if len(emb.roots) != len(f.roots):
            problems.append(f"{len(emb.roots)} prescribed roots for {len(f.roots)} trees")
        else:
            for r, x in zip(f.roots, emb.roots):
                if emb.images[r] != x:
                    problems.append(f"root {r} mapped to {emb.images[r]}, prescribed {x}")
    return problems


def forest_graph(f: RootedForest) -> Graph:
    return Graph.from_edges(f.n, f.edges())


def contains_forest_copy(g: Graph, f: RootedForest, budget: SearchBudget | int | None = None,
                         universe: Iterable[int] | None = None) -> Embedding | None:
    """Exhaustive search for a copy of ``f`` in ``g`` (roots unconstrained)."""
    allowed = universe_mask(g, universe)
    if f.n > popcount(allowed):
        return None
    mapping = find_subgraph_copy(g, forest_graph(f), budget, universe=universe)
    if mapping is None:
        return None
    return Embedding(f, tuple(mapping[v] for v in range(f.n)))
