#!/usr/bin/env python3
"""
Goodness Lab - Extremal Colorings

Two-colorings of K_N stored as their red graph (blue is the complement,
built on demand), and the clique blow-ups behind the lower bound
R(G, H) >= (|G| - 1)(chi(H) - 1) + sigma(H) and behind its failure for
balanced multipartite H.

Usage:
    from extremal import burr_bound, burr_coloring
    coloring = burr_coloring(4, 3, 1)   # two red triangles, blue between
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

from lab_utils import PreconditionViolated, setup_path

setup_path()
from graph_core import Graph, complement  # noqa: E402


@dataclass(frozen=True)
class EdgeColoring:
    """Red/blue coloring of K_N; ``cliques`` lists the red blocks of a blow-up."""

    red: Graph
    cliques: tuple[tuple[int, ...], ...] = ()

    @property
    def n(self) -> int:
        return self.red.n

    @cached_property
    def blue(self) -> Graph:
        return complement(self.red)

    def to_json(self) -> dict:
        return {"N": self.n, "red": [list(e) for e in self.red.edges()]}


def clique_blowup_coloring(sizes: Iterable[int]) -> EdgeColoring:
    """Disjoint red cliques of the given sizes, every other edge blue. Zero sizes are dropped."""
    sizes = [int(s) for s in sizes]
    if any(s < 0 for s in sizes):
        raise PreconditionViolated(f"clique sizes must be non-negative: {sizes}")
    blocks = []
    edges = []
    start = 0
    for size in sizes:
        if size == 0:
            continue
        block = tuple(range(start, start + size))
        blocks.append(block)
        edges.extend((block[i], block[j]) for i in range(size) for j in range(i + 1, size))
        start += size
    return EdgeColoring(Graph.from_edges(start, edges), tuple(blocks))


def burr_bound(g_size: int, chi: int, sigma: int) -> int:
    if g_size < 1 or chi < 1 or sigma < 1:
        raise PreconditionViolated(f"need g_size, chi, sigma >= 1, got ({g_size}, {chi}, {sigma})")
    return (g_size - 1) * (chi - 1) + sigma


def burr_coloring(g_size: int, chi: int, sigma: int) -> EdgeColoring:
    """chi - 1 red cliques of size g_size - 1 and one of size sigma - 1, on burr_bound - 1 vertices."""
    burr_bound(g_size, chi, sigma)
    return clique_blowup_coloring([g_size - 1] * (chi - 1) + [sigma - 1])


def tightness_coloring(n: int, k: int) -> EdgeColoring:
    """2k - 1 red cliques of size n - 1: no red tree on n vertices and no blue K^k_m for m >= n."""
    if n < 1 or k < 1:
        raise PreconditionViolated(f"need n, k >= 1, got ({n}, {k})")
    return clique_blowup_coloring([n - 1] * (2 * k - 1))
