#!/usr/bin/env python3
"""
Goodness Lab - File Formats

Readers and writers for every artifact the lab exchanges, plus the
shorthand grammars the command line accepts. See docs/formats.md.

Graph text:   line 1 "n m", then m lines "u v"; blank lines and # comments ignored
Tree text:    "n; p_1 ... p_{n-1}" (parent of vertex i; vertex 0 is the root)
Coloring:     line 1 "N", then the red graph in graph text format

Usage:
    from formats import parse_tree_spec, parse_h_spec
    t = parse_tree_spec("random:40,3,0.3,7")
    h = parse_h_spec("multipartite:1,2,2")
"""

from __future__ import annotations

import json
from pathlib import Path

import networkx as nx

from lab_utils import FormatError, setup_path

setup_path()
from extremal import EdgeColoring  # noqa: E402
from graph_core import Graph  # noqa: E402
from linkage import LinkageRequest, LinkedSpec, LinkedSystem, Routing  # noqa: E402
from matching import DemandedBipartite  # noqa: E402
from tree_tools import BarePathCollection, RootedForest, random_bounded_tree  # noqa: E402


def _content_lines(text: str) -> list[str]:
    out = []
    for line in text.splitlines():
        stripped = line.split("#", 1)[0].strip()
        if stripped:
            out.append(stripped)
    return out


def _ints(parts: list[str], what: str) -> list[int]:
    try:
        return [int(p) for p in parts]
    except ValueError:
        raise FormatError(f"{what}: expected integers, got {' '.join(parts)!r}") from None


# ---------------------------------------------------------------------------
# graphs
# ---------------------------------------------------------------------------

def parse_graph_text(text: str) -> Graph:
    lines = _content_lines(text)
    if not lines:
        raise FormatError("graph text is empty")
    header = _ints(lines[0].split(), "graph header")
    if len(header) != 2:
        raise FormatError(f"graph header must be 'n m', got {lines[0]!r}")
    n, m = header
    if len(lines) - 1 != m:
        raise FormatError(f"header announces {m} edges, found {len(lines) - 1}")
    edges = set()
    for line in lines[1:]:
        pair = _ints(line.split(), "edge line")
        if len(pair) != 2:
            raise FormatError(f"edge line must be 'u v', got {line!r}")
        u, v = sorted(pair)
        if (u, v) in edges:
            raise FormatError(f"duplicate edge {u} {v}")
        edges.add((u, v))
    try:
        return Graph.from_edges(n, sorted(edges))
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def graph_to_text(g: Graph) -> str:
    edges = g.edges()
    return "\n".join([f"{g.n} {len(edges)}"] + [f"{u} {v}" for u, v in edges]) + "\n"


def graph_to_json(g: Graph) -> dict:
    return {"n": g.n, "edges": [list(e) for e in g.edges()]}


def graph_from_json(data: dict) -> Graph:
    try:
        return Graph.from_edges(int(data["n"]), [(int(u), int(v)) for u, v in data["edges"]])
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad graph JSON: {exc}") from exc


def load_graph(path: str | Path) -> Graph:
    """Graph file in text or JSON form (JSON when the content starts with '{')."""
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        return graph_from_json(json.loads(text))
    return parse_graph_text(text)


# ---------------------------------------------------------------------------
# trees
# ---------------------------------------------------------------------------

def parse_tree_text(text: str, delta: int | None = None) -> RootedForest:
    body = " ".join(_content_lines(text))
    if ";" not in body:
        raise FormatError(f"tree text must look like 'n; p_1 ... p_(n-1)', got {body!r}")
    head, tail = body.split(";", 1)
    (n,) = _ints(head.split(), "tree size")
    parents = _ints(tail.split(), "parent array")
    if n < 1 or len(parents) != n - 1:
        raise FormatError(f"tree on {n} vertices needs {max(n - 1, 0)} parents, got {len(parents)}")
    try:
        t = RootedForest.from_parents([-1] + parents, delta)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc
    if not t.is_tree:
        raise FormatError("parent array describes a forest, not a tree rooted at 0")
    return t


def tree_to_text(t: RootedForest) -> str:
    if t.roots != (0,):
        raise FormatError("tree text needs a single tree rooted at 0")
    return f"{t.n}; " + " ".join(str(p) for p in t.parent[1:]) + "\n"


def tree_to_json(t: RootedForest) -> dict:
    return {"n": t.n, "parents": list(t.parent), "delta": t.delta}


def tree_from_json(data: dict) -> RootedForest:
    try:
        return RootedForest.from_parents(data["parents"], data.get("delta"))
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad tree JSON: {exc}") from exc


def load_tree(path: str | Path) -> RootedForest:
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        return tree_from_json(json.loads(text))
    return parse_tree_text(text)


def parse_tree_spec(spec: str) -> RootedForest:
    """path:n | star:n | spider:legs,len | random:n,delta,bias,seed | file:PATH"""
    kind, _, arg = spec.partition(":")
    try:
        if kind == "path":
            return RootedForest.path(int(arg))
        if kind == "star":
            return RootedForest.star(int(arg))
        if kind == "spider":
            legs, length = (int(a) for a in arg.split(","))
            return RootedForest.spider(legs, length)
        if kind == "random":
            n, delta, bias, seed = arg.split(",")
            return random_bounded_tree(int(n), int(delta), float(bias), int(seed))
        if kind == "file":
            return load_tree(arg)
    except (ValueError, OSError) as exc:
        raise FormatError(f"bad tree shorthand {spec!r}: {exc}") from exc
    raise FormatError(f"unknown tree shorthand {spec!r}")


def parse_h_spec(spec: str) -> Graph:
    """clique:n | cycle:n | path:n | multipartite:a,b,... | empty:n | file:PATH"""
    kind, _, arg = spec.partition(":")
    try:
        if kind == "clique":
            return Graph.from_networkx(nx.complete_graph(int(arg)))
        if kind == "cycle":
            return Graph.from_networkx(nx.cycle_graph(int(arg)))
        if kind == "path":
            return Graph.from_networkx(nx.path_graph(int(arg)))
        if kind == "multipartite":
            return Graph.from_networkx(nx.complete_multipartite_graph(*(int(a) for a in arg.split(","))))
        if kind == "empty":
            return Graph.from_networkx(nx.empty_graph(int(arg)))
        if kind == "file":
            return load_graph(arg)
    except (ValueError, OSError, nx.NetworkXError) as exc:
        raise FormatError(f"bad graph shorthand {spec!r}: {exc}") from exc
    raise FormatError(f"unknown graph shorthand {spec!r}")


# ---------------------------------------------------------------------------
# other artifacts
# ---------------------------------------------------------------------------

def bare_paths_from_json(data) -> BarePathCollection:
    """Accepts {"r": r, "paths": [...]} or a bare list of vertex arrays."""
    paths = data["paths"] if isinstance(data, dict) else data
    paths = tuple(tuple(int(v) for v in p) for p in paths)
    if isinstance(data, dict) and "r" in data:
        r = int(data["r"])
    elif paths:
        r = len(paths[0]) - 1
    else:
        raise FormatError("empty path list without r")
    return BarePathCollection(r, paths)


def demand_from_json(data: dict) -> DemandedBipartite:
    try:
        return DemandedBipartite.build(
            data["A"], data["B"], [tuple(e) for e in data["edges"]],
            {int(a): int(k) for a, k in data.get("demands", {}).items()})
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad demand JSON: {exc}") from exc


def routing_from_json(data: list) -> Routing:
    return Routing(tuple(tuple(int(v) for v in p) for p in data))


def spec_from_json(data: dict) -> LinkedSpec:
    return LinkedSpec(int(data["s"]), int(data["dmin"]), int(data["dmax"]))


def request_from_json(data: dict) -> LinkageRequest:
    return LinkageRequest.build([tuple(p) for p in data["pairs"]], data["lengths"])


def coloring_to_text(c: EdgeColoring) -> str:
    return f"{c.n}\n" + graph_to_text(c.red)


def coloring_from_text(text: str) -> EdgeColoring:
    lines = _content_lines(text)
    if not lines:
        raise FormatError("coloring text is empty")
    (n,) = _ints(lines[0].split(), "coloring header")
    red = parse_graph_text("\n".join(lines[1:]))
    if red.n != n:
        raise FormatError(f"header says N={n}, red graph has {red.n} vertices")
    return EdgeColoring(red)


def system_from_json(data: dict) -> LinkedSystem:
    """{"X": [...], "W": [...], "spec": {"s", "dmin", "dmax"}}"""
    try:
        return LinkedSystem(frozenset(int(v) for v in data["X"]), frozenset(int(v) for v in data["W"]),
                            spec_from_json(data["spec"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad linked system JSON: {exc}") from exc


def families_from_json(data: dict) -> dict[tuple[int, int], list[tuple[int, ...]]]:
    """Keys "i,j" (or "i-j") to lists of vertex paths."""
    out = {}
    for key, paths in data.items():
        try:
            i, j = (int(p) for p in key.replace("-", ",").split(","))
        except ValueError:
            raise FormatError(f"family key {key!r} must look like 'i,j'") from None
        out[(min(i, j), max(i, j))] = [tuple(int(v) for v in p) for p in paths]
    return out
