#!/usr/bin/env python3
"""
Goodness Lab - Ground Truth

Exact, budgeted answers at desk scale:

- chromatic_data: chi(H) and sigma(H), the smallest possible smallest
  class over all proper chi-colorings
- coloring_contains: red tree or blue H in a given coloring
- ramsey_number: the least N with no coloring of K_N avoiding both,
  by edge-by-edge backtracking with incremental containment checks
- goodness_check: compare R(T, H) with the Burr bound

Every answer is tri-state: a result, a certificate, or Unresolved.

Usage:
    from verify import goodness_check
    result = goodness_check(RootedForest.path(3), Graph.complete(3))
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from lab_utils import (
    VERDICT_NO,
    VERDICT_UNKNOWN,
    VERDICT_YES,
    CapExceeded,
    LemmaViolation,
    PreconditionViolated,
    SearchBudget,
    SearchBudgetExceeded,
    Unresolved,
    ensure_budget,
    setup_path,
)

setup_path()
from config_loader import get_chromatic_cap, get_ramsey_limits  # noqa: E402
from extremal import EdgeColoring, burr_bound, burr_coloring  # noqa: E402
from graph_core import Graph, contains_forest_copy, find_subgraph_copy, forest_graph  # noqa: E402
from tree_tools import RootedForest  # noqa: E402


# ---------------------------------------------------------------------------
# chromatic data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChromaticData:
    chi: int
    sigma: int
    coloring: tuple[int, ...]

    def to_json(self) -> dict:
        return {"chi": self.chi, "sigma": self.sigma, "coloring": list(self.coloring)}


def check_chromatic_witness(h: Graph, data: ChromaticData) -> list[str]:
    problems = []
    if len(data.coloring) != h.n:
        return [f"{len(data.coloring)} colours for {h.n} vertices"]
    for u, v in h.edges():
        if data.coloring[u] == data.coloring[v]:
            problems.append(f"edge ({u},{v}) is monochromatic")
    classes = [data.coloring.count(c) for c in range(data.chi)]
    if sorted(set(data.coloring)) != list(range(data.chi)):
        problems.append(f"colours {sorted(set(data.coloring))} are not 0..{data.chi - 1}")
    elif min(classes) != data.sigma:
        problems.append(f"smallest class has {min(classes)} vertices, sigma is {data.sigma}")
    return problems


def chromatic_data(h: Graph, cap: int | None = None, budget: SearchBudget | int | None = None) -> ChromaticData:
    """Exact chi and sigma by enumerating colorings with canonical colour labels."""
    cap = get_chromatic_cap() if cap is None else cap
    if h.n == 0:
        raise PreconditionViolated("chromatic data of the empty graph is undefined")
    if h.n > cap:
        raise CapExceeded(f"graph on {h.n} vertices exceeds chromatic cap {cap}")
    budget = ensure_budget(budget, "chromatic search")
    n = h.n
    colour = [-1] * n

    for k in range(1, n + 1):
        best: list[int] | None = None
        best_sigma = n + 1
        counts = [0] * k

        def assign(v: int, used: int) -> bool:
            # returns True to stop early (sigma cannot go below 1)
            nonlocal best, best_sigma
            if used + (n - v) < k:
                return False
            if v == n:
                if used == k:
                    sigma = min(counts)
                    if sigma < best_sigma:
                        best_sigma, best = sigma, list(colour)
                    return best_sigma == 1
                return False
            for c in range(min(used + 1, k)):
                if any(colour[u] == c for u in h.neighbors(v) if u < v):
                    continue
                budget.tick()
                colour[v] = c
                counts[c] += 1
                stop = assign(v + 1, max(used, c + 1))
                counts[c] -= 1
                colour[v] = -1
                if stop:
                    return True
            return False

        assign(0, 0)
        if best is not None:
            return ChromaticData(k, best_sigma, tuple(best))
    raise LemmaViolation("no proper colouring found with n colours")


# ---------------------------------------------------------------------------
# colorings
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Containment:
    """kind is "red" (copy of the tree), "blue" (copy of H) or "neither"."""

    kind: str
    witness: dict[int, int] | None = None

    def to_json(self) -> dict:
        return {"kind": self.kind,
                "witness": None if self.witness is None else {str(k): v for k, v in sorted(self.witness.items())}}


def coloring_contains(c: EdgeColoring, t: RootedForest, h: Graph,
                      budget: SearchBudget | int | None = None) -> Containment:
    budget = ensure_budget(budget, "coloring containment")
    emb = contains_forest_copy(c.red, t, budget)
    if emb is not None:
        return Containment("red", dict(enumerate(emb.images)))
    copy = find_subgraph_copy(c.blue, h, budget)
    if copy is not None:
        return Containment("blue", copy)
    return Containment("neither")


def _edgeless_forced(pattern: Graph, n: int) -> bool:
    return pattern.edge_count() == 0 and pattern.n <= n


def avoiding_coloring(t: RootedForest, h: Graph, n: int, budget: SearchBudget,
                      symmetric: bool = False) -> EdgeColoring | None:
    """A coloring of K_n with no red t and no blue h, or None after exhausting the search.

    Edges are coloured in lexicographic order; after each choice only the
    copies through the new edge are searched. With ``symmetric`` the red
    neighbours of vertex 0 are forced to be an initial segment 1..a.
    """
    tg = forest_graph(t)
    if _edgeless_forced(tg, n) or _edgeless_forced(h, n):
        return None
    edges = [(u, v) for u in range(n) for v in range(u + 1, n)]
    red = [0] * n
    blue = [0] * n

    def partial(rows: list[int]) -> Graph:
        return Graph(n, tuple(rows))

    def place(i: int) -> bool:
        if i == len(edges):
            return True
        u, v = edges[i]
        options = ("red", "blue")
        if symmetric and u == 0 and v >= 2 and not red[0] >> (v - 1) & 1:
            options = ("blue",)
        for colour in options:
            budget.tick()
            rows, pattern = (red, tg) if colour == "red" else (blue, h)
            rows[u] |= 1 << v
            rows[v] |= 1 << u
            hit = pattern.edge_count() and find_subgraph_copy(partial(rows), pattern, budget, through_edge=(u, v))
            if not hit and place(i + 1):
                return True
            rows[u] &= ~(1 << v)
            rows[v] &= ~(1 << u)
        return False

    if place(0):
        return EdgeColoring(partial(red))
    return None


@dataclass
class RamseyResult:
    value: int
    lower_certificate: EdgeColoring | None
    log: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "R": self.value,
            "lower_certificate": None if self.lower_certificate is None else self.lower_certificate.to_json(),
            "log": self.log,
        }


def ramsey_number(t: RootedForest, h: Graph, n_max: int | None = None, start: int = 1,
                  budget: SearchBudget | int | None = None) -> RamseyResult:
    """Least N >= start such that every coloring of K_N has a red t or a blue h.

    Searches exhaustively up to the configured full size, with vertex-0
    symmetry breaking up to the pruned size. CapExceeded carries [lo, None]
    when the value lies beyond what was searched.
    """
    full_max, pruned_max = get_ramsey_limits()
    n_max = pruned_max if n_max is None else min(n_max, pruned_max)
    budget = ensure_budget(budget, "ramsey search")
    log: list[dict] = []
    certificate = None
    for n in range(start, n_max + 1):
        before = budget.spent
        try:
            found = avoiding_coloring(t, h, n, budget, symmetric=n > full_max)
        except SearchBudgetExceeded as exc:
            raise CapExceeded(f"R > {n - 1} known, search at N={n} ran out of budget ({exc})",
                              bracket=(n, None)) from exc
        log.append({"N": n, "avoiding": found is not None, "nodes": budget.spent - before})
        if found is None:
            if certificate is not None and coloring_contains(certificate, t, h).kind != "neither":
                raise LemmaViolation(f"avoiding coloring of K_{n - 1} failed its re-check")
            return RamseyResult(n, certificate, log)
        certificate = found
    raise CapExceeded(f"every N up to {n_max} has an avoiding coloring", bracket=(n_max + 1, None))


# ---------------------------------------------------------------------------
# goodness
# ---------------------------------------------------------------------------

@dataclass
class GoodnessResult:
    verdict: str
    bound: int | None
    chromatic: ChromaticData | None = None
    ramsey: int | None = None
    bracket: tuple[int, int | None] | None = None
    certificate: EdgeColoring | None = None
    reason: str = ""

    @property
    def label(self) -> str:
        return {VERDICT_YES: "Good", VERDICT_NO: "NotGood"}.get(self.verdict, "Unknown")

    def to_json(self) -> dict:
        return {
            "verdict": self.label,
            "bound": self.bound,
            "chi": None if self.chromatic is None else self.chromatic.chi,
            "sigma": None if self.chromatic is None else self.chromatic.sigma,
            "R": self.ramsey,
            "bracket": None if self.bracket is None else list(self.bracket),
            "certificate": None if self.certificate is None else self.certificate.to_json(),
            "reason": self.reason,
        }


def goodness_check(t: RootedForest, h: Graph, n_max: int | None = None,
                   budget: SearchBudget | int | None = None) -> GoodnessResult:
    """Good when R(t, h) equals the Burr bound.

    The Burr coloring on bound - 1 vertices certifies R >= bound; the
    exhaustive search then runs only at N = bound, and beyond it only when
    the tree is not good.
    """
    if not t.is_tree:
        raise PreconditionViolated("goodness is defined for trees")
    budget = ensure_budget(budget, "goodness check")
    try:
        chrom = chromatic_data(h, budget=budget)
    except Unresolved as exc:
        return GoodnessResult(VERDICT_UNKNOWN, None, reason=str(exc))
    bound = burr_bound(t.n, chrom.chi, chrom.sigma)
    lower = burr_coloring(t.n, chrom.chi, chrom.sigma)
    if coloring_contains(lower, t, h, budget).kind != "neither":
        raise LemmaViolation("Burr coloring contains a red tree or a blue H")
    try:
        at_bound = ramsey_number(t, h, n_max=bound, start=bound, budget=budget)
    except CapExceeded as exc:
        if exc.bracket is not None and exc.bracket[0] > bound:
            # K_bound has an avoiding coloring: not good, R still open above
            try:
                above = ramsey_number(t, h, n_max=n_max, start=bound + 1, budget=budget)
            except CapExceeded as deeper:
                return GoodnessResult(VERDICT_NO, bound, chrom, None, deeper.bracket, lower, str(deeper))
            return GoodnessResult(VERDICT_NO, bound, chrom, above.value, (above.value, above.value),
                                  above.lower_certificate)
        return GoodnessResult(VERDICT_UNKNOWN, bound, chrom, None, (bound, None), lower, str(exc))
    return GoodnessResult(VERDICT_YES, bound, chrom, at_bound.value, (bound, bound), lower)


@dataclass(frozen=True)
class SpotCheck:
    samples: int
    avoiding: tuple[int, ...]

    def to_json(self) -> dict:
        return {"samples": self.samples, "avoiding_samples": list(self.avoiding)}


def spot_check_threshold(t: RootedForest, h: Graph, n: int, samples: int, seed: int,
                         budget: SearchBudget | int | None = None) -> SpotCheck:
    """Uniformly random colorings of K_n; lists the sample indices that avoid both."""
    rng = random.Random(seed)
    budget = ensure_budget(budget, "spot check")
    avoiding = []
    for i in range(samples):
        edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.5]
        if coloring_contains(EdgeColoring(Graph.from_edges(n, edges)), t, h, budget).kind == "neither":
            avoiding.append(i)
    return SpotCheck(samples, tuple(avoiding))
