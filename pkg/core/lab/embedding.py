#!/usr/bin/env python3
"""
Goodness Lab - Tree Embedding

Constructive embeddings of bounded-degree forests, each either returning a
validated Embedding or a certified witness that the host's complement
contains the forbidden multipartite graph:

- fp_embed_forest: rooted forests in an expanding host. Certified mode runs
  the critical-set induction and checks every step by subset enumeration;
  heuristic mode is a complete depth-first search: NoEmbedding when it
  exhausts every candidate, SearchBudgetExceeded when it runs out of nodes.
- embed_avoiding_bipartite / embed_avoiding_multipartite / embed_two_trees:
  prune a non-expanding set, then embed, or descend into the witness
- embed_many_leaves: trees with many leaves (strip leaves, embed, attach
  the leaves back through the Hall extension)
- embed_via_linkage: trees with many bare paths, finished through a
  linked system
- near_extremal_embed: hosts that look like the Burr construction

The constant 13 of the size bounds is the ``coefficient`` argument.
Below 13 the size bounds no longer guarantee an answer, so a failed step
is reported as Unresolved instead of LemmaViolation.

Usage:
    from embedding import fp_embed_forest
    emb = fp_embed_forest(g, [0], RootedForest.path(8), delta=2, m=2, M=8)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable

from lab_utils import (
    CapExceeded,
    HypothesisViolated,
    LemmaViolation,
    NoEmbedding,
    PreconditionViolated,
    ScaleInfeasible,
    SearchBudget,
    SearchBudgetExceeded,
    Unresolved,
    WitnessCascade,
    ensure_budget,
    setup_path,
)

setup_path()
from config_loader import get_fp_limits, get_subset_cap  # noqa: E402
from expander import maximal_nonexpanding_set, subsets_with_union  # noqa: E402
from graph_core import (  # noqa: E402
    Embedding,
    Graph,
    MultipartiteWitness,
    as_set,
    bits,
    check_embedding,
    check_sizes,
    mask_of,
    popcount,
    union_mask,
    universe_mask,
)
from linkage import LinkageRequest, LinkedSpec, LinkedSystem  # noqa: E402
from matching import Deficiency, DemandedBipartite, hall_extension_forest  # noqa: E402
from tree_tools import (  # noqa: E402
    BarePathCollection,
    RootedForest,
    centroid_split,
    forest_union,
    harvest_bare_paths,
    leaves,
    strip_bare_path_interiors,
    strip_leaves,
)
from verify import chromatic_data  # noqa: E402

SOUND_COEFFICIENT = 13
MODES = ("certified", "heuristic", "auto")

# critical sets recorded per induction step
CRITICAL_LOG_CAP = 8


def _broken(sound: bool, message: str) -> Exception:
    """LemmaViolation when the size bounds guarantee success, Unresolved otherwise."""
    if sound:
        return LemmaViolation(message)
    return Unresolved(f"{message} (size bound not guaranteed)")


def _validated(g: Graph, emb: Embedding, universe: Iterable[int] | None = None) -> Embedding:
    problems = check_embedding(g, emb, universe)
    if problems:
        raise LemmaViolation("embedding failed validation: " + "; ".join(problems))
    return emb


def _verified(g: Graph, witness: MultipartiteWitness, sizes: Iterable[int] | None = None) -> MultipartiteWitness:
    problems = witness.problems_in_complement(g, sizes)
    if problems:
        raise LemmaViolation("witness failed re-check: " + "; ".join(problems))
    return witness


def _common_non_neighbours(g: Graph, s: Iterable[int], region: Iterable[int]) -> list[int]:
    smask = mask_of(s)
    return bits(mask_of(region) & ~smask & ~union_mask(g, smask))


# ---------------------------------------------------------------------------
# critical-set induction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FPCheck:
    """Outcome of the hypothesis pre-check; ``kind`` is "small" or "large" on failure."""

    holds: bool
    kind: str | None = None
    witness: frozenset[int] | None = None

    def to_json(self) -> dict:
        return {"holds": self.holds, "kind": self.kind,
                "witness": None if self.witness is None else sorted(self.witness)}


def fp_slack(g: Graph, s: Iterable[int], weights: dict[int, int], delta: int,
             universe: Iterable[int] | None = None) -> int:
    """|Gamma(S) - X| - 4*delta*|S - X| - sum of weights over S & X.

    ``weights`` maps each current root x to d_root(T_x) + delta; X is its
    key set. A set of size <= m is critical when this is 0.
    """
    smask = mask_of(s)
    xmask = mask_of(weights)
    gamma = union_mask(g, smask) & universe_mask(g, universe)
    return (popcount(gamma & ~xmask) - 4 * delta * popcount(smask & ~xmask)
            - sum(weights[x] for x in bits(smask & xmask)))


def _slack(smask: int, union: int, xmask: int, weights: dict[int, int], delta: int) -> int:
    inside = smask & xmask
    return (popcount(union & ~xmask) - 4 * delta * popcount(smask & ~xmask)
            - (sum(weights[x] for x in bits(inside)) if inside else 0))


def _check_fp_input(g: Graph, roots: tuple[int, ...], forest: RootedForest, delta: int,
                    m: int, big_m: int, allowed: int) -> None:
    if m < 1:
        raise PreconditionViolated(f"small-set bound must be >= 1, got {m}")
    if forest.n > big_m:
        raise PreconditionViolated(f"forest has {forest.n} vertices, more than M = {big_m}")
    if forest.delta > delta:
        raise PreconditionViolated(f"forest degree bound {forest.delta} exceeds delta = {delta}")
    if len(roots) != len(forest.roots):
        raise PreconditionViolated(f"{len(roots)} host roots for {len(forest.roots)} trees")
    if len(set(roots)) != len(roots):
        raise PreconditionViolated(f"host roots {list(roots)} are not distinct")
    outside = [x for x in roots if not 0 <= x < g.n or not allowed >> x & 1]
    if outside:
        raise PreconditionViolated(f"host roots {outside} lie outside the universe")


def _root_weights(roots: tuple[int, ...], forest: RootedForest, delta: int) -> dict[int, int]:
    return {x: len(forest.children[r]) + delta for x, r in zip(roots, forest.roots)}


def fp_hypothesis_check(g: Graph, roots: Iterable[int], forest: RootedForest, delta: int, m: int,
                        big_m: int, universe: Iterable[int] | None = None,
                        budget: SearchBudget | int | None = None) -> FPCheck:
    """Enumerate the induction's hypotheses.

    small: slack >= 0 for every S with 1 <= |S| <= m;
    large: |Gamma(S)| >= M + 10*delta*m for every S with |S| = m (Gamma is
    monotone, so this covers m <= |S| <= 2m).
    """
    roots = tuple(roots)
    allowed = universe_mask(g, universe)
    _check_fp_input(g, roots, forest, delta, m, big_m, allowed)
    budget = ensure_budget(budget, "embedding pre-check")
    adj = tuple(row & allowed for row in g.adj)
    pool = bits(allowed)
    weights = _root_weights(roots, forest, delta)
    xmask = mask_of(roots)
    for size in range(1, min(m, len(pool)) + 1):
        for smask, union in subsets_with_union(pool, size, adj):
            budget.tick()
            if _slack(smask, union, xmask, weights, delta) < 0:
                return FPCheck(False, "small", as_set(smask))
    if len(pool) >= m:
        target = big_m + 10 * delta * m
        for smask, union in subsets_with_union(pool, m, adj):
            budget.tick()
            if popcount(union) < target:
                return FPCheck(False, "large", as_set(smask))
    return FPCheck(True)


def e2_problems(g: Graph, image: Iterable[int], delta: int, m: int,
                universe: Iterable[int] | None = None,
                budget: SearchBudget | int | None = None) -> list[str]:
    """Every S with |S| <= m keeps delta*|S| neighbours outside the image."""
    allowed = universe_mask(g, universe)
    budget = ensure_budget(budget, "image expansion check")
    adj = tuple(row & allowed for row in g.adj)
    pool = bits(allowed)
    image_mask = mask_of(image)
    for size in range(1, min(m, len(pool)) + 1):
        for smask, union in subsets_with_union(pool, size, adj):
            budget.tick()
            outside = popcount(union & ~image_mask)
            if outside < delta * size:
                return [f"S = {bits(smask)} has {outside} < {delta * size} neighbours off the image"]
    return []


def _fp_certified(g: Graph, roots: tuple[int, ...], forest: RootedForest, delta: int, m: int,
                  big_m: int, allowed: int, budget: SearchBudget) -> tuple[list[int], list[dict]]:
    adj = tuple(row & allowed for row in g.adj)
    pool = bits(allowed)
    images = [-1] * forest.n
    # host root -> children of its forest vertex not yet detached
    pieces: dict[int, list[int]] = {}
    for x, r in zip(roots, forest.roots):
        images[r] = x
        pieces[x] = list(forest.children[r])
    xmask = mask_of(roots)
    log: list[dict] = []

    while True:
        active = next((x for x, kids in pieces.items() if kids), None)
        if active is None:
            return images, log
        weights = {x: len(kids) + delta for x, kids in pieces.items()}
        critical: list[tuple[int, int]] = []
        for size in range(1, min(m, len(pool)) + 1):
            for smask, union in subsets_with_union(pool, size, adj):
                budget.tick()
                slack = _slack(smask, union, xmask, weights, delta)
                if slack < 0:
                    raise LemmaViolation(f"slack of {bits(smask)} dropped to {slack}")
                if slack == 0:
                    critical.append((smask, union))
        if critical:
            log.append({
                "weights": {str(x): w for x, w in weights.items()},
                "critical": [bits(s) for s, _ in critical[:CRITICAL_LOG_CAP]],
            })

        blocked = 0
        for smask, union in critical:
            if not smask >> active & 1:
                blocked |= union & ~smask
        options = adj[active] & ~xmask & ~blocked
        if not options:
            cover = 0
            for smask, union in critical:
                if not smask >> active & 1 and union & adj[active] & ~xmask:
                    cover |= smask
            witness = cover | 1 << active
            if popcount(witness) >= m and popcount(union_mask(g, witness) & allowed) < big_m + 10 * delta * m:
                raise HypothesisViolated(as_set(witness), "critical sets around the active root violate the large-set bound")
            raise LemmaViolation(f"no admissible image next to {active} although the hypotheses hold")

        v = (options & -options).bit_length() - 1
        child = pieces[active].pop(0)
        images[child] = v
        pieces[v] = list(forest.children[child])
        xmask |= 1 << v


def _fp_heuristic(g: Graph, roots: tuple[int, ...], forest: RootedForest, allowed: int,
                  budget: SearchBudget) -> list[int]:
    adj = tuple(row & allowed for row in g.adj)
    images = [-1] * forest.n
    for x, r in zip(roots, forest.roots):
        images[r] = x
    used = mask_of(roots)
    order = [v for v in forest.bfs_order if forest.parent[v] >= 0]

    def place(i: int) -> bool:
        nonlocal used
        if i == len(order):
            return True
        v = order[i]
        need = len(forest.children[v])
        free = adj[images[forest.parent[v]]] & ~used
        # most free neighbours first
        ranked = sorted(bits(free), key=lambda x: (-popcount(adj[x] & ~used), x))
        for x in ranked:
            if popcount(adj[x] & ~used) < need:
                continue
            budget.tick()
            images[v] = x
            used |= 1 << x
            if place(i + 1):
                return True
            used &= ~(1 << x)
            images[v] = -1
        return False

    if not place(0):
        raise NoEmbedding("exhaustive search found no embedding with the prescribed roots")
    return images


def fp_embed_forest(g: Graph, roots: Iterable[int], forest: RootedForest, delta: int, m: int,
                    big_m: int, mode: str = "auto", universe: Iterable[int] | None = None,
                    budget: SearchBudget | int | None = None,
                    checked: FPCheck | None = None) -> Embedding:
    """Embed the trees of ``forest`` with tree i rooted at host vertex roots[i].

    certified: refuses instances beyond the configured caps, raises
    HypothesisViolated when the pre-check fails, and confirms that every S
    with |S| <= m keeps delta*|S| neighbours off the image. heuristic:
    budgeted search; the image check is reported but not enforced. A
    search that exhausts every candidate raises NoEmbedding. auto:
    certified when the caps allow and the pre-check passes.
    """
    roots = tuple(roots)
    if mode not in MODES:
        raise PreconditionViolated(f"unknown mode {mode!r}; expected one of {MODES}")
    allowed = universe_mask(g, universe)
    _check_fp_input(g, roots, forest, delta, m, big_m, allowed)
    budget = ensure_budget(budget, "forest embedding")
    max_m, max_forest = get_fp_limits()
    within_caps = m <= max_m and forest.n <= max_forest
    meta: dict = {}

    if mode == "certified" and not within_caps:
        raise CapExceeded(f"certified embedding caps m <= {max_m} and forest size <= {max_forest}")
    certified = False
    if mode != "heuristic" and within_caps:
        check = checked if checked is not None else fp_hypothesis_check(
            g, roots, forest, delta, m, big_m, bits(allowed), budget)
        if check.holds:
            certified = True
        elif mode == "certified":
            raise HypothesisViolated(check.witness, f"{check.kind}-set hypothesis fails")
        else:
            meta["reason"] = f"{check.kind}-set hypothesis fails at {sorted(check.witness)}"
    elif mode == "auto":
        meta["reason"] = "beyond certified caps"

    if certified:
        images, log = _fp_certified(g, roots, forest, delta, m, big_m, allowed, budget)
        meta["critical_log"] = log
        problems = e2_problems(g, images, delta, m, bits(allowed), budget)
        if problems:
            raise LemmaViolation("certified embedding lost expansion: " + problems[0])
        meta["e2"] = True
    else:
        images = _fp_heuristic(g, roots, forest, allowed, budget)
        meta["e2"] = None
        if m <= get_subset_cap():
            try:
                meta["e2"] = not e2_problems(g, images, delta, m, bits(allowed), SearchBudget(what="image expansion check"))
            except SearchBudgetExceeded:
                pass
    meta["mode"] = "certified" if certified else "heuristic"
    emb = Embedding(forest, tuple(images), roots, certified, meta)
    return _validated(g, emb, bits(allowed))


# ---------------------------------------------------------------------------
# complements without K_{m1,m2} / K^k_m
# ---------------------------------------------------------------------------

def bipartite_witness(g: Graph, y: Iterable[int], region: Iterable[int], m1: int, m2: int) -> MultipartiteWitness | None:
    """A = m1 vertices of Y, B = m2 common non-neighbours of A in the region."""
    y = sorted(y)
    if len(y) < m1:
        return None
    a = y[:m1]
    rest = _common_non_neighbours(g, a, region)
    if len(rest) < m2:
        return None
    return _verified(g, MultipartiteWitness((frozenset(a), frozenset(rest[:m2]))))


def _link_forest(f: RootedForest, delta: int) -> tuple[RootedForest, int]:
    """Chain the trees of a forest leaf to leaf into one tree (degree bound max(delta, 2))."""
    if f.n == 0 or f.is_tree:
        return f, delta
    edges = f.edges()
    prev = None
    for members in f.trees():
        ends = [v for v in members if f.degree(v) <= 1]
        if prev is not None:
            edges.append((prev, ends[0]))
        prev = ends[-1]
    d_eff = max(delta, 2)
    return RootedForest.from_edges(f.n, edges, roots=[f.roots[0]], delta=d_eff), d_eff


def embed_avoiding_bipartite(g: Graph, f: RootedForest, delta: int, m1: int, m2: int,
                             universe: Iterable[int] | None = None,
                             coefficient: int = SOUND_COEFFICIENT, mode: str = "auto",
                             budget: SearchBudget | int | None = None) -> Embedding | MultipartiteWitness:
    """Embed a forest in a host of at least |f| + coefficient*delta*m1 + m2 vertices,
    or return a K_{m1,m2} of the complement.

    A maximal set X with |N(X)| <= 4*delta*|X| is pruned first; if it grows
    to m1 vertices it is the witness's first part. Otherwise the forest,
    chained into one tree, is embedded in the rest from its lowest vertex.
    """
    region = bits(universe_mask(g, universe))
    if m1 < 1 or m2 < 1:
        raise PreconditionViolated(f"part sizes must be positive, got ({m1}, {m2})")
    if f.delta > delta:
        raise PreconditionViolated(f"forest degree bound {f.delta} exceeds delta = {delta}")
    need = f.n + coefficient * delta * m1 + m2
    if len(region) < need:
        raise PreconditionViolated(f"host region has {len(region)} vertices, need {need}")
    budget = ensure_budget(budget, "bipartite-avoiding embedding")
    if f.n == 0:
        return Embedding(f, (), certified=True, metadata={"mode": "empty"})
    if f.n == 1:
        # a single vertex needs no expansion around it
        return Embedding(f, (region[0],), certified=True, metadata={"mode": "trivial", "removed": []})

    meta: dict = {}
    tree, d_eff = _link_forest(f, delta)
    sound = coefficient >= SOUND_COEFFICIENT and d_eff == delta
    try:
        removed = maximal_nonexpanding_set(g, m1, 4 * d_eff, strict=False, universe=region, budget=budget)
    except HypothesisViolated as exc:
        witness = bipartite_witness(g, exc.witness, region, m1, m2)
        if witness is None:
            raise _broken(sound, f"non-expanding set {sorted(exc.witness)} leaves no K_({m1},{m2})") from exc
        return witness
    except CapExceeded as exc:
        removed = frozenset()
        meta["prune"] = f"skipped: {exc}"
    rest = [v for v in region if v not in removed]
    root = rest[0]

    checked = None
    max_m, max_forest = get_fp_limits()
    if mode != "heuristic" and m1 <= max_m and tree.n <= max_forest:
        checked = fp_hypothesis_check(g, (root,), tree, d_eff, m1, tree.n, rest, budget)
        if not checked.holds:
            witness = bipartite_witness(g, checked.witness, region, m1, m2)
            if witness is not None:
                return witness
    try:
        inner = fp_embed_forest(g, (root,), tree, d_eff, m1, tree.n, mode, rest, budget, checked)
    except NoEmbedding as exc:
        # region not certified: the argument stops, nothing is refuted
        raise Unresolved(f"bipartite step: {exc}") from exc
    meta.update(inner.metadata)
    meta["removed"] = sorted(removed)
    return _validated(g, Embedding(f, inner.images, None, inner.certified, meta), region)


def embed_avoiding_multipartite(g: Graph, t: RootedForest, delta: int, k: int, m: int,
                                universe: Iterable[int] | None = None,
                                coefficient: int = SOUND_COEFFICIENT, mode: str = "auto",
                                budget: SearchBudget | int | None = None) -> Embedding:
    """Embed t, descending into B whenever the bipartite step returns a K_{m,m'} (A, B).

    The descent trace is returned in ``metadata["trace"]``. Raises
    WitnessCascade with a K^k_m of the complement when the descent reaches
    k = 1; for k = 1 that is any m vertices.
    """
    if k < 1 or m < 1:
        raise PreconditionViolated(f"need k, m >= 1, got k={k}, m={m}")
    region = bits(universe_mask(g, universe))
    block = t.n + coefficient * delta * m
    need = (k - 1) * block + m
    if len(region) < need:
        raise PreconditionViolated(f"host region has {len(region)} vertices, need {need}")
    budget = ensure_budget(budget, "multipartite-avoiding embedding")
    trace: list[dict] = []
    parts: list[frozenset[int]] = []
    for level in range(k, 1, -1):
        m_prime = (level - 2) * block + m
        out = embed_avoiding_bipartite(g, t, delta, m, m_prime, region, coefficient, mode, budget)
        if isinstance(out, Embedding):
            trace.append({"k": level, "outcome": "embedded", "region": len(region), "mode": out.metadata.get("mode")})
            return replace(out, metadata={**out.metadata, "trace": trace})
        a, b = out.parts
        trace.append({"k": level, "outcome": "witness", "A": sorted(a), "B": len(b)})
        parts.append(a)
        region = sorted(b)
    parts.append(frozenset(region[:m]))
    trace.append({"k": 1, "outcome": "witness", "A": sorted(parts[-1])})
    witness = _verified(g, MultipartiteWitness(tuple(parts)), [m] * k)
    raise WitnessCascade(witness, trace)


def embed_two_trees(g: Graph, t_a: RootedForest, t_b: RootedForest, delta: int, k: int, m: int,
                    universe: Iterable[int] | None = None,
                    coefficient: int = SOUND_COEFFICIENT, mode: str = "auto",
                    budget: SearchBudget | int | None = None) -> Embedding:
    """t_a first, then t_b in what is left; the result embeds forest_union([t_a, t_b])."""
    if k < 3:
        raise PreconditionViolated(f"two-tree embedding needs k >= 3, got {k}")
    if t_a.n > t_b.n:
        raise PreconditionViolated(f"|t_a| = {t_a.n} exceeds |t_b| = {t_b.n}")
    region = bits(universe_mask(g, universe))
    need = t_a.n + (k - 1) * (t_b.n + coefficient * delta * m) + m
    if len(region) < need:
        raise PreconditionViolated(f"host region has {len(region)} vertices, need {need}")
    budget = ensure_budget(budget, "two-tree embedding")
    images: tuple[int, ...] = ()
    trace: list[dict] = []
    rest = region
    for stage, tree in (("a", t_a), ("b", t_b)):
        if tree.n == 0:
            continue
        try:
            emb = embed_avoiding_multipartite(g, tree, delta, k, m, rest, coefficient, mode, budget)
        except WitnessCascade as exc:
            raise WitnessCascade(exc.witness, trace + [{"stage": stage, "trace": exc.trace}]) from exc
        trace.append({"stage": stage, "trace": emb.metadata["trace"]})
        images += emb.images
        used = emb.image_set
        rest = [v for v in rest if v not in used]
    union, _ = forest_union([t_a, t_b])
    return _validated(g, Embedding(union, images, metadata={"trace": trace}), region)


# ---------------------------------------------------------------------------
# many leaves
# ---------------------------------------------------------------------------

@dataclass
class _LeafContext:
    g: Graph
    t: RootedForest
    delta: int
    coefficient: int
    mode: str
    budget: SearchBudget
    trace: list = field(default_factory=list)


def _small_neighbourhood_set(ctx: _LeafContext, region: list[int], size: int) -> frozenset[int] | None:
    """First S of the given size with |N(S)| <= n - |S| - 1 inside the region."""
    if size > get_subset_cap() or size > len(region):
        ctx.trace.append({"branch": "a", "outcome": "skipped", "size": size})
        return None
    allowed = mask_of(region)
    adj = tuple(row & allowed for row in ctx.g.adj)
    limit = ctx.t.n - size - 1
    for smask, union in subsets_with_union(region, size, adj):
        ctx.budget.tick()
        if popcount(union & ~smask) <= limit:
            return as_set(smask)
    return None


def _many_leaves(ctx: _LeafContext, sizes: tuple[int, ...], region: list[int]) -> Embedding | list[frozenset[int]]:
    g, t = ctx.g, ctx.t
    k = len(sizes)
    if k == 1:
        ctx.trace.append({"k": 1, "branch": "base", "region": len(region)})
        return [frozenset(region[:sizes[0]])]
    if t.n == 1:
        return Embedding(t, (region[0],), certified=True)

    s = _small_neighbourhood_set(ctx, region, sizes[-1])
    if s is not None:
        rest = _common_non_neighbours(g, s, region)
        ctx.trace.append({"k": k, "branch": "a", "S": sorted(s), "rest": len(rest)})
        out = _many_leaves(ctx, sizes[:-1], rest)
        if isinstance(out, Embedding):
            return out
        return out + [frozenset(sorted(s)[:sizes[-1]])]

    stripped = strip_leaves(t)
    m_prime = (k - 2) * (t.n - 1) + sizes[0]
    core = embed_avoiding_bipartite(g, stripped.forest, ctx.delta, sizes[-1], m_prime, region,
                                    ctx.coefficient, ctx.mode, ctx.budget)
    if isinstance(core, MultipartiteWitness):
        a, b = core.parts
        ctx.trace.append({"k": k, "branch": "b", "outcome": "witness", "A": sorted(a)})
        out = _many_leaves(ctx, sizes[:-1], sorted(b))
        if isinstance(out, Embedding):
            return out
        return out + [a]

    used = core.image_set
    free = [v for v in region if v not in used]
    free_mask = mask_of(free)
    hosts = {p: core.images[p] for p in stripped.groups}
    edges = [(x, y) for x in hosts.values() for y in bits(g.adj[x] & free_mask)]
    db = DemandedBipartite.build(hosts.values(), free, edges,
                                 {hosts[p]: len(group) for p, group in stripped.groups.items()})
    attached = hall_extension_forest(db)
    if isinstance(attached, Deficiency):
        s = attached.s
        rest = _common_non_neighbours(g, s, region)
        if len(s) >= sizes[-1] and len(rest) >= (k - 2) * (t.n - 1) + sizes[0]:
            ctx.trace.append({"k": k, "branch": "b", "outcome": "deficiency", "S": sorted(s)})
            out = _many_leaves(ctx, sizes[:-1], rest)
            if isinstance(out, Embedding):
                return out
            return out + [frozenset(sorted(s)[:sizes[-1]])]
        message = f"leaf attachment blocked by {sorted(s)} (demand {attached.demand}, {len(attached.neighbourhood)} free neighbours)"
        if core.certified:
            raise _broken(ctx.coefficient >= SOUND_COEFFICIENT, message)
        raise Unresolved(message)

    images = [-1] * t.n
    for new, old in enumerate(stripped.original_ids):
        images[old] = core.images[new]
    for p, group in stripped.groups.items():
        for leaf, host in zip(group, attached.assignment[hosts[p]]):
            images[leaf] = host
    ctx.trace.append({"k": k, "branch": "b", "outcome": "embedded", "mode": core.metadata.get("mode")})
    return _validated(g, Embedding(t, tuple(images), certified=core.certified), region)


def embed_many_leaves(g: Graph, t: RootedForest, delta: int, sizes: Iterable[int],
                      universe: Iterable[int] | None = None,
                      coefficient: int = SOUND_COEFFICIENT, mode: str = "auto",
                      budget: SearchBudget | int | None = None) -> Embedding | MultipartiteWitness:
    """Embed a tree with at least coefficient*delta*m_k + 1 leaves in a host of
    (k-1)(n-1) + m_1 vertices, or find K_{m_1..m_k} in its complement.

    Branch (a) looks for S with |S| = m_k and |N(S)| <= n - |S| - 1 and
    recurses into its common non-neighbourhood; branch (b) strips the
    leaves, embeds the rest and attaches the leaves through the Hall
    extension.
    """
    sizes = check_sizes(sizes)
    if not t.is_tree:
        raise PreconditionViolated("embed_many_leaves needs a tree")
    if t.delta > delta:
        raise PreconditionViolated(f"tree degree bound {t.delta} exceeds delta = {delta}")
    count = len(leaves(t))
    if count < coefficient * delta * sizes[-1] + 1:
        raise PreconditionViolated(f"tree has {count} leaves, need {coefficient * delta * sizes[-1] + 1}")
    region = bits(universe_mask(g, universe))
    need = (len(sizes) - 1) * (t.n - 1) + sizes[0]
    if len(region) < need:
        raise PreconditionViolated(f"host region has {len(region)} vertices, need {need}")
    ctx = _LeafContext(g, t, delta, coefficient, mode, ensure_budget(budget, "many-leaves embedding"))
    out = _many_leaves(ctx, sizes, region)
    if isinstance(out, Embedding):
        return replace(out, metadata={**out.metadata, "trace": ctx.trace})
    return _verified(g, MultipartiteWitness(tuple(out)), sizes)


@dataclass(frozen=True)
class ManyLeavesReport:
    """Whether the leaf count alone settles goodness of t against H."""

    leaves: int
    chi: int
    sigma: int
    classes: tuple[int, ...]
    by_size: bool
    by_class: bool

    def to_json(self) -> dict:
        return {"leaves": self.leaves, "chi": self.chi, "sigma": self.sigma,
                "classes": list(self.classes), "by_size": self.by_size, "by_class": self.by_class}


def many_leaves_goodness(t: RootedForest, h: Graph, delta: int | None = None,
                         coefficient: int = SOUND_COEFFICIENT) -> ManyLeavesReport:
    """Leaf condition l >= c*delta*|H| + 1, and the weaker l >= c*delta*m_k + 1
    with m_k the largest class of a sigma-attaining colouring."""
    delta = t.delta if delta is None else delta
    chrom = chromatic_data(h)
    classes = tuple(sorted(chrom.coloring.count(c) for c in range(chrom.chi)))
    count = len(leaves(t))
    return ManyLeavesReport(
        count, chrom.chi, chrom.sigma, classes,
        by_size=count >= coefficient * delta * h.n + 1,
        by_class=count >= coefficient * delta * classes[-1] + 1,
    )


# ---------------------------------------------------------------------------
# bare paths through a linked system
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LinkageParams:
    """Bare-path length r, connection length y, and the multipartite bound (k, m).

    ``paths`` overrides the number of bare paths routed (default ceil(n/4r));
    ``u`` is carried for the record only.
    """

    r: int
    y: int
    k: int
    m: int
    delta: int
    u: int | None = None
    coefficient: int = SOUND_COEFFICIENT
    mode: str = "auto"
    paths: int | None = None

    def to_json(self) -> dict:
        return {"r": self.r, "y": self.y, "k": self.k, "m": self.m, "delta": self.delta, "u": self.u,
                "coefficient": self.coefficient, "mode": self.mode, "paths": self.paths}


def matchable_core(g: Graph, z: Iterable[int], x: Iterable[int], m: int,
                    budget: SearchBudget | int | None = None) -> frozenset[int]:
    """Z' = Z minus a maximal A with |N(A) & X| < |A|, so every S in Z' with
    |S| <= m has |N(S) & X| >= |S|. HypothesisViolated if A reaches m vertices."""
    z, x = frozenset(z), frozenset(x)
    removed = maximal_nonexpanding_set(g, m, 1, strict=True, within=x, candidates=z,
                                       universe=z | x, budget=budget)
    return z - removed


def embed_via_linkage(g: Graph, z: Iterable[int], x: Iterable[int], w: Iterable[int], t: RootedForest,
                      params: LinkageParams, system: LinkedSystem | None = None,
                      budget: SearchBudget | int | None = None) -> Embedding:
    """Embed a tree with many bare paths of length r into Z | X | W.

    Each chosen bare path e1 ... e2 is laid out as
    e1, x', (y-1 in W), y', a-path of r-2y-4 edges, x'', (y-1 in W), y'', e2:
    the a-paths and the stripped tree go into Z' (two-tree embedding), the
    primed vertices come from a matching into X, and the y-paths are routed
    by the linked system (X, W).
    """
    z, x, w = frozenset(z), frozenset(x), frozenset(w)
    if z & x or z & w or x & w:
        raise PreconditionViolated("Z, X and W must be disjoint")
    if not t.is_tree:
        raise PreconditionViolated("embed_via_linkage needs a tree")
    p = params
    budget = ensure_budget(budget, "linkage embedding")
    coll = harvest_bare_paths(t, p.r)
    count = math.ceil(t.n / (4 * p.r)) if p.paths is None else p.paths
    if p.paths is None and not coll.paths:
        raise PreconditionViolated(f"tree has no bare paths of length {p.r}")
    if count > len(coll.paths):
        raise PreconditionViolated(f"tree has {len(coll.paths)} bare paths of length {p.r}, need {count}")
    region = sorted(z | x | w)
    meta: dict = {"params": p.to_json(), "paths": count}

    z_prime = sorted(matchable_core(g, z, x, min(max(1, t.n // p.r), get_subset_cap()), budget))
    meta["z_pruned"] = len(z) - len(z_prime)
    if count == 0:
        emb = embed_two_trees(g, RootedForest(()), t, p.delta, p.k, p.m, z_prime, p.coefficient, p.mode, budget)
        return _validated(g, Embedding(t, emb.images, metadata={**meta, **emb.metadata}), region)

    inner = p.r - 2 * p.y - 4
    if p.y < 1 or inner < 0:
        raise ScaleInfeasible(f"r = {p.r} leaves no room for two connections of length y = {p.y} + 2")
    chosen = BarePathCollection(p.r, coll.paths[:count])
    stripped = strip_bare_path_interiors(t, chosen)
    t_a, _ = forest_union([RootedForest.path(inner + 1)] * count)
    both = embed_two_trees(g, t_a, stripped.forest, p.delta, p.k, p.m, z_prime, p.coefficient, p.mode, budget)
    meta["trace"] = both.metadata["trace"]

    def host_b(new: int) -> int:
        return both.images[t_a.n + new]

    # endpoints in routing order: e1, a_start, a_end, e2 per path
    ends: list[tuple[int, int, int, int]] = []
    for j, (e1, e2) in enumerate(stripped.pairs):
        start = j * (inner + 1)
        ends.append((host_b(e1), both.images[start], both.images[start + inner], host_b(e2)))
    demands: dict[int, int] = {}
    for quad in ends:
        for host in quad:
            demands[host] = demands.get(host, 0) + 1
    x_mask = mask_of(x)
    edges = [(a, b) for a in demands for b in bits(g.adj[a] & x_mask)]
    matched = hall_extension_forest(DemandedBipartite.build(demands, x, edges, demands))
    if isinstance(matched, Deficiency):
        raise HypothesisViolated(matched.s, "endpoint images lack private neighbours in X")
    share = {a: list(bs) for a, bs in matched.assignment.items()}

    pairs = []
    for e1, a_start, a_end, e2 in ends:
        pairs.append((share[e1].pop(0), share[a_start].pop(0)))
        pairs.append((share[a_end].pop(0), share[e2].pop(0)))
    req = LinkageRequest.build(pairs, [p.y] * len(pairs))
    system = system or LinkedSystem(x, w, LinkedSpec(len(pairs), p.y, p.y))
    routing = system.route(g, req, budget)
    if routing is None:
        raise Unresolved(f"linked system could not route {len(pairs)} connections of length {p.y}")

    images = [-1] * t.n
    for new, old in enumerate(stripped.original_ids):
        images[old] = host_b(new)
    for j, path in enumerate(chosen.paths):
        first, second = routing.paths[2 * j], routing.paths[2 * j + 1]
        for i, host in enumerate(first):
            images[path[1 + i]] = host
        start = j * (inner + 1)
        for i in range(inner + 1):
            images[path[p.y + 2 + i]] = both.images[start + i]
        for i, host in enumerate(second):
            images[path[p.r - p.y - 1 + i]] = host
    return _validated(g, Embedding(t, tuple(images), metadata=meta), region)


# ---------------------------------------------------------------------------
# near-extremal hosts
# ---------------------------------------------------------------------------

def extend_witness(g: Graph, chosen: list[frozenset[int]], regions: list[Iterable[int]],
                    sizes: tuple[int, ...]) -> MultipartiteWitness | None:
    """Grow ``chosen`` by one part per region (lowest vertices missing every chosen
    neighbourhood), then trim the parts to ``sizes``."""
    parts = list(chosen)
    taken = mask_of(v for part in parts for v in part)
    m = sizes[-1]
    for region in regions:
        avoid = taken | union_mask(g, taken)
        pick = bits(mask_of(region) & ~avoid)[:m]
        if len(pick) < m:
            return None
        parts.append(frozenset(pick))
        taken |= mask_of(pick)
    if len(parts) != len(sizes) or any(len(part) < size for part, size in zip(parts, sizes)):
        return None
    trimmed = tuple(frozenset(sorted(part)[:size]) for part, size in zip(parts, sizes))
    return _verified(g, MultipartiteWitness(trimmed), sizes)


def _side_forest(t: RootedForest, side: frozenset[int], side_roots: tuple[int, ...]) -> tuple[RootedForest, list[int]]:
    members = sorted(side)
    index = {v: i for i, v in enumerate(members)}
    edges = [(index[a], index[b]) for a, b in t.edges() if a in index and b in index]
    forest = RootedForest.from_edges(len(members), edges, roots=[index[r] for r in side_roots], delta=t.delta)
    return forest, members


def _default_part_embedder(g: Graph, t: RootedForest, region: list[int], delta: int, m: int,
                           budget: SearchBudget) -> Embedding:
    try:
        return fp_embed_forest(g, (region[0],), t, delta, m, t.n, "heuristic", region, budget)
    except NoEmbedding as exc:
        raise Unresolved(f"part embedding: {exc}") from exc


def near_extremal_embed(g: Graph, parts: list[Iterable[int]], t: RootedForest, sizes: Iterable[int],
                        delta: int, d: int, universe: Iterable[int] | None = None, mode: str = "auto",
                        part_embedder: Callable[..., Embedding] | None = None,
                        budget: SearchBudget | int | None = None) -> Embedding | MultipartiteWitness:
    """Embed t in a host with k-1 pairwise non-adjacent parts H_i, or find
    K_{m_1..m_k} in its complement.

    Each H_i is pruned to H'_i (5*delta expansion for sets up to m = m_k).
    A vertex v outside with delta neighbours in two parts carries the
    centroid of t, the two sides rooted at neighbours of v. Otherwise every
    outside vertex joins its dominant part, each part is pruned for
    d-expansion, and either one part keeps n vertices (``part_embedder``,
    default the rooted search, embeds t there) or the pruned vertices and
    the untouched parts form the witness.
    """
    sizes = check_sizes(sizes)
    k = len(sizes)
    m = sizes[-1]
    parts = [frozenset(p) for p in parts]
    if k < 2:
        raise PreconditionViolated("near-extremal hosts need at least one part (k >= 2)")
    if len(parts) != k - 1:
        raise PreconditionViolated(f"{len(parts)} parts for k = {k}")
    for i in range(len(parts)):
        for j in range(i + 1, len(parts)):
            if parts[i] & parts[j]:
                raise PreconditionViolated(f"parts {i} and {j} overlap")
            if union_mask(g, mask_of(parts[i])) & mask_of(parts[j]):
                raise PreconditionViolated(f"parts {i} and {j} are joined by an edge")
    if not t.is_tree:
        raise PreconditionViolated("near_extremal_embed needs a tree")
    region = bits(universe_mask(g, universe))
    if not frozenset().union(*parts) <= frozenset(region):
        raise PreconditionViolated("parts must lie inside the universe")
    budget = ensure_budget(budget, "near-extremal embedding")
    embedder = part_embedder or _default_part_embedder
    trace: list[dict] = []

    pruned: list[frozenset[int]] = []
    for i, h in enumerate(parts):
        try:
            removed = maximal_nonexpanding_set(g, m, 5 * delta, strict=True, universe=h, budget=budget)
        except HypothesisViolated as exc:
            pair = bipartite_witness(g, exc.witness, h, m, m)
            others = [q for j, q in enumerate(parts) if j != i]
            witness = None if pair is None else extend_witness(g, list(pair.parts), others, sizes)
            if witness is None:
                raise Unresolved(f"part {i} does not expand and no witness was assembled") from exc
            return witness
        pruned.append(h - removed)
        trace.append({"stage": "prune", "part": i, "removed": sorted(removed)})
    outside = [v for v in region if not any(v in h for h in pruned)]

    for v in outside:
        counts = [popcount(g.adj[v] & mask_of(h)) for h in pruned]
        rich = [i for i, c in enumerate(counts) if c >= delta]
        if len(rich) < 2:
            continue
        a, b = rich[0], rich[1]
        trace.append({"stage": "split", "v": v, "parts": [a, b]})
        if t.n == 1:
            return _validated(g, Embedding(t, (v,), metadata={"trace": trace}), region)
        split = centroid_split(t)
        images = [-1] * t.n
        images[split.centroid] = v
        for side, side_roots, i in ((split.a, split.a_roots, a), (split.b, split.b_roots, b)):
            if not side:
                continue
            forest, members = _side_forest(t, side, side_roots)
            pool = bits(g.adj[v] & mask_of(pruned[i]))
            hosts = tuple(pool[:len(forest.roots)])
            try:
                emb = fp_embed_forest(g, hosts, forest, delta, m, forest.n, mode, sorted(pruned[i]), budget)
            except NoEmbedding as exc:
                raise Unresolved(f"side {i} of the split vertex: {exc}") from exc
            trace.append({"stage": "side", "part": i, "mode": emb.metadata.get("mode")})
            for new, old in enumerate(members):
                images[old] = emb.images[new]
        return _validated(g, Embedding(t, tuple(images), metadata={"trace": trace}), region)

    groups = [set(h) for h in pruned]
    for v in outside:
        counts = [popcount(g.adj[v] & mask_of(h)) for h in pruned]
        groups[max(range(len(counts)), key=lambda i: (counts[i], -i))].add(v)
    shrunk: list[list[int]] = []
    cut: list[frozenset[int]] = []
    for i, group in enumerate(groups):
        try:
            removed = maximal_nonexpanding_set(g, m, d, strict=True, universe=group, budget=budget)
        except HypothesisViolated as exc:
            pair = bipartite_witness(g, exc.witness, group, m, m)
            others = [q for j, q in enumerate(pruned) if j != i]
            witness = None if pair is None else extend_witness(g, list(pair.parts), others, sizes)
            if witness is None:
                raise Unresolved(f"group {i} does not expand and no witness was assembled") from exc
            return witness
        cut.append(removed)
        shrunk.append(sorted(group - removed))
        trace.append({"stage": "group", "part": i, "size": len(group), "removed": sorted(removed)})

    for i, rest in enumerate(shrunk):
        if len(rest) >= t.n:
            emb = embedder(g, t, rest, delta, m, budget)
            trace.append({"stage": "embed", "part": i})
            return _validated(g, replace(emb, metadata={**emb.metadata, "trace": trace}), region)

    removed_all = sorted(frozenset().union(*cut))
    if len(removed_all) < sizes[0]:
        raise Unresolved(f"every part is below {t.n} vertices yet only {len(removed_all)} were pruned")
    first = frozenset(removed_all[:sizes[0]])
    avoid = mask_of(removed_all) | union_mask(g, mask_of(removed_all))
    rest_parts = []
    for i, h in enumerate(pruned):
        pick = bits(mask_of(h) & ~avoid)[:sizes[i + 1]]
        if len(pick) < sizes[i + 1]:
            raise Unresolved(f"part {i} has too few vertices away from the pruned sets")
        rest_parts.append(frozenset(pick))
    return _verified(g, MultipartiteWitness((first, *rest_parts)), sizes)
