#!/usr/bin/env python3
"""
Goodness Lab - Goodness Pipeline

Demonstration run of the whole goodness argument on one host: given G and
a tree T, produce a copy of T in G, a K_{m_1..m_k} in the complement of G,
or an honest report of where the argument stopped.

Every threshold comes from PipelineConstants, never from the asymptotic
formulas (PipelineConstants.asymptotic(n) records those for comparison). Each
stage appends a record {stage, outcome, witness?, detail?, nodes, timing}
to the trace.

Dispatch:
    many leaves            -> embed_many_leaves
    k = 2, bare paths      -> prune, then expander_path_embed (expander split,
                              core embedding, path cover)
    k >= 3, bare paths     -> extract K^{k-1}_q, expanding parts, short-path
                              families; joined linkage or near-extremal host

Usage:
    from pipeline import goodness_pipeline, PipelineConstants
    outcome = goodness_pipeline(Graph.complete(25), RootedForest.path(20), 2, (2, 2))
"""

from __future__ import annotations

import math
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import networkx as nx

from lab_utils import (
    CapExceeded,
    HypothesisViolated,
    LabError,
    LemmaViolation,
    PipelineStageError,
    PreconditionViolated,
    RetriesExhausted,
    ScaleInfeasible,
    SearchBudget,
    Unresolved,
    WitnessCascade,
    ensure_budget,
    setup_path,
)

setup_path()
from config_loader import get_pipeline_defaults, timing_enabled  # noqa: E402
from embedding import (  # noqa: E402
    LinkageParams,
    bipartite_witness,
    embed_avoiding_bipartite,
    embed_avoiding_multipartite,
    embed_many_leaves,
    embed_via_linkage,
    extend_witness,
    near_extremal_embed,
)
from expander import maximal_nonexpanding_set, partition_expansion  # noqa: E402
from graph_core import (  # noqa: E402
    Embedding,
    Graph,
    MultipartiteWitness,
    bits,
    check_embedding,
    check_sizes,
    mask_of,
    union_mask,
    universe_mask,
)
from linkage import LinkedSpec, LinkedSystem, collect_short_path_families, cover_with_paths, join_many  # noqa: E402
from tree_tools import BarePathCollection, RootedForest, harvest_bare_paths, leaves, strip_bare_path_interiors  # noqa: E402


# ---------------------------------------------------------------------------
# constants and traces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PipelineConstants:
    """Thresholds of the argument.

    d: expansion factor for the k = 2 pruning and split
    r: bare-path length; y: connection length (k >= 3)
    u: clique-part size carried for the record
    coefficient: the 13 of the size bounds
    q, w: part and reservoir sizes of the extracted K^{k-1}_q
    family_cap: paths per short-path family; an F edge needs a full family
    split_fraction: share of the tree size reserved for path interiors
    """

    d: float = 2
    r: int = 3
    y: int = 1
    u: int = 2
    coefficient: int = 0
    q: int = 5
    w: int = 4
    family_cap: int = 3
    split_fraction: float = 0.125

    @classmethod
    def from_config(cls, **overrides) -> "PipelineConstants":
        values = dict(get_pipeline_defaults())
        values.update({k: v for k, v in overrides.items() if v is not None})
        known = {f for f in cls.__dataclass_fields__}
        unknown = sorted(set(values) - known)
        if unknown:
            raise PreconditionViolated(f"unknown pipeline constants: {unknown}")
        return cls(**values)

    @classmethod
    def asymptotic(cls, n: int, k: int = 2) -> "PipelineConstants":
        """The asymptotic values at tree size n; vacuous at any size the lab can run."""
        if n < 3:
            raise PreconditionViolated(f"asymptotic constants need n >= 3, got {n}")
        log_n = math.log(n)
        r = math.ceil(1e3 * log_n ** 2)
        y = math.ceil(log_n)
        return cls(
            d=4e12 * log_n ** 4 / math.log(log_n),
            r=r,
            y=y,
            u=math.ceil(2 * n / r),
            coefficient=13,
            q=math.ceil(23 * y * n / r),
            w=math.ceil(21 * y * n / r),
            family_cap=math.ceil(8 * k * n / r),
            split_fraction=0.125,
        )

    def to_json(self) -> dict:
        return {f: getattr(self, f) for f in self.__dataclass_fields__}


class StageTrace:
    """Ordered stage records sharing one search budget."""

    def __init__(self, budget: SearchBudget):
        self.budget = budget
        self.records: list[dict] = []
        self.timing = timing_enabled()

    @contextmanager
    def stage(self, name: str) -> Iterator[dict]:
        record: dict = {"stage": name, "outcome": "ok"}
        nodes = self.budget.spent
        started = time.perf_counter()
        try:
            yield record
        except LabError as exc:
            if record["outcome"] == "ok":
                record["outcome"] = type(exc).__name__
            record.setdefault("detail", str(exc))
            raise
        finally:
            record["nodes"] = self.budget.spent - nodes
            record["timing"] = round(time.perf_counter() - started, 6) if self.timing else None
            self.records.append(record)

    def note(self, name: str, outcome: str, **extra) -> None:
        self.records.append({"stage": name, "outcome": outcome, **extra, "nodes": 0,
                             "timing": 0.0 if self.timing else None})


@dataclass
class PipelineOutcome:
    """kind: "embedding", "witness", "unresolved" or "infeasible"."""

    kind: str
    embedding: Embedding | None = None
    witness: MultipartiteWitness | None = None
    trace: list[dict] = field(default_factory=list)
    reason: str = ""
    constants: PipelineConstants | None = None

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "embedding": None if self.embedding is None else self.embedding.to_json(),
            "witness": None if self.witness is None else self.witness.to_json(),
            "trace": self.trace,
            "reason": self.reason,
            "constants": None if self.constants is None else self.constants.to_json(),
        }


def _fit(g: Graph, witness: MultipartiteWitness, sizes: tuple[int, ...]) -> MultipartiteWitness:
    """Trim a witness with parts at least ``sizes`` down to exactly ``sizes``."""
    parts = sorted(witness.parts, key=len)
    if len(parts) != len(sizes) or any(len(p) < s for p, s in zip(parts, sizes)):
        raise LemmaViolation(f"witness with parts {[len(p) for p in parts]} cannot cover sizes {list(sizes)}")
    fitted = MultipartiteWitness(tuple(frozenset(sorted(p)[:s]) for p, s in zip(parts, sizes)))
    problems = fitted.problems_in_complement(g, sizes)
    if problems:
        raise LemmaViolation("trimmed witness failed re-check: " + "; ".join(problems))
    return fitted


def _many_leaves_applies(t: RootedForest, delta: int, m: int, c: PipelineConstants) -> bool:
    need = max(math.ceil(t.n / (4 * c.r)), c.coefficient * delta * m + 1)
    return len(leaves(t)) >= need


def _chosen_paths(t: RootedForest, c: PipelineConstants) -> BarePathCollection:
    coll = harvest_bare_paths(t, c.r)
    count = math.ceil(t.n / (4 * c.r))
    if len(coll.paths) < count:
        raise ScaleInfeasible(
            f"tree has {len(leaves(t))} leaves and {len(coll.paths)} bare paths of length {c.r}; need {count} of either")
    return BarePathCollection(c.r, coll.paths[:count])


# ---------------------------------------------------------------------------
# k = 2
# ---------------------------------------------------------------------------

def expander_path_embed(g: Graph, t: RootedForest, delta: int, m: int, constants: PipelineConstants,
                 universe: Iterable[int] | None = None, mode: str = "auto", seed: int = 0,
                 trace: StageTrace | None = None,
                 budget: SearchBudget | int | None = None) -> Embedding | MultipartiteWitness:
    """Bare-path trees in a host where small sets d-expand and no K^2_m hides in the complement.

    Large hosts go straight to the bipartite step. Otherwise the host is
    split into G_1 (for the tree without bare-path interiors) and G_2 (kept
    for the interiors), and the paths are finished by a cover of
    W = G_2 plus unused G_1 vertices with paths of length r.
    """
    c = constants
    budget = ensure_budget(budget, "bare-path embedding")
    trace = trace or StageTrace(budget)
    region = bits(universe_mask(g, universe))
    n = t.n
    if len(region) < n:
        raise PreconditionViolated(f"host region has {len(region)} vertices, tree has {n}")

    if len(region) >= n + c.coefficient * delta * m + m:
        with trace.stage("core-embed") as rec:
            out = embed_avoiding_bipartite(g, t, delta, m, m, region, c.coefficient, mode, budget)
            rec["outcome"] = "embedded" if isinstance(out, Embedding) else "witness"
            rec["detail"] = "host large enough for the whole tree"
        return out

    chosen = _chosen_paths(t, c)
    stripped = strip_bare_path_interiors(t, chosen)
    interiors = len(chosen.paths) * (c.r - 1)
    n2 = max(1, min(math.ceil(c.split_fraction * n), interiors))
    n1 = len(region) - n2

    with trace.stage("split") as rec:
        try:
            g1, g2 = partition_expansion(g, region, c.d, (n1, n2), region, seed, budget=budget)
            rec["outcome"] = "expanding"
        except (PreconditionViolated, RetriesExhausted, CapExceeded) as exc:
            g1, g2 = frozenset(region[:n1]), frozenset(region[n1:])
            rec["outcome"] = "plain"
            rec["detail"] = str(exc)
        rec["sizes"] = [n1, n2]

    with trace.stage("core-embed") as rec:
        core = embed_avoiding_bipartite(g, stripped.forest, delta, m, m, sorted(g1), c.coefficient, mode, budget)
        if isinstance(core, MultipartiteWitness):
            rec["outcome"] = "witness"
            rec["witness"] = core.to_json()
            return core
        rec["outcome"] = "embedded"
        rec["mode"] = core.metadata.get("mode")

    pairs = [(core.images[a], core.images[b]) for a, b in stripped.pairs]
    used = core.image_set
    spare = [v for v in sorted(g1) if v not in used]
    w = sorted(g2) + spare[:interiors - len(g2)]
    with trace.stage("path-cover") as rec:
        routing = cover_with_paths(g, pairs, c.r, w, budget)
        if routing is None:
            raise Unresolved(f"no cover of {len(w)} reservoir vertices by {len(pairs)} paths of length {c.r}")
        rec["outcome"] = "covered"

    images = [-1] * n
    for new, old in enumerate(stripped.original_ids):
        images[old] = core.images[new]
    for path, routed in zip(chosen.paths, routing.paths):
        for old, host in zip(path[1:-1], routed[1:-1]):
            images[old] = host
    emb = Embedding(t, tuple(images), metadata={"split": [n1, n2]})
    problems = check_embedding(g, emb, region)
    if problems:
        raise LemmaViolation("bare-path embedding failed validation: " + "; ".join(problems))
    return emb


def k2_embed(g: Graph, t: RootedForest, delta: int, sizes: Iterable[int], constants: PipelineConstants,
             universe: Iterable[int] | None = None, mode: str = "auto", seed: int = 0,
             trace: StageTrace | None = None,
             budget: SearchBudget | int | None = None) -> Embedding | MultipartiteWitness:
    """The two-part case: many leaves, or prune for d-expansion then expander_path_embed."""
    sizes = check_sizes(sizes)
    if len(sizes) != 2:
        raise PreconditionViolated(f"k2_embed needs two part sizes, got {list(sizes)}")
    m1, m2 = sizes
    c = constants
    budget = ensure_budget(budget, "two-part pipeline")
    trace = trace or StageTrace(budget)
    region = bits(universe_mask(g, universe))

    if _many_leaves_applies(t, delta, m2, c):
        with trace.stage("many-leaves") as rec:
            out = embed_many_leaves(g, t, delta, sizes, region, c.coefficient, mode, budget)
            rec["outcome"] = "embedded" if isinstance(out, Embedding) else "witness"
        return out

    with trace.stage("prune") as rec:
        try:
            removed = maximal_nonexpanding_set(g, m1, c.d, strict=True, universe=region, budget=budget)
        except HypothesisViolated as exc:
            witness = bipartite_witness(g, exc.witness, region, m1, m2)
            if witness is None:
                raise Unresolved(f"non-expanding set {sorted(exc.witness)} has no K_({m1},{m2}) behind it") from exc
            rec["outcome"] = "witness"
            rec["witness"] = witness.to_json()
            return witness
        except CapExceeded as exc:
            removed = frozenset()
            rec["outcome"] = "skipped"
            rec["detail"] = str(exc)
        rec["removed"] = sorted(removed)
    rest = [v for v in region if v not in removed]

    out = expander_path_embed(g, t, delta, m2, c, rest, mode, seed, trace, budget)
    if isinstance(out, MultipartiteWitness):
        return _fit(g, out, sizes)
    return out


# ---------------------------------------------------------------------------
# k >= 3
# ---------------------------------------------------------------------------

def _cascade_witness(g: Graph, cascade: WitnessCascade, extra: list[Iterable[int]],
                     sizes: tuple[int, ...]) -> MultipartiteWitness:
    m = sizes[-1]
    witness = extend_witness(g, list(cascade.witness.parts), extra, (m,) * len(sizes))
    if witness is None:
        raise Unresolved("descent witness could not be extended by the remaining parts")
    return _fit(g, witness, sizes)


def _expanding_parts(g: Graph, parts: list[frozenset[int]], m: int, c: PipelineConstants,
                     sizes: tuple[int, ...], budget: SearchBudget,
                     trace: StageTrace) -> tuple[list[frozenset[int]], list[frozenset[int]]] | MultipartiteWitness:
    """Each part keeps a reservoir of its w lowest vertices; a maximal set
    whose neighbourhood meets the reservoir in fewer than y per vertex is
    removed from both."""
    q_primes, w_primes = [], []
    for i, q in enumerate(parts):
        w = frozenset(sorted(q)[:c.w])
        with trace.stage("expand-part") as rec:
            rec["part"] = i
            try:
                removed = maximal_nonexpanding_set(g, m, c.y, strict=True, within=w, universe=q, budget=budget)
            except HypothesisViolated as exc:
                pair = bipartite_witness(g, exc.witness, q, m, m)
                others = [p for j, p in enumerate(parts) if j != i]
                witness = None if pair is None else extend_witness(g, list(pair.parts), others, (m,) * len(sizes))
                if witness is None:
                    raise Unresolved(f"part {i} does not expand and no witness was assembled") from exc
                rec["outcome"] = "witness"
                return _fit(g, witness, sizes)
            except CapExceeded as exc:
                removed = frozenset()
                rec["outcome"] = "skipped"
                rec["detail"] = str(exc)
            rec["removed"] = sorted(removed)
        q_primes.append(q - removed)
        w_primes.append(w - removed)
    return q_primes, w_primes


def _largest_component(k: int, f_edges: list[tuple[int, int]]) -> list[int]:
    aux = nx.Graph()
    aux.add_nodes_from(range(k))
    aux.add_edges_from(f_edges)
    components = [sorted(comp) for comp in nx.connected_components(aux) if len(comp) > 1]
    return min(components, key=lambda comp: (-len(comp), comp[0]))


def k3_embed(g: Graph, t: RootedForest, delta: int, sizes: Iterable[int], constants: PipelineConstants,
             mode: str = "auto", seed: int = 0, trace: StageTrace | None = None,
             budget: SearchBudget | int | None = None) -> Embedding | MultipartiteWitness:
    """Three or more parts, m = m_k."""
    sizes = check_sizes(sizes)
    k = len(sizes)
    if k < 3:
        raise PreconditionViolated(f"k3_embed needs at least three part sizes, got {list(sizes)}")
    m = sizes[-1]
    c = constants
    budget = ensure_budget(budget, "multi-part pipeline")
    trace = trace or StageTrace(budget)
    region = bits(g.full_mask)
    n = t.n
    block = n + c.coefficient * delta * m

    if _many_leaves_applies(t, delta, m, c):
        with trace.stage("many-leaves") as rec:
            out = embed_many_leaves(g, t, delta, sizes, region, c.coefficient, mode, budget)
            rec["outcome"] = "embedded" if isinstance(out, Embedding) else "witness"
        return out
    chosen = _chosen_paths(t, c)
    pairs_needed = 2 * len(chosen.paths)

    need = (k - 2) * (n + c.coefficient * delta * c.q) + c.q
    if len(region) < need:
        raise ScaleInfeasible(f"host has {len(region)} vertices; extracting K^{k - 1}_{c.q} needs {need}")
    with trace.stage("extract-parts") as rec:
        try:
            out = embed_avoiding_multipartite(g, t, delta, k - 1, c.q, region, c.coefficient, mode, budget)
            rec["outcome"] = "embedded"
            return out
        except WitnessCascade as cascade:
            parts = list(cascade.witness.parts)
            rec["outcome"] = "parts"
            rec["sizes"] = [len(p) for p in parts]

    expanded = _expanding_parts(g, parts, m, c, sizes, budget, trace)
    if isinstance(expanded, MultipartiteWitness):
        return expanded
    q_primes, w_primes = expanded
    m_sets = [q - w for q, w in zip(q_primes, w_primes)]
    r1 = frozenset().union(*q_primes)

    with trace.stage("families") as rec:
        families = collect_short_path_families(g, m_sets, r1, c.family_cap)
        f_edges = sorted(key for key, fam in families.items() if len(fam.paths) == c.family_cap)
        r2 = frozenset(v for fam in families.values() for path in fam.paths for v in path)
        rec["F"] = [list(e) for e in f_edges]
    m_primes = [ms - r2 for ms in m_sets]
    reserved = r1 | r2

    if f_edges:
        component = _largest_component(k - 1, f_edges)
        k_prime = len(component) + 1
        inside = frozenset().union(*(m_primes[i] | frozenset(bits(union_mask(g, mask_of(m_primes[i])))) for i in component))
        remaining = [v for v in region if v not in inside]
        outsiders = [m_primes[i] for i in range(k - 1) if i not in component]
        if len(remaining) >= (k - k_prime) * block + m:
            with trace.stage("residual-embed") as rec:
                try:
                    out = embed_avoiding_multipartite(g, t, delta, k - k_prime + 1, m, remaining,
                                                      c.coefficient, mode, budget)
                except WitnessCascade as cascade:
                    rec["outcome"] = "witness"
                    return _cascade_witness(g, cascade, [m_primes[i] for i in component], sizes)
                rec["outcome"] = "embedded"
                return out

        s = pairs_needed
        if 3 * s > c.family_cap:
            raise ScaleInfeasible(f"joining needs {3 * s} connector paths per edge, families hold {c.family_cap}")
        with trace.stage("join") as rec:
            base_min = max(1, c.y // k_prime - 3)
            systems = [LinkedSystem(m_primes[i], w_primes[i], LinkedSpec(s, base_min, c.y)) for i in component]
            index = {old: new for new, old in enumerate(component)}
            local_edges = [(index[a], index[b]) for a, b in f_edges if a in index and b in index]
            local_families = {(index[a], index[b]): list(families[(a, b)].paths)
                              for a, b in f_edges if a in index and b in index}
            joined = join_many(systems, local_edges, local_families, g, s)
            rec["spec"] = joined.spec.to_json()
            if not joined.spec.d_min <= c.y <= joined.spec.d_max:
                raise ScaleInfeasible(
                    f"joined system links lengths [{joined.spec.d_min}, {joined.spec.d_max}], connections need y = {c.y}")
        x = joined.x
        w = joined.w - x
        z = frozenset(bits(union_mask(g, mask_of(x)))) - reserved - w - x
        with trace.stage("linkage-embed") as rec:
            params = LinkageParams(c.r, c.y, k_prime, m, delta, c.u, c.coefficient, mode)
            try:
                out = embed_via_linkage(g, z, x, w, t, params, joined, budget)
            except WitnessCascade as cascade:
                rec["outcome"] = "witness"
                return _cascade_witness(g, cascade, outsiders, sizes)
            rec["outcome"] = "embedded"
        return out

    for i, mp in enumerate(m_primes):
        if len(mp) < m:
            raise ScaleInfeasible(f"part {i} keeps {len(mp)} linking vertices, fewer than m = {m}")
        closed = mask_of(mp) | union_mask(g, mask_of(mp))
        away = bits(g.full_mask & ~closed)
        if len(away) >= (k - 2) * block + m:
            with trace.stage("residual-embed") as rec:
                rec["part"] = i
                try:
                    out = embed_avoiding_multipartite(g, t, delta, k - 1, m, away, c.coefficient, mode, budget)
                except WitnessCascade as cascade:
                    rec["outcome"] = "witness"
                    return _cascade_witness(g, cascade, [mp], sizes)
                rec["outcome"] = "embedded"
                return out

    h_parts = [frozenset(bits(union_mask(g, mask_of(mp)))) - mp - reserved for mp in m_primes]

    def embed_part(host: Graph, tree: RootedForest, part: list[int], d: int, mm: int,
                   shared: SearchBudget) -> Embedding:
        out = k2_embed(host, tree, d, (mm, mm), c, part, mode, seed, trace, shared)
        if isinstance(out, MultipartiteWitness):
            raise Unresolved("a near-extremal part hides K^2_m in its complement")
        return out

    with trace.stage("near-extremal") as rec:
        out = near_extremal_embed(g, h_parts, t, sizes, delta, c.d, None, mode, embed_part, budget)
        rec["outcome"] = "embedded" if isinstance(out, Embedding) else "witness"
    return out


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def goodness_pipeline(g: Graph, t: RootedForest, delta: int | None, sizes: Iterable[int],
                      constants: PipelineConstants | None = None, mode: str = "auto", seed: int = 0,
                      budget: SearchBudget | int | None = None) -> PipelineOutcome:
    """Copy of t in g, K_{sizes} in the complement, or a report of where the argument stopped.

    Preconditions failing inside a stage raise PipelineStageError tagged
    with that stage. LemmaViolation always propagates.
    """
    sizes = check_sizes(sizes)
    if not t.is_tree:
        raise PreconditionViolated("goodness_pipeline needs a tree")
    delta = t.delta if delta is None else delta
    if t.delta > delta:
        raise PreconditionViolated(f"tree degree bound {t.delta} exceeds delta = {delta}")
    c = constants or PipelineConstants.from_config()
    budget = ensure_budget(budget, "goodness pipeline")
    trace = StageTrace(budget)
    k = len(sizes)

    def finish(kind: str, **extra) -> PipelineOutcome:
        return PipelineOutcome(kind, trace=trace.records, constants=c, **extra)

    try:
        if k == 1:
            if g.n < sizes[0]:
                raise PipelineStageError("trivial", f"host has {g.n} < {sizes[0]} vertices")
            witness = MultipartiteWitness((frozenset(range(sizes[0])),))
            trace.note("trivial", "witness")
            return finish("witness", witness=witness)
        if k == 2:
            out = k2_embed(g, t, delta, sizes, c, None, mode, seed, trace, budget)
        else:
            out = k3_embed(g, t, delta, sizes, c, mode, seed, trace, budget)
    except WitnessCascade as cascade:
        if len(cascade.witness.parts) != k:
            return finish("unresolved", reason=str(cascade))
        return finish("witness", witness=_fit(g, cascade.witness, sizes))
    except ScaleInfeasible as exc:
        trace.note("scale", "infeasible", detail=str(exc))
        return finish("infeasible", reason=str(exc))
    except Unresolved as exc:
        return finish("unresolved", reason=str(exc))
    except (PreconditionViolated, HypothesisViolated) as exc:
        stage = trace.records[-1]["stage"] if trace.records else "dispatch"
        witness = sorted(exc.witness) if isinstance(exc, HypothesisViolated) else None
        raise PipelineStageError(stage, str(exc), witness) from exc

    if isinstance(out, MultipartiteWitness):
        return finish("witness", witness=_fit(g, out, sizes))
    return finish("embedding", embedding=out)
