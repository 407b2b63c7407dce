#!/usr/bin/env python3
"""
Goodness Lab - Acceptance Battery

Seeded property and exactness checks over every module. Each check is a
list of independent instances; an instance is rebuilt inside the worker
from (check, index, seed), so the work items stay small and the report is
a pure function of the configuration.

Instance counts come from the ``suite`` config section. Instances run
through a process pool when ``threads`` > 1 and are merged in item order,
so the report is byte-identical for any thread count.

Usage:
    from suite import run_suite
    report = run_suite(threads=4)
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from multiprocessing import Pool
from typing import Callable

import networkx as nx

from lab_utils import (
    HypothesisViolated,
    LabError,
    PipelineStageError,
    SearchBudget,
    Unresolved,
    setup_path,
)

setup_path()
from config_loader import (  # noqa: E402
    get_fp_limits,
    get_node_budget,
    get_runtime_overrides,
    get_suite_config,
    set_runtime_overrides,
    timing_enabled,
)
from embedding import fp_embed_forest, fp_hypothesis_check, fp_slack  # noqa: E402
from expander import subset_expansion_closure  # noqa: E402
from extremal import burr_bound, burr_coloring, clique_blowup_coloring  # noqa: E402
from formats import parse_h_spec  # noqa: E402
from graph_core import Graph, check_embedding, contains_forest_copy  # noqa: E402
from linkage import LinkedSpec, LinkedSystem, check_linked_system, join_many, join_two  # noqa: E402
from matching import DemandedBipartite, HallForest, brute_force_deficiency, check_hall_result, hall_extension_forest  # noqa: E402
from pipeline import goodness_pipeline  # noqa: E402
from tree_tools import (  # noqa: E402
    RootedForest,
    centroid_split,
    check_bare_paths,
    check_centroid_split,
    forest_union,
    leaves_or_bare_paths,
    random_bounded_tree,
)
from verify import chromatic_data, coloring_contains, goodness_check, ramsey_number  # noqa: E402

SCHEMA = "goodness-lab/suite/1"

PASS = "pass"
FAIL = "fail"
SKIP = "skip"
UNKNOWN = "unknown"

# failures listed per check in the report
FAILURE_LOG_CAP = 10

RAMSEY_PATH_CLIQUE = ((2, 2), (2, 3), (3, 3), (4, 3), (3, 4))
BURR_H = ("clique:3", "multipartite:1,2", "cycle:4", "multipartite:2,2")
PIPELINE_SIZES = ((1, 1), (1, 2), (2, 2), (1, 1, 1), (1, 1, 2))
EXPANSION_FACTORS = (Fraction(1), Fraction(3, 2), Fraction(2), Fraction(5, 2), Fraction(3))
# (delta, m) pairs whose hosts stay small enough to enumerate every step
FP_SHAPES = ((1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (3, 1))
# seeded redraws before an expansion-closure item gives up on its premise
CLOSURE_DRAWS = 100


@dataclass(frozen=True)
class ItemOutcome:
    status: str
    detail: str = ""
    extra: dict = field(default_factory=dict)


def _rng(seed: int, check: str, index: int) -> random.Random:
    return random.Random(f"{seed}:{check}:{index}")


# ---------------------------------------------------------------------------
# instances
# ---------------------------------------------------------------------------

def _small_trees(max_n: int = 5) -> list[RootedForest]:
    trees = []
    for n in range(2, max_n + 1):
        for tree in nx.nonisomorphic_trees(n):
            trees.append(RootedForest.from_edges(n, sorted(tree.edges())))
    return trees


def evaluate_ramsey_paths(index: int, rng: random.Random, budget: SearchBudget) -> ItemOutcome:
    n, m = RAMSEY_PATH_CLIQUE[index]
    expected = (n - 1) * (m - 1) + 1
    result = ramsey_number(RootedForest.path(n), Graph.complete(m), n_max=expected, budget=budget)
    label = f"R(P_{n}, K_{m}) = {result.value}, expected {expected}"
    return ItemOutcome(PASS if result.value == expected else FAIL, label)


def evaluate_small_trees(index: int, rng: random.Random, budget: SearchBudget) -> ItemOutcome:
    t = _small_trees()[index]
    result = goodness_check(t, Graph.complete(3), budget=budget)
    label = f"tree {list(t.parent)}: {result.label}"
    if result.label == "Unknown":
        return ItemOutcome(UNKNOWN, f"{label} ({result.reason})")
    return ItemOutcome(PASS if result.label == "Good" else FAIL, label)


def evaluate_tightness(index: int, rng: random.Random, budget: SearchBudget) -> ItemOutcome:
    t = RootedForest.path(3)
    h = parse_h_spec("multipartite:3,3")
    chrom = chromatic_data(h, budget=budget)
    bound = burr_bound(t.n, chrom.chi, chrom.sigma)
    coloring = clique_blowup_coloring([t.n - 1] * 3)
    kind = coloring_contains(coloring, t, h, budget).kind
    ok = bound == 5 and coloring.n == 6 and kind == "neither"
    return ItemOutcome(PASS if ok else FAIL, f"bound {bound}, K_{coloring.n} coloring: {kind}")


def evaluate_burr(index: int, rng: random.Random, budget: SearchBudget) -> ItemOutcome:
    max_n = int(get_suite_config()["burr_max_n"])
    n = rng.randint(2, max(2, max_n))
    t = random_bounded_tree(n, rng.randint(2, 4), rng.random(), rng.randrange(2 ** 31))
    spec = rng.choice(BURR_H)
    h = parse_h_spec(spec)
    chrom = chromatic_data(h, budget=budget)
    coloring = burr_coloring(t.n, chrom.chi, chrom.sigma)
    kind = coloring_contains(coloring, t, h, budget).kind
    return ItemOutcome(PASS if kind == "neither" else FAIL, f"tree {list(t.parent)} vs {spec}: {kind}")


def evaluate_bare_paths(index: int, rng: random.Random, budget: SearchBudget) -> ItemOutcome:
    n = rng.randint(3, 200)
    r = rng.choice((3, 4, 6))
    t = random_bounded_tree(n, rng.randint(2, 5), rng.random(), rng.randrange(2 ** 31))
    dec = leaves_or_bare_paths(t, r)
    if dec.kind == "leaves":
        problems = [] if len(dec.leaves) >= dec.need else [f"{len(dec.leaves)} leaves < {dec.need}"]
        problems += [f"{v} is not a leaf" for v in sorted(dec.leaves) if t.degree(v) > 1]
    else:
        problems = check_bare_paths(t, dec.paths)
        if len(dec.paths.paths) < dec.need:
            problems.append(f"{len(dec.paths.paths)} bare paths < {dec.need}")
    label = f"n={n} r={r} {dec.kind}"
    return ItemOutcome(FAIL if problems else PASS, f"{label}: {problems[0]}" if problems else label)


def evaluate_centroid(index: int, rng: random.Random, budget: SearchBudget) -> ItemOutcome:
    n = rng.randint(2, max(2, int(get_suite_config()["tree_max_n"])))
    t = random_bounded_tree(n, rng.randint(2, 5), rng.random(), rng.randrange(2 ** 31))
    problems = check_centroid_split(t, centroid_split(t))
    return ItemOutcome(FAIL if problems else PASS, f"n={n}" + (f": {problems[0]}" if problems else ""))


def evaluate_hall(index: int, rng: random.Random, budget: SearchBudget) -> ItemOutcome:
    a_size, b_size = rng.randint(1, 10), rng.randint(1, 10)
    a = range(a_size)
    b = range(a_size, a_size + b_size)
    p = rng.random()
    edges = [(x, y) for x in a for y in b if rng.random() < p]
    db = DemandedBipartite.build(a, b, edges, {x: rng.randint(0, 3) for x in a})
    result = hall_extension_forest(db)
    oracle = brute_force_deficiency(db)
    problems = check_hall_result(db, result)
    if isinstance(result, HallForest) != (oracle is None):
        problems.append(f"forest/deficiency disagrees with the oracle ({sorted(oracle or ())})")
    label = f"|A|={a_size} |B|={b_size}"
    return ItemOutcome(FAIL if problems else PASS, f"{label}: {problems[0]}" if problems else label)


def _fp_forest(rng: random.Random, delta: int, m: int, max_forest: int) -> RootedForest:
    if delta == 1:
        forest, _ = forest_union([RootedForest.path(2)] * rng.randint(1, 4))
        return forest
    total = rng.randint(2, min(max_forest, 50 - 10 * delta * m))
    count = rng.randint(1, 2) if total >= 2 else 1
    cut = rng.randint(1, total - 1) if count == 2 else total
    sizes = [cut, total - cut] if count == 2 else [total]
    forest, _ = forest_union(random_bounded_tree(s, delta, rng.random(), rng.randrange(2 ** 31))
                             for s in sizes)
    return RootedForest(forest.parent, delta)


def _fp_instance(rng: random.Random) -> tuple[Graph, tuple[int, ...], RootedForest, int, int, int]:
    max_m, max_forest = get_fp_limits()
    shapes = [s for s in FP_SHAPES if s[1] <= max_m]
    delta, m = rng.choice(shapes)
    forest = _fp_forest(rng, delta, m, max_forest)
    big_m = forest.n
    degree = big_m + 10 * delta * m
    n = degree + rng.randint(2, 8)
    if n * degree % 2:
        n += 1
    host = Graph.from_networkx(nx.random_regular_graph(degree, n, seed=rng.randrange(2 ** 31)))
    roots = tuple(rng.sample(range(n), len(forest.roots)))
    return host, roots, forest, delta, m, big_m


def _fp_boundary_instance(rng: random.Random) -> tuple[Graph, tuple[int, ...], RootedForest, int, int, int]:
    """A regular core plus m-1 pendant vertices with exactly 4*delta private neighbours.

    Every set of pendant vertices has slack 0, so the induction meets
    critical sets at every step; every m-set still holds a core vertex,
    so the large-set hypothesis keeps holding.
    """
    max_m, max_forest = get_fp_limits()
    shapes = [s for s in FP_SHAPES if s[1] == min(max_m, 3)]
    delta, m = rng.choice(shapes)
    forest = _fp_forest(rng, delta, m, max_forest)
    big_m = forest.n
    degree = big_m + 10 * delta * m
    touched = 4 * delta * (m - 1)
    core_n = degree + touched + len(forest.roots) + rng.randint(1, 4)
    if core_n * degree % 2:
        core_n += 1
    core = nx.random_regular_graph(degree, core_n, seed=rng.randrange(2 ** 31))
    order = list(range(core_n))
    rng.shuffle(order)
    edges = list(core.edges())
    for i in range(m - 1):
        edges.extend((core_n + i, v) for v in order[4 * delta * i:4 * delta * (i + 1)])
    host = Graph.from_edges(core_n + m - 1, edges)
    roots = tuple(rng.sample(order[touched:], len(forest.roots)))
    return host, roots, forest, delta, m, big_m


def _critical_unions(g: Graph, log: list[dict], delta: int, m: int) -> tuple[int, list[str]]:
    checked = 0
    problems = []
    for step in log:
        weights = {int(x): w for x, w in step["weights"].items()}
        sets = step["critical"]
        for i in range(len(sets)):
            for j in range(i + 1, len(sets)):
                union = set(sets[i]) | set(sets[j])
                checked += 1
                slack = fp_slack(g, union, weights, delta)
                if len(union) > m or slack != 0:
                    problems.append(f"union {sorted(union)} has size {len(union)} and slack {slack}")
    return checked, problems


def evaluate_fp(index: int, rng: random.Random, budget: SearchBudget) -> ItemOutcome:
    # even items sit on the critical-set boundary, odd items are random regular hosts
    build = _fp_boundary_instance if index % 2 == 0 else _fp_instance
    g, roots, forest, delta, m, big_m = build(rng)
    label = f"n={g.n} forest={forest.n} delta={delta} m={m}"
    check = fp_hypothesis_check(g, roots, forest, delta, m, big_m, budget=budget)
    if not check.holds:
        return ItemOutcome(SKIP, f"{label}: {check.kind}-set pre-check fails",
                           {"unions": 0, "union_failures": []})
    try:
        emb = fp_embed_forest(g, roots, forest, delta, m, big_m, mode="certified", budget=budget, checked=check)
    except HypothesisViolated as exc:
        return ItemOutcome(FAIL, f"{label}: {exc}", {"unions": 0, "union_failures": []})
    unions, union_failures = _critical_unions(g, emb.metadata.get("critical_log", []), delta, m)
    problems = check_embedding(g, emb)
    if emb.metadata.get("e2") is not True:
        problems.append("image expansion not confirmed")
    extra = {"unions": unions, "union_failures": union_failures[:FAILURE_LOG_CAP]}
    return ItemOutcome(FAIL if problems else PASS, f"{label}: {problems[0]}" if problems else label, extra)


def evaluate_expansion_closure(index: int, rng: random.Random, budget: SearchBudget) -> ItemOutcome:
    # the seeded stream is redrawn until the premise holds
    for _ in range(CLOSURE_DRAWS):
        n = rng.randint(6, 11)
        g = Graph.from_networkx(nx.gnp_random_graph(n, 0.5 + 0.45 * rng.random(), seed=rng.randrange(2 ** 31)))
        z = sorted(rng.sample(range(n), rng.randint(2, n)))
        w = sorted(rng.sample(z, rng.randint(1, len(z))))
        d = rng.choice(EXPANSION_FACTORS)
        c = rng.choice((d / (d - 1), d)) if d > 1 else d
        report = subset_expansion_closure(g, w, z, d, c, budget=budget)
        if report.premise.holds:
            break
    label = f"n={n} |Z|={len(z)} |W|={len(w)} d={d} c={c}"
    if not report.premise.holds:
        return ItemOutcome(SKIP, f"{label}: premise fails after {CLOSURE_DRAWS} draws")
    failed = [name for name, rep in (("i", report.subgraph), ("ii", report.superset), ("iii", report.weaker))
              if rep is not None and not rep.holds]
    return ItemOutcome(FAIL if failed else PASS, f"{label}: conclusions {failed} fail" if failed else label)


def _clique_system(offset: int, size: int, x_size: int) -> tuple[LinkedSystem, list[tuple[int, int]]]:
    vertices = list(range(offset, offset + size))
    edges = [(u, v) for i, u in enumerate(vertices) for v in vertices[i + 1:]]
    system = LinkedSystem(frozenset(vertices[:x_size]), frozenset(vertices[x_size:]),
                          LinkedSpec(1, 2, size - x_size + 1))
    return system, edges


def _connector(rng: random.Random, start: int, end: int, fresh: list[int]) -> tuple[int, ...]:
    inner = []
    for _ in range(rng.randint(0, 2)):
        inner.append(fresh[0])
        fresh[0] += 1
    return (start, *inner, end)


def _path_edges(path: tuple[int, ...]) -> list[tuple[int, int]]:
    return list(zip(path, path[1:]))


def evaluate_join(index: int, rng: random.Random, budget: SearchBudget) -> ItemOutcome:
    """Even instances join two clique systems, odd ones join three along F."""
    if index % 2 == 0:
        size, x_size, k = rng.choice((9, 10)), 3, 2
    else:
        size, x_size, k = 20, 6, 3
    systems, edges = [], []
    for i in range(k):
        system, clique = _clique_system(i * size, size, x_size)
        systems.append(system)
        edges += clique
    fresh = [k * size]
    free = [sorted(s.x) for s in systems]
    for ends in free:
        rng.shuffle(ends)

    if k == 2:
        connectors = [_connector(rng, free[0][i], free[1][i], fresh) for i in range(3)]
        for path in connectors:
            edges += _path_edges(path)
        g = Graph.from_edges(fresh[0], edges)
        joined = join_two(systems[0], systems[1], connectors, g)
        label = "join_two"
    else:
        f_edges = [(0, 1), (1, 2)] if rng.random() < 0.5 else [(0, 1), (0, 2), (1, 2)]
        families = {}
        for a, b in f_edges:
            family = [_connector(rng, free[a].pop(), free[b].pop(), fresh) for _ in range(3)]
            families[(a, b)] = family
            for path in family:
                edges += _path_edges(path)
        g = Graph.from_edges(fresh[0], edges)
        joined = join_many(systems, f_edges, families, g, s=1)
        label = f"join_many F={f_edges}"

    for i, system in enumerate(systems):
        base = check_linked_system(g, system.x, system.w, system.spec, budget=budget)
        if not base.holds:
            return ItemOutcome(SKIP, f"{label}: system {i} is not linked")
    result = check_linked_system(g, joined.x, joined.w, joined.spec, budget=budget,
                                 router=lambda host, req: joined.route(host, req, budget))
    label = f"{label} spec={joined.spec.to_json()} requests={result.requests}"
    if result.holds:
        return ItemOutcome(PASS, label)
    return ItemOutcome(FAIL, f"{label}: fails on {result.counterexample.to_json()}")


def evaluate_pipeline_lower_bound(index: int, rng: random.Random, budget: SearchBudget) -> ItemOutcome:
    n = rng.randint(3, 6)
    t = random_bounded_tree(n, rng.randint(2, 3), rng.random(), rng.randrange(2 ** 31))
    sizes = rng.choice(PIPELINE_SIZES)
    host = burr_coloring(t.n, len(sizes), sizes[0]).red
    label = f"tree {list(t.parent)} sizes {list(sizes)} N={host.n}"
    try:
        outcome = goodness_pipeline(host, t, None, sizes, seed=index, budget=budget).kind
    except PipelineStageError as exc:
        outcome = f"stage error [{exc.stage}]"
    copy = contains_forest_copy(host, t, SearchBudget(what="copy check"))
    if outcome in ("embedding", "witness") or copy is not None:
        return ItemOutcome(FAIL, f"{label}: pipeline {outcome}, exhaustive copy {copy is not None}")
    return ItemOutcome(PASS, f"{label}: {outcome}")


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

Evaluator = Callable[[int, random.Random, SearchBudget], ItemOutcome]

# name -> (instance count from the suite config, evaluator)
CHECKS: dict[str, tuple[Callable[[dict], int], Evaluator]] = {
    "ramsey-paths": (lambda cfg: len(RAMSEY_PATH_CLIQUE), evaluate_ramsey_paths),
    "goodness-small-trees": (lambda cfg: len(_small_trees()), evaluate_small_trees),
    "goodness-tightness": (lambda cfg: 1, evaluate_tightness),
    "burr-coloring": (lambda cfg: int(cfg["burr_instances"]), evaluate_burr),
    "bare-paths": (lambda cfg: int(cfg["trees"]), evaluate_bare_paths),
    "centroid": (lambda cfg: int(cfg["trees"]), evaluate_centroid),
    "hall-oracle": (lambda cfg: int(cfg["hall_instances"]), evaluate_hall),
    "fp-certified": (lambda cfg: int(cfg["fp_instances"]), evaluate_fp),
    "expansion-closure": (lambda cfg: int(cfg["expand_instances"]), evaluate_expansion_closure),
    "join-linked": (lambda cfg: int(cfg["join_instances"]), evaluate_join),
    "pipeline-lower-bound": (lambda cfg: int(cfg["pipeline_instances"]), evaluate_pipeline_lower_bound),
}

# derived from fp-certified item extras
CRITICAL_UNION = "critical-union"


def run_item(item: tuple[str, int, int, int]) -> dict:
    """Evaluate one instance; top level so pool workers can unpickle it."""
    check, index, seed, node_budget = item
    budget = SearchBudget(node_budget, f"{check}[{index}]")
    try:
        outcome = CHECKS[check][1](index, _rng(seed, check, index), budget)
    except Unresolved as exc:
        outcome = ItemOutcome(UNKNOWN, str(exc))
    except LabError as exc:
        outcome = ItemOutcome(FAIL, f"{type(exc).__name__}: {exc}")
    return {"check": check, "index": index, "status": outcome.status, "detail": outcome.detail,
            "extra": outcome.extra, "nodes": budget.spent}


def _summary(name: str, results: list[dict]) -> dict:
    counts = {status: 0 for status in (PASS, FAIL, SKIP, UNKNOWN)}
    for r in results:
        counts[r["status"]] += 1
    failures = [f"#{r['index']}: {r['detail']}" for r in results if r["status"] == FAIL]
    return {
        "check": name,
        "instances": len(results),
        **counts,
        "ok": counts[FAIL] == 0,
        "failures": failures[:FAILURE_LOG_CAP],
        "nodes": sum(r["nodes"] for r in results),
    }


def _critical_summary(results: list[dict]) -> dict:
    pairs = sum(r["extra"].get("unions", 0) for r in results)
    failures = [f"#{r['index']}: {msg}" for r in results for msg in r["extra"].get("union_failures", [])]
    # boundary hosts with m >= 3 always log a pair, so none means nothing was checked
    if results and pairs == 0 and get_fp_limits()[0] >= 3:
        failures.append("no pair of critical sets was checked")
    return {
        "check": CRITICAL_UNION,
        "instances": pairs,
        PASS: max(pairs - len(failures), 0),
        FAIL: len(failures),
        SKIP: 0,
        UNKNOWN: 0,
        "ok": not failures,
        "failures": failures[:FAILURE_LOG_CAP],
        "nodes": 0,
    }


def _initialise_worker(overrides: list[tuple[str, str]]) -> None:
    set_runtime_overrides(overrides)


def suite_items(checks: list[str] | None = None, seed: int | None = None) -> list[tuple[str, int, int, int]]:
    cfg = get_suite_config()
    seed = int(cfg["seed"]) if seed is None else seed
    names = list(CHECKS) if checks is None else checks
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise ValueError(f"unknown checks {unknown}; expected some of {list(CHECKS)}")
    budget = get_node_budget()
    return [(name, i, seed, budget) for name in names for i in range(CHECKS[name][0](cfg))]


def run_suite(threads: int = 1, checks: list[str] | None = None, seed: int | None = None) -> dict:
    """Run the battery and return the report (results in canonical item order)."""
    cfg = get_suite_config()
    seed = int(cfg["seed"]) if seed is None else seed
    items = suite_items(checks, seed)
    started = time.perf_counter()
    if threads > 1 and len(items) > 1:
        with Pool(processes=min(threads, len(items)), initializer=_initialise_worker,
                  initargs=(get_runtime_overrides(),)) as pool:
            results = pool.map(run_item, items)
    else:
        results = [run_item(item) for item in items]

    by_check: dict[str, list[dict]] = {}
    for r in results:
        by_check.setdefault(r["check"], []).append(r)
    summaries = [_summary(name, rs) for name, rs in by_check.items()]
    if "fp-certified" in by_check:
        summaries.append(_critical_summary(by_check["fp-certified"]))
    return {
        "schema": SCHEMA,
        "seed": seed,
        "checks": summaries,
        "ok": all(s["ok"] for s in summaries),
        "timing": round(time.perf_counter() - started, 3) if timing_enabled() else None,
    }
