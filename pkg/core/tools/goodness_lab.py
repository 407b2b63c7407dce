#!/usr/bin/env python3
"""
Goodness Lab - Command Line Tool

Batch driver over the lab library. Every command prints one JSON document
(sorted keys, two-space indent) and can append a CSV summary row.

Usage:
    goodness_lab.py <command> [options]
    goodness_lab.py goodness --tree path:3 --h clique:3
    goodness_lab.py burr --g-size 4 --chi 3 --sigma 1 --verify path:4 clique:3
    goodness_lab.py decompose --tree star:21 --r 3
    goodness_lab.py suite --threads 4 --json report.json

Common options (after the command):
    --json PATH      also write the JSON document to PATH
    --csv PATH       append "schema,command,status,value,detail" to PATH
    --config PATH    key=value overrides (pipeline.r=5, search.node_budget=10000)
    --set KEY=VALUE  one override; wins over --config
    --budget N       search node budget; wins over everything
    --threads N      worker processes for suite
    --seed N         seed for suite and pipeline

Exit codes: 0 success, 1 error, 2 witness produced, 3 unknown (budget or cap).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

LAB_DIR = Path(__file__).resolve().parent.parent / "lab"
if str(LAB_DIR) not in sys.path:
    sys.path.insert(0, str(LAB_DIR))

from lab_utils import (  # noqa: E402
    EXIT_ERROR,
    EXIT_OK,
    EXIT_UNKNOWN,
    EXIT_WITNESS,
    FormatError,
    HypothesisViolated,
    LabError,
    LemmaViolation,
    NoEmbedding,
    PipelineStageError,
    Unresolved,
    WitnessCascade,
    atomic_write_json,
    dumps,
    error,
    setup_path,
    warn,
)

setup_path()
from config_loader import load_kv_file, set_runtime_overrides  # noqa: E402
from embedding import (  # noqa: E402
    SOUND_COEFFICIENT,
    LinkageParams,
    embed_avoiding_bipartite,
    embed_avoiding_multipartite,
    embed_many_leaves,
    embed_two_trees,
    embed_via_linkage,
    fp_embed_forest,
    many_leaves_goodness,
)
from expander import as_fraction, check_d_expands, report_problems, subset_expansion_closure  # noqa: E402
from extremal import burr_bound, burr_coloring  # noqa: E402
from formats import (  # noqa: E402
    coloring_to_text,
    demand_from_json,
    families_from_json,
    load_graph,
    parse_h_spec,
    parse_tree_spec,
    system_from_json,
    tree_to_json,
    tree_to_text,
)
from graph_core import Embedding, Graph, MultipartiteWitness, check_embedding  # noqa: E402
from linkage import LinkedSpec, check_linked_system, join_many, join_two  # noqa: E402
from matching import Deficiency, check_hall_result, hall_extension_forest  # noqa: E402
from pipeline import PipelineConstants, goodness_pipeline  # noqa: E402
from suite import CHECKS, run_suite  # noqa: E402
from tree_tools import (  # noqa: E402
    centroid_split,
    check_centroid_split,
    harvest_bare_paths,
    leaves_or_bare_paths,
    strip_bare_path_interiors,
    strip_leaves,
)
from verify import coloring_contains, goodness_check, ramsey_number, spot_check_threshold  # noqa: E402

SCHEMA_PREFIX = "goodness-lab"
CSV_SCHEMA = "goodness-lab/csv/1"
CSV_COLUMNS = ["schema", "command", "status", "value", "detail"]

STATUS_EXIT = {
    "ok": EXIT_OK,
    "fail": EXIT_ERROR,
    "witness": EXIT_WITNESS,
    "unknown": EXIT_UNKNOWN,
}


@dataclass
class Result:
    status: str
    payload: dict = field(default_factory=dict)
    value: object = ""
    detail: str = ""


class _Parser(argparse.ArgumentParser):
    """Usage errors exit 1, not argparse's 2 (2 means a witness here)."""

    def error(self, message):
        raise FormatError(f"{self.prog}: {message}")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--json", dest="json_out", metavar="PATH", help="Also write the JSON result to PATH")
    p.add_argument("--csv", metavar="PATH", help="Append a CSV summary row to PATH")
    p.add_argument("--config", metavar="PATH", help="key=value override file")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                   help="Single config override (repeatable)")
    p.add_argument("--budget", type=int, help="Search node budget")
    p.add_argument("--threads", type=int, default=1, help="Worker processes (suite)")
    p.add_argument("--seed", type=int, help="Seed for suite and pipeline")
    return p


# ---------------------------------------------------------------------------
# argument helpers
# ---------------------------------------------------------------------------

def _vertices(text: str | None) -> list[int] | None:
    if text is None:
        return None
    text = text.strip()
    if not text:
        return []
    try:
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise FormatError(f"expected comma-separated vertices, got {text!r}") from None


def _graph(spec: str) -> Graph:
    """A graph file path, or a shorthand (clique:n, cycle:n, multipartite:a,b, ...)."""
    if Path(spec).is_file():
        return load_graph(spec)
    return parse_h_spec(spec)


def _load_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: {exc}") from exc


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (set, frozenset)):
        return sorted(_jsonable(v) for v in value)
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if hasattr(value, "to_json"):
        return _jsonable(value.to_json())
    if isinstance(value, Fraction):
        return str(value)
    return value


def _checked_embedding(g: Graph, emb: Embedding) -> Result:
    problems = check_embedding(g, emb)
    if problems:
        raise LemmaViolation("embedding failed its re-check: " + problems[0])
    return Result("ok", {"embedding": emb.to_json(), "metadata": emb.metadata},
                  emb.forest.n, f"{emb.forest.n} vertices embedded")


def _checked_witness(g: Graph, witness: MultipartiteWitness, sizes=None) -> Result:
    problems = witness.problems_in_complement(g, sizes)
    if problems:
        raise LemmaViolation("witness failed its re-check: " + problems[0])
    return Result("witness", {"witness": witness.to_json()}, list(witness.sizes), "multipartite witness")


def _embed_result(g: Graph, out) -> Result:
    if isinstance(out, MultipartiteWitness):
        return _checked_witness(g, out)
    return _checked_embedding(g, out)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def args_gen_tree(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tree", required=True, help="path:n | star:n | spider:l,len | random:n,delta,bias,seed | file:PATH")
    p.add_argument("--out", metavar="PATH", help="Write the tree in parent-array text form")


def cmd_gen_tree(opts) -> Result:
    t = parse_tree_spec(opts.tree)
    text = tree_to_text(t)
    if opts.out:
        Path(opts.out).write_text(text)
    return Result("ok", {"tree": tree_to_json(t), "text": text.strip()}, t.n, f"delta {t.delta}")


def args_decompose(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tree", required=True)
    p.add_argument("--r", type=int, required=True, help="Bare path length (> 2)")


def cmd_decompose(opts) -> Result:
    t = parse_tree_spec(opts.tree)
    dec = leaves_or_bare_paths(t, opts.r)
    count = len(dec.leaves) if dec.kind == "leaves" else len(dec.paths.paths)
    return Result("ok", {"n": t.n, "decomposition": dec.to_json()}, dec.kind, f"{count} {dec.kind}")


def args_centroid(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tree", required=True)


def cmd_centroid(opts) -> Result:
    t = parse_tree_spec(opts.tree)
    split = centroid_split(t)
    problems = check_centroid_split(t, split)
    if problems:
        raise LemmaViolation("centroid split failed its re-check: " + problems[0])
    return Result("ok", {"n": t.n, "split": split.to_json()}, split.centroid,
                  f"sides {len(split.a)} and {len(split.b)}")


def args_check_expand(p: argparse.ArgumentParser) -> None:
    p.add_argument("--graph", required=True, help="Graph file or shorthand")
    p.add_argument("--w", required=True, help="Target set W, comma-separated")
    p.add_argument("--d", required=True, help="Expansion factor (int, p/q or decimal)")
    p.add_argument("--universe", help="Vertex subset the graph is restricted to")


def cmd_check_expand(opts) -> Result:
    g = _graph(opts.graph)
    w, universe = _vertices(opts.w), _vertices(opts.universe)
    report = check_d_expands(g, w, as_fraction(opts.d), universe)
    payload = {"report": report.to_json(), "d": str(as_fraction(opts.d)), "W": sorted(w)}
    if report.holds:
        return Result("ok", payload, True, "expands")
    problems = report_problems(g, w, opts.d, report, universe)
    if problems:
        raise LemmaViolation("expansion witness failed its re-check: " + problems[0])
    return Result("witness", payload, False, f"condition {report.condition} fails")


def args_closure(p: argparse.ArgumentParser) -> None:
    args_check_expand(p)
    p.add_argument("--z", required=True, help="Intermediate set Z with W inside Z")
    p.add_argument("--c", required=True, help="Weaker factor for the third rule")


def cmd_closure(opts) -> Result:
    g = _graph(opts.graph)
    report = subset_expansion_closure(g, _vertices(opts.w), _vertices(opts.z), opts.d, opts.c,
                                      _vertices(opts.universe))
    conclusions = [r for r in (report.subgraph, report.superset, report.weaker) if r is not None]
    holds = all(r.holds for r in conclusions)
    return Result("ok", {"closure": report.to_json()}, report.premise.holds,
                  "conclusions hold" if holds else "some conclusion fails")


def args_strip(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tree", required=True)
    p.add_argument("--paths", type=int, metavar="R",
                   help="Strip interiors of harvested bare paths of length R (default: strip leaves)")


def cmd_strip(opts) -> Result:
    t = parse_tree_spec(opts.tree)
    if opts.paths is None:
        out = strip_leaves(t)
        payload = {"forest": tree_to_json(out.forest), "original_ids": list(out.original_ids),
                   "groups": {str(v): list(g) for v, g in out.groups.items()}}
        return Result("ok", payload, out.forest.n, f"{t.n - out.forest.n} leaves removed")
    out = strip_bare_path_interiors(t, harvest_bare_paths(t, opts.paths))
    payload = {"forest": tree_to_json(out.forest), "original_ids": list(out.original_ids),
               "pairs": [list(p) for p in out.pairs], "paths": [list(p) for p in out.paths], "r": out.r}
    return Result("ok", payload, out.forest.n, f"{len(out.paths)} path interiors removed")


EMBED_KINDS = ("fp", "c1", "c2", "c3", "many-leaves", "linkage", "pipeline")


def args_embed(p: argparse.ArgumentParser) -> None:
    p.add_argument("kind", choices=EMBED_KINDS)
    p.add_argument("--graph", required=True, help="Host graph file or shorthand")
    p.add_argument("--tree", required=True)
    p.add_argument("--tree-b", help="Second tree (c3)")
    p.add_argument("--delta", type=int, help="Degree bound (default: the tree's)")
    p.add_argument("--mode", default="auto", choices=("certified", "heuristic", "auto"))
    p.add_argument("--coefficient", type=int, help="Size-bound coefficient")
    p.add_argument("--universe", help="Host vertex subset")
    p.add_argument("--roots", help="Host roots, one per tree (fp)")
    p.add_argument("--m", type=int, help="Small-set bound / part size")
    p.add_argument("--big-m", type=int, help="Large-set target M (fp; default the forest size)")
    p.add_argument("--m1", type=int)
    p.add_argument("--m2", type=int)
    p.add_argument("--k", type=int, help="Number of parts")
    p.add_argument("--sizes", help="Part sizes, comma-separated and non-decreasing")
    p.add_argument("--z", help="Z (linkage)")
    p.add_argument("--x", help="X (linkage)")
    p.add_argument("--w", help="W (linkage)")
    p.add_argument("--r", type=int, help="Bare path length")
    p.add_argument("--y", type=int, help="Connection length (linkage)")
    p.add_argument("--d", type=float, help="Expansion factor (pipeline)")
    p.add_argument("--q", type=int, help="Part size of the extracted multipartite graph (pipeline)")
    p.add_argument("--family-cap", type=int, help="Paths per short-path family (pipeline)")


def _need(opts, *names: str) -> None:
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(opts, n) is None]
    if missing:
        raise FormatError(f"embed {opts.kind} needs {', '.join(missing)}")


def cmd_embed(opts) -> Result:
    g = _graph(opts.graph)
    t = parse_tree_spec(opts.tree)
    delta = t.delta if opts.delta is None else opts.delta
    coefficient = SOUND_COEFFICIENT if opts.coefficient is None else opts.coefficient
    universe = _vertices(opts.universe)
    kind = opts.kind

    if kind == "fp":
        _need(opts, "roots", "m")
        big_m = t.n if opts.big_m is None else opts.big_m
        emb = fp_embed_forest(g, _vertices(opts.roots), t, delta, opts.m, big_m, opts.mode, universe)
        return _checked_embedding(g, emb)
    if kind == "c1":
        _need(opts, "m1", "m2")
        out = embed_avoiding_bipartite(g, t, delta, opts.m1, opts.m2, universe, coefficient, opts.mode)
        return _embed_result(g, out)
    if kind == "c2":
        _need(opts, "k", "m")
        return _checked_embedding(g, embed_avoiding_multipartite(g, t, delta, opts.k, opts.m, universe,
                                                                 coefficient, opts.mode))
    if kind == "c3":
        _need(opts, "tree_b", "k", "m")
        t_b = parse_tree_spec(opts.tree_b)
        return _checked_embedding(g, embed_two_trees(g, t, t_b, max(delta, t_b.delta), opts.k, opts.m,
                                                     universe, coefficient, opts.mode))
    if kind == "many-leaves":
        _need(opts, "sizes")
        out = embed_many_leaves(g, t, delta, _vertices(opts.sizes), universe, coefficient, opts.mode)
        return _embed_result(g, out)
    if kind == "linkage":
        _need(opts, "z", "x", "w", "r", "y", "k", "m")
        params = LinkageParams(opts.r, opts.y, opts.k, opts.m, delta, coefficient=coefficient, mode=opts.mode)
        emb = embed_via_linkage(g, _vertices(opts.z), _vertices(opts.x), _vertices(opts.w), t, params)
        result = _checked_embedding(g, emb)
        result.payload["params"] = params.to_json()
        return result

    _need(opts, "sizes")
    sizes = _vertices(opts.sizes)
    constants = PipelineConstants.from_config(d=opts.d, r=opts.r, y=opts.y, q=opts.q,
                                              family_cap=opts.family_cap, coefficient=opts.coefficient)
    seed = 0 if opts.seed is None else opts.seed
    outcome = goodness_pipeline(g, t, delta, sizes, constants, opts.mode, seed)
    if outcome.kind == "embedding":
        result = _checked_embedding(g, outcome.embedding)
    elif outcome.kind == "witness":
        result = _checked_witness(g, outcome.witness, sizes)
    else:
        result = Result("unknown", {}, outcome.kind, outcome.reason)
    result.payload["pipeline"] = outcome.to_json()
    return result


def args_link_check(p: argparse.ArgumentParser) -> None:
    p.add_argument("--graph", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--w", required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--dmin", type=int, required=True)
    p.add_argument("--dmax", type=int, required=True)


def cmd_link_check(opts) -> Result:
    g = _graph(opts.graph)
    spec = LinkedSpec(opts.s, opts.dmin, opts.dmax)
    check = check_linked_system(g, _vertices(opts.x), _vertices(opts.w), spec)
    payload = {"spec": spec.to_json(), "check": check.to_json()}
    if check.holds:
        return Result("ok", payload, True, f"{check.requests} requests routed")
    return Result("witness", payload, False, f"request {check.requests} cannot be routed")


def args_join(p: argparse.ArgumentParser) -> None:
    p.add_argument("--graph", required=True)
    p.add_argument("--systems", required=True, metavar="PATH",
                   help='JSON: {"systems": [...], "connectors": [...]} or {"systems", "F", "families", "s"?}')
    p.add_argument("--check", action="store_true", help="Check the joined system by full enumeration")


def cmd_join(opts) -> Result:
    g = _graph(opts.graph)
    data = _load_json(opts.systems)
    systems = [system_from_json(s) for s in data.get("systems", [])]
    if "connectors" in data:
        if len(systems) != 2:
            raise FormatError("join with connectors needs exactly two systems")
        joined = join_two(systems[0], systems[1], data["connectors"], g)
    else:
        if "F" not in data or "families" not in data:
            raise FormatError("join needs either 'connectors' or 'F' and 'families'")
        joined = join_many(systems, [tuple(e) for e in data["F"]], families_from_json(data["families"]), g,
                           data.get("s"))
    payload = {"joined": joined.to_json(), "metadata": joined.metadata}
    if not opts.check:
        return Result("ok", payload, joined.spec.s, f"spec {joined.spec.to_json()}")
    check = check_linked_system(g, joined.x, joined.w, joined.spec,
                                router=lambda host, req: joined.route(host, req))
    payload["check"] = check.to_json()
    if check.holds:
        return Result("ok", payload, True, f"{check.requests} requests routed")
    return Result("witness", payload, False, "joined system fails a request")


def args_burr(p: argparse.ArgumentParser) -> None:
    p.add_argument("--g-size", type=int, required=True)
    p.add_argument("--chi", type=int, required=True)
    p.add_argument("--sigma", type=int, required=True)
    p.add_argument("--verify", nargs=2, metavar=("TREE", "H"), help="Check the coloring for red TREE / blue H")
    p.add_argument("--out", metavar="PATH", help="Write the coloring in text form")


def cmd_burr(opts) -> Result:
    bound = burr_bound(opts.g_size, opts.chi, opts.sigma)
    coloring = burr_coloring(opts.g_size, opts.chi, opts.sigma)
    if opts.out:
        Path(opts.out).write_text(coloring_to_text(coloring))
    payload = {"bound": bound, "coloring": coloring.to_json(), "cliques": [list(c) for c in coloring.cliques]}
    if not opts.verify:
        return Result("ok", payload, bound, f"K_{coloring.n} coloring")
    found = coloring_contains(coloring, parse_tree_spec(opts.verify[0]), _graph(opts.verify[1]))
    payload["verify"] = found.to_json()
    return Result("ok", payload, found.kind.capitalize(), f"bound {bound}")


def args_ramsey(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tree", required=True)
    p.add_argument("--h", required=True)
    p.add_argument("--n-max", type=int)


def cmd_ramsey(opts) -> Result:
    result = ramsey_number(parse_tree_spec(opts.tree), _graph(opts.h), opts.n_max)
    return Result("ok", {"ramsey": result.to_json()}, result.value, f"{len(result.log)} sizes searched")


def args_goodness(p: argparse.ArgumentParser) -> None:
    args_ramsey(p)


def cmd_goodness(opts) -> Result:
    t, h = parse_tree_spec(opts.tree), _graph(opts.h)
    result = goodness_check(t, h, opts.n_max)
    payload = {"goodness": result.to_json()}
    if result.chromatic is not None:
        payload["leaf_condition"] = many_leaves_goodness(t, h).to_json()
    status = "unknown" if result.label == "Unknown" else "ok"
    detail = f"R={result.ramsey}" if result.ramsey is not None else result.reason
    return Result(status, payload, result.label, detail)


def args_hall(p: argparse.ArgumentParser) -> None:
    p.add_argument("--demand", required=True, metavar="PATH", help='JSON {"A", "B", "edges", "demands"}')


def cmd_hall(opts) -> Result:
    db = demand_from_json(_load_json(opts.demand))
    result = hall_extension_forest(db)
    problems = check_hall_result(db, result)
    if problems:
        raise LemmaViolation("Hall result failed its re-check: " + problems[0])
    if isinstance(result, Deficiency):
        return Result("witness", {"result": result.to_json()}, "deficiency", f"|S| = {len(result.s)}")
    return Result("ok", {"result": result.to_json()}, "forest", f"{len(db.a)} vertices served")


def args_spot_check(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tree", required=True)
    p.add_argument("--h", required=True)
    p.add_argument("--n", type=int, required=True, help="Host clique size")
    p.add_argument("--samples", type=int, default=100)


def cmd_spot_check(opts) -> Result:
    seed = 0 if opts.seed is None else opts.seed
    result = spot_check_threshold(parse_tree_spec(opts.tree), _graph(opts.h), opts.n, opts.samples, seed)
    return Result("ok", {"spot_check": result.to_json(), "N": opts.n}, len(result.avoiding),
                  f"{len(result.avoiding)} of {result.samples} samples avoid both")


def args_suite(p: argparse.ArgumentParser) -> None:
    p.add_argument("--checks", help=f"Comma-separated subset of: {', '.join(CHECKS)}")


def cmd_suite(opts) -> Result:
    checks = [c.strip() for c in opts.checks.split(",")] if opts.checks else None
    report = run_suite(max(1, opts.threads), checks, opts.seed)
    failed = [c["check"] for c in report["checks"] if not c["ok"]]
    return Result("ok" if report["ok"] else "fail", {"report": report}, len(report["checks"]),
                  "all checks pass" if not failed else f"failing: {', '.join(failed)}")


COMMANDS = {
    "gen-tree": (cmd_gen_tree, args_gen_tree, "Generate a tree from a shorthand"),
    "decompose": (cmd_decompose, args_decompose, "Many leaves or many bare paths"),
    "centroid": (cmd_centroid, args_centroid, "Centroid split of a tree"),
    "check-expand": (cmd_check_expand, args_check_expand, "Decide d-expansion into W"),
    "closure": (cmd_closure, args_closure, "Evaluate the subset expansion closure rules"),
    "strip": (cmd_strip, args_strip, "Strip leaves or bare-path interiors"),
    "embed": (cmd_embed, args_embed, "Run one embedding procedure"),
    "link-check": (cmd_link_check, args_link_check, "Check a linked system by enumeration"),
    "join": (cmd_join, args_join, "Join linked systems"),
    "burr": (cmd_burr, args_burr, "Burr lower-bound coloring"),
    "ramsey": (cmd_ramsey, args_ramsey, "Exact R(T, H) at desk scale"),
    "goodness": (cmd_goodness, args_goodness, "Compare R(T, H) with the Burr bound"),
    "hall": (cmd_hall, args_hall, "Hall extension forest or deficiency"),
    "spot-check": (cmd_spot_check, args_spot_check, "Random colorings of K_N"),
    "suite": (cmd_suite, args_suite, "Run the acceptance battery"),
}


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _configure(opts) -> None:
    pairs: list[tuple[str, str]] = []
    if opts.config:
        pairs += load_kv_file(Path(opts.config))
    for item in opts.overrides:
        if "=" not in item:
            raise FormatError(f"--set expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        pairs.append((key.strip(), value.strip()))
    if opts.budget is not None:
        pairs.append(("search.node_budget", str(opts.budget)))
    set_runtime_overrides(pairs)


def _append_csv(path: Path, command: str, result: Result) -> None:
    new = not path.exists() or path.stat().st_size == 0
    with open(path, "a", newline="") as f:
        writer = csv.writer(f)
        if new:
            writer.writerow(CSV_COLUMNS)
        writer.writerow([CSV_SCHEMA, command, result.status, result.value, result.detail])


def _emit(opts, command: str, result: Result) -> int:
    document = _jsonable({
        "schema": f"{SCHEMA_PREFIX}/{command}/1",
        "command": command,
        "status": result.status,
        **result.payload,
    })
    print(dumps(document))
    if opts.json_out:
        atomic_write_json(Path(opts.json_out), document)
    if opts.csv:
        _append_csv(Path(opts.csv), command, result)
    if result.status == "unknown":
        warn(result.detail or "no verdict within budget")
    return STATUS_EXIT[result.status]


def _usage() -> None:
    print("Usage: goodness_lab.py <command> [options]", file=sys.stderr)
    for name, (_, _, help_text) in COMMANDS.items():
        print(f"  {name:<14} {help_text}", file=sys.stderr)


def run(argv: list[str]) -> int:
    if not argv or argv[0] in ("-h", "--help"):
        _usage()
        return EXIT_ERROR if not argv else EXIT_OK
    cmd = argv[0]
    if cmd not in COMMANDS:
        error(f"Unknown command: {cmd}")
        _usage()
        return EXIT_ERROR
    handler, add_arguments, help_text = COMMANDS[cmd]
    parser = _Parser(prog=f"goodness_lab.py {cmd}", description=help_text, parents=[_common()])
    add_arguments(parser)
    try:
        opts = parser.parse_args(argv[1:])
        _configure(opts)
    except (FormatError, ValueError, OSError) as exc:
        error(str(exc))
        return EXIT_ERROR

    try:
        result = handler(opts)
    except LemmaViolation as exc:
        error(f"internal check failed: {exc}")
        return EXIT_ERROR
    except NoEmbedding as exc:
        result = Result("fail", {"reason": str(exc)}, "absent", str(exc))
    except HypothesisViolated as exc:
        result = Result("witness", {"hypothesis_witness": sorted(exc.witness), "reason": str(exc)},
                        len(exc.witness), str(exc))
    except WitnessCascade as exc:
        result = Result("witness", {"witness": exc.witness.to_json(), "trace": exc.trace},
                        list(exc.witness.sizes), str(exc))
    except PipelineStageError as exc:
        if exc.witness is None:
            error(str(exc))
            return EXIT_ERROR
        result = Result("witness", {"stage": exc.stage, "hypothesis_witness": exc.witness, "reason": exc.reason},
                        exc.stage, exc.reason)
    except Unresolved as exc:
        bracket = getattr(exc, "bracket", None)
        result = Result("unknown", {"reason": str(exc), "bracket": None if bracket is None else list(bracket)},
                        "", str(exc))
    except (LabError, ValueError, OSError) as exc:
        error(str(exc))
        return EXIT_ERROR
    return _emit(opts, cmd, result)


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
