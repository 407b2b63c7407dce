#!/usr/bin/env python3
"""
Goodness Lab - Expansion

Exact d-expansion checks by subset enumeration, the subset-expansion
closure rules, greedy removal of a maximal non-expanding set, and seeded
expansion-preserving partitions.

A graph G d-expands into W when
  1. |N(X) & W| >= d|X| for every X with 1 <= |X| < t, and
  2. every two disjoint sets X, Y with |X| = |Y| = t span an edge,
where t = ceil(|W| / 2d). Every check takes a ``universe`` so it can run
on an induced subgraph without relabelling.

Usage:
    from expander import check_d_expands, maximal_nonexpanding_set
    report = check_d_expands(g, range(10), 2)
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

from lab_utils import (
    CapExceeded,
    HypothesisViolated,
    PreconditionViolated,
    RetriesExhausted,
    SearchBudget,
    ensure_budget,
    setup_path,
)

setup_path()
from config_loader import get_partition_attempts, get_subset_cap  # noqa: E402
from graph_core import Graph, as_set, bits, mask_of, popcount, universe_mask  # noqa: E402


def as_fraction(value) -> Fraction:
    """Accept ints, Fractions, "p/q" strings and floats (read via their decimal text)."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(str(value))
    return Fraction(value)


@dataclass(frozen=True)
class ExpansionParams:
    """Expansion factor d, small-set bound m and large-set target M."""

    d: Fraction
    m: int = 1
    M: int = 0

    def __post_init__(self):
        object.__setattr__(self, "d", as_fraction(self.d))
        if self.d < 0:
            raise PreconditionViolated(f"expansion factor must be >= 0, got {self.d}")
        if self.m < 1:
            raise PreconditionViolated(f"small-set bound must be >= 1, got {self.m}")


@dataclass(frozen=True)
class ExpansionReport:
    holds: bool
    condition: int | None = None
    violating_set: frozenset[int] | None = None
    partner_set: frozenset[int] | None = None

    def to_json(self) -> dict:
        out = {
            "holds": self.holds,
            "condition": self.condition,
            "witness": None if self.violating_set is None else sorted(self.violating_set),
        }
        if self.partner_set is not None:
            out["partner"] = sorted(self.partner_set)
        return out


def expansion_threshold(w_size: int, d) -> int:
    """t = ceil(|W| / 2d); 0 when d is 0 (both conditions vacuous)."""
    d = as_fraction(d)
    if d == 0:
        return 0
    return math.ceil(Fraction(w_size) / (2 * d))


def subsets_with_union(pool: list[int], size: int, adj: tuple[int, ...]) -> Iterator[tuple[int, int]]:
    """Subsets of ``pool`` of one size in lex order, as (mask, union of neighbourhoods)."""
    last = len(pool)

    def rec(start: int, left: int, mask: int, union: int):
        if left == 0:
            yield mask, union
            return
        for i in range(start, last - left + 1):
            v = pool[i]
            yield from rec(i + 1, left - 1, mask | 1 << v, union | adj[v])

    yield from rec(0, size, 0, 0)


def _too_small(count: int, factor: Fraction, size: int, strict: bool) -> bool:
    bound = factor * size
    return count < bound if strict else count <= bound


def check_d_expands(g: Graph, w: Iterable[int], d, universe: Iterable[int] | None = None,
                    budget: SearchBudget | int | None = None, cap: int | None = None) -> ExpansionReport:
    """Decide whether the subgraph on ``universe`` d-expands into ``w``.

    The first violation in (condition, size, lexicographic) order is
    reported. Raises CapExceeded when t exceeds the enumeration cap.
    """
    d = as_fraction(d)
    if d < 0:
        raise PreconditionViolated(f"expansion factor must be >= 0, got {d}")
    allowed = universe_mask(g, universe)
    wmask = mask_of(w)
    if wmask & ~allowed:
        raise PreconditionViolated("W must lie inside the universe")
    t = expansion_threshold(popcount(wmask), d)
    if t == 0:
        return ExpansionReport(True)
    cap = get_subset_cap() if cap is None else cap
    if t > cap:
        raise CapExceeded(f"expansion threshold {t} exceeds subset cap {cap}")
    budget = ensure_budget(budget, "expansion check")
    adj = tuple(row & allowed for row in g.adj)
    pool = bits(allowed)

    for size in range(1, t):
        for xmask, union in subsets_with_union(pool, size, adj):
            budget.tick()
            if _too_small(popcount(union & ~xmask & wmask), d, size, strict=True):
                return ExpansionReport(False, 1, as_set(xmask))

    if 2 * t <= len(pool):
        for xmask, union in subsets_with_union(pool, t, adj):
            budget.tick()
            free = allowed & ~xmask & ~union
            if popcount(free) >= t:
                partner = bits(free)[:t]
                return ExpansionReport(False, 2, as_set(xmask), frozenset(partner))
    return ExpansionReport(True)


def report_problems(g: Graph, w: Iterable[int], d, report: ExpansionReport,
                    universe: Iterable[int] | None = None) -> list[str]:
    """Re-check a failing report's witness from scratch."""
    if report.holds:
        return []
    d = as_fraction(d)
    allowed = universe_mask(g, universe)
    wmask = mask_of(w)
    t = expansion_threshold(popcount(wmask), d)
    xmask = mask_of(report.violating_set or ())
    if xmask & ~allowed:
        return ["witness leaves the universe"]
    size = popcount(xmask)
    union = 0
    for v in bits(xmask):
        union |= g.adj[v]
    union &= allowed
    if report.condition == 1:
        problems = []
        if not 1 <= size < t:
            problems.append(f"witness size {size} outside [1, {t})")
        count = popcount(union & ~xmask & wmask)
        if not _too_small(count, d, size, strict=True):
            problems.append(f"witness has {count} >= {d * size} neighbours in W")
        return problems
    if report.condition == 2:
        ymask = mask_of(report.partner_set or ())
        problems = []
        if size != t or popcount(ymask) != t:
            problems.append(f"sets of sizes {size}, {popcount(ymask)}; expected {t}")
        if ymask & (xmask | ~allowed):
            problems.append("partner set overlaps the witness or leaves the universe")
        if union & ymask:
            problems.append("witness and partner set are joined by an edge")
        return problems
    return [f"unknown condition {report.condition}"]


# ---------------------------------------------------------------------------
# closure rules
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClosureReport:
    """Premise plus the three conclusions; None marks an inapplicable one."""

    premise: ExpansionReport
    subgraph: ExpansionReport
    superset: ExpansionReport | None
    weaker: ExpansionReport | None

    def to_json(self) -> dict:
        return {
            "premise": self.premise.to_json(),
            "i": self.subgraph.to_json(),
            "ii": None if self.superset is None else self.superset.to_json(),
            "iii": None if self.weaker is None else self.weaker.to_json(),
        }


def subset_expansion_closure(g: Graph, w: Iterable[int], z: Iterable[int], d, c,
                             universe: Iterable[int] | None = None,
                             budget: SearchBudget | int | None = None) -> ClosureReport:
    """Evaluate the closure rules for W inside Z inside the universe.

    (i)   Z d-expands into W;
    (ii)  if d >= 2, the universe d-expands into Z;
    (iii) if d > 1 and d/(d-1) <= c <= d, the universe c-expands into W.
    """
    d, c = as_fraction(d), as_fraction(c)
    allowed = universe_mask(g, universe)
    wmask, zmask = mask_of(w), mask_of(z)
    if wmask & ~zmask or zmask & ~allowed:
        raise PreconditionViolated("need W inside Z inside the universe")
    budget = ensure_budget(budget, "expansion closure")
    w_set, z_set = bits(wmask), bits(zmask)
    premise = check_d_expands(g, w_set, d, universe, budget)
    subgraph = check_d_expands(g, w_set, d, z_set, budget)
    superset = check_d_expands(g, z_set, d, universe, budget) if d >= 2 else None
    weaker = None
    if d > 1 and d / (d - 1) <= c <= d:
        weaker = check_d_expands(g, w_set, c, universe, budget)
    return ClosureReport(premise, subgraph, superset, weaker)


# ---------------------------------------------------------------------------
# maximal non-expanding sets
# ---------------------------------------------------------------------------

def first_violator(g: Graph, m: int, factor, strict: bool, removed: Iterable[int] = (),
                   within: Iterable[int] | None = None, candidates: Iterable[int] | None = None,
                   universe: Iterable[int] | None = None,
                   budget: SearchBudget | int | None = None) -> frozenset[int] | None:
    """Smallest, then lexicographically first, S with 1 <= |S| <= m whose
    neighbourhood in the residual graph has too few members in ``within``.

    The residual graph is the universe minus ``removed``; S is drawn from
    ``candidates`` (default: the residual vertex set).
    """
    factor = as_fraction(factor)
    budget = ensure_budget(budget, "non-expanding set search")
    residual = universe_mask(g, universe) & ~mask_of(removed)
    within_mask = residual if within is None else mask_of(within) & residual
    pool_mask = residual if candidates is None else mask_of(candidates) & residual
    adj = tuple(row & residual for row in g.adj)
    pool = bits(pool_mask)
    for size in range(1, min(m, len(pool)) + 1):
        for smask, union in subsets_with_union(pool, size, adj):
            budget.tick()
            if _too_small(popcount(union & ~smask & within_mask), factor, size, strict):
                return as_set(smask)
    return None


def maximal_nonexpanding_set(g: Graph, m: int, factor, strict: bool,
                             within: Iterable[int] | None = None,
                             candidates: Iterable[int] | None = None,
                             universe: Iterable[int] | None = None,
                             budget: SearchBudget | int | None = None) -> frozenset[int]:
    """Greedily absorb minimal violators until none is left.

    Returns X with |X| <= m - 1 such that no S outside X with 1 <= |S| <= m
    has fewer than (strict) or at most (non-strict) factor*|S| neighbours
    inside ``within`` in the graph minus X. Raises HypothesisViolated(X | S)
    when absorbing S would make |X| reach m.
    """
    if m < 1:
        raise PreconditionViolated(f"cap m must be >= 1, got {m}")
    cap = get_subset_cap()
    if m > cap:
        raise CapExceeded(f"non-expanding set search needs subsets up to {m}, cap is {cap}")
    budget = ensure_budget(budget, "non-expanding set search")
    x: frozenset[int] = frozenset()
    while True:
        s = first_violator(g, m, factor, strict, x, within, candidates, universe, budget)
        if s is None:
            return x
        if len(x) + len(s) >= m:
            raise HypothesisViolated(x | s, f"non-expanding set reached size {len(x) + len(s)} >= {m}")
        x = x | s


# ---------------------------------------------------------------------------
# partitions
# ---------------------------------------------------------------------------

def partition_factors(d, sizes: Iterable[int]) -> tuple[Fraction, ...]:
    """d_i = m_i * d / (5m) with m the total size."""
    d = as_fraction(d)
    sizes = tuple(sizes)
    total = sum(sizes)
    return tuple(Fraction(mi) * d / (5 * total) for mi in sizes)


def partition_expansion(g: Graph, w: Iterable[int], d, sizes: Iterable[int],
                        universe: Iterable[int] | None = None, seed: int = 0,
                        attempts: int | None = None,
                        budget: SearchBudget | int | None = None) -> tuple[frozenset[int], ...]:
    """Split W into parts of the given sizes, each expanded into at factor d_i.

    Seeded random partitions are verified part by part; RetriesExhausted
    after the configured number of attempts is "unknown", not a refutation.
    """
    w_set = sorted(set(w))
    sizes = tuple(int(s) for s in sizes)
    if any(s < 1 for s in sizes) or sum(sizes) != len(w_set):
        raise PreconditionViolated(f"sizes {list(sizes)} do not partition |W| = {len(w_set)}")
    budget = ensure_budget(budget, "partition expansion")
    premise = check_d_expands(g, w_set, d, universe, budget)
    if not premise.holds:
        raise PreconditionViolated(
            f"host does not {as_fraction(d)}-expand into W (condition {premise.condition})")
    factors = partition_factors(d, sizes)
    attempts = get_partition_attempts() if attempts is None else attempts
    rng = random.Random(seed)
    for _ in range(attempts):
        order = list(w_set)
        rng.shuffle(order)
        parts = []
        start = 0
        for size in sizes:
            parts.append(frozenset(order[start:start + size]))
            start += size
        if all(check_d_expands(g, part, di, universe, budget).holds for part, di in zip(parts, factors)):
            return tuple(parts)
    raise RetriesExhausted(f"no verified partition in {attempts} attempts")
