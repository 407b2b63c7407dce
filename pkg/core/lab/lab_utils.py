#!/usr/bin/env python3
"""
Goodness Lab - Shared Utilities

Bootstrap module for the library and the CLI. Handles:
- sys.path setup for same-directory imports
- the lab's exception hierarchy and the shared search budget
- stderr diagnostics, stable JSON output, atomic writes
- the exit codes shared by the command line tool

Usage in any module:
    from lab_utils import setup_path, SearchBudget, PreconditionViolated
    setup_path()
    from config_loader import get_node_budget
"""

import json
import os
import sys
import tempfile
from pathlib import Path

# Exit codes of the command line tool
EXIT_OK = 0
EXIT_ERROR = 1
EXIT_WITNESS = 2
EXIT_UNKNOWN = 3

# Tri-state verdicts
VERDICT_YES = "yes"
VERDICT_NO = "no"
VERDICT_UNKNOWN = "unknown"


def setup_path():
    """Add the library directory to sys.path for sibling imports."""
    lab_dir = str(Path(__file__).resolve().parent)
    if lab_dir not in sys.path:
        sys.path.insert(0, lab_dir)


class LabError(Exception):
    """Base class for every error the lab raises on purpose."""


class PreconditionViolated(LabError, ValueError):
    """An operation was called outside its stated preconditions."""


class InvalidPaths(PreconditionViolated):
    """A bare-path collection does not fit the tree it was given for."""


class FormatError(LabError, ValueError):
    """An input file or shorthand could not be parsed."""


class Unresolved(LabError):
    """The search stopped without a verdict; the answer is unknown."""


class SearchBudgetExceeded(Unresolved):
    def __init__(self, limit: int, what: str = "search"):
        super().__init__(f"{what} exceeded node budget of {limit}")
        self.limit = limit


class CapExceeded(Unresolved):
    """An enumeration would exceed a configured cap.

    ``bracket`` carries the best known ``[lo, hi]`` interval when the
    capped quantity is a number (``hi`` is None when unbounded).
    """

    def __init__(self, message: str, bracket: "tuple[int, int | None] | None" = None):
        super().__init__(message)
        self.bracket = bracket


class RetriesExhausted(Unresolved):
    pass


class HypothesisViolated(LabError):
    """A lemma hypothesis fails; ``witness`` is the offending vertex set."""

    def __init__(self, witness, message: str = "hypothesis violated"):
        super().__init__(f"{message}: {sorted(witness)}")
        self.witness = frozenset(witness)


class LemmaViolation(LabError, AssertionError):
    """A proof step that cannot fail did fail. Always a bug."""


class NoEmbedding(LabError):
    """A complete search found no embedding with the prescribed roots.

    Unlike Unresolved this is a definite answer for the instance as given.
    """


class WitnessCascade(LabError):
    """Recursive descent ended in a certified multipartite witness."""

    def __init__(self, witness, trace: list):
        super().__init__(f"descent ended in witness with part sizes {[len(p) for p in witness.parts]}")
        self.witness = witness
        self.trace = trace


class ScaleInfeasible(LabError):
    """Pipeline constants make a stage vacuous at this instance size."""


class PipelineStageError(LabError):
    def __init__(self, stage: str, reason: str, witness=None):
        super().__init__(f"[{stage}] {reason}")
        self.stage = stage
        self.reason = reason
        self.witness = witness


class SearchBudget:
    """Decision-node counter shared by one exhaustive search.

    >>> budget = SearchBudget(10)
    >>> budget.tick()
    """

    def __init__(self, limit: int | None = None, what: str = "search"):
        if limit is None:
            setup_path()
            from config_loader import get_node_budget
            limit = get_node_budget()
        if limit < 1:
            raise ValueError(f"node budget must be positive, got {limit}")
        self.limit = limit
        self.spent = 0
        self.what = what

    def tick(self, nodes: int = 1) -> None:
        self.spent += nodes
        if self.spent > self.limit:
            raise SearchBudgetExceeded(self.limit, self.what)


def ensure_budget(budget: "SearchBudget | int | None", what: str = "search") -> SearchBudget:
    """Accept a shared budget, a plain limit, or None (configured default)."""
    if isinstance(budget, SearchBudget):
        return budget
    return SearchBudget(budget, what)


def warn(message: str) -> None:
    print(f"WARNING: {message}", file=sys.stderr)


def error(message: str) -> None:
    print(f"ERROR: {message}", file=sys.stderr)


def dumps(data) -> str:
    """Stable JSON text: sorted keys, two-space indent."""
    return json.dumps(data, sort_keys=True, indent=2)


def atomic_write_json(path: Path, data) -> None:
    """Write JSON atomically via tempfile + rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=str(path.parent), suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(dumps(data))
            f.write("\n")
        os.rename(tmp, str(path))
    except Exception:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise

