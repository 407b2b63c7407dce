#!/usr/bin/env python3
"""
Goodness Lab - Configuration Loader

Shared module for loading and accessing lab configuration.
All library modules and the CLI import this to get consistent config access.

Supports:
- goodness.yaml / config.yaml - Main configuration
- settings.local.json - Local overrides (NOT in git)
- GOODNESS_LAB_BUDGET - environment override for the search node budget
- key=value files and dotted overrides (CLI --config / flags)

Usage:
    from config_loader import load_config, get_node_budget
    budget = get_node_budget()
"""

import os
import json
import sys
from pathlib import Path
from functools import lru_cache

try:
    import yaml
except ImportError:
    print("WARNING: PyYAML not installed. Install with: pip install pyyaml", file=sys.stderr)
    yaml = None

# Config file search order
CONFIG_NAMES = ["goodness.yaml", "config.yaml", ".goodness.yaml"]

# Local override file (should be in .gitignore)
LOCAL_OVERRIDE_NAMES = ["settings.local.json", ".settings.local.json"]

BUDGET_ENV = "GOODNESS_LAB_BUDGET"
ROOT_ENV = "GOODNESS_LAB_DIR"

# Dotted key=value pairs set by the CLI (--config file, flags); applied last.
_RUNTIME_OVERRIDES: "list[tuple[str, str]]" = []


@lru_cache(maxsize=1)
def find_project_root() -> Path:
    """Find project root by looking for a config file or .git directory."""
    env_dir = os.environ.get(ROOT_ENV, "").strip()
    if env_dir:
        return Path(env_dir)

    current = Path.cwd()
    while current != current.parent:
        for config_name in CONFIG_NAMES:
            if (current / config_name).exists():
                return current
        if (current / ".git").is_dir():
            return current
        current = current.parent

    return Path.cwd()


@lru_cache(maxsize=1)
def load_config() -> dict:
    """
    Load configuration from project root.

    Load order (later overrides earlier):
    1. Default config (built-in)
    2. goodness.yaml / config.yaml (project config)
    3. settings.local.json (local overrides, NOT in git)
    4. GOODNESS_LAB_BUDGET environment variable
    """
    root = find_project_root()

    config_path = None
    for config_name in CONFIG_NAMES:
        candidate = root / config_name
        if candidate.exists():
            config_path = candidate
            break

    config = get_default_config()

    if config_path and yaml is not None:
        try:
            with open(config_path, 'r') as f:
                file_config = yaml.safe_load(f) or {}
            config = deep_merge(config, file_config)
        except Exception as e:
            print(f"WARNING: Failed to load config {config_path}: {e}", file=sys.stderr)

    local_config = load_local_overrides(root)
    if local_config:
        config = deep_merge(config, local_config)

    env_budget = os.environ.get(BUDGET_ENV, "").strip()
    if env_budget:
        try:
            config = deep_merge(config, {"search": {"node_budget": int(env_budget)}})
        except ValueError:
            print(f"WARNING: Ignoring non-integer {BUDGET_ENV}={env_budget!r}", file=sys.stderr)

    if _RUNTIME_OVERRIDES:
        config = apply_overrides(config, _RUNTIME_OVERRIDES)

    return config


def reset_config() -> None:
    """Drop cached configuration (tests, CLI re-rooting)."""
    load_config.cache_clear()
    find_project_root.cache_clear()


def set_runtime_overrides(pairs: "list[tuple[str, str]]") -> None:
    """Install CLI overrides; they win over every file and the environment."""
    _RUNTIME_OVERRIDES[:] = list(pairs)
    load_config.cache_clear()


def get_runtime_overrides() -> "list[tuple[str, str]]":
    """Current CLI overrides, for handing to worker processes."""
    return list(_RUNTIME_OVERRIDES)


def load_local_overrides(root: Path) -> dict | None:
    """Load developer-local override settings (settings.local.json)."""
    for override_name in LOCAL_OVERRIDE_NAMES:
        candidate = root / override_name
        if candidate.exists():
            try:
                with open(candidate, 'r') as f:
                    return json.load(f)
            except (json.JSONDecodeError, OSError) as e:
                print(f"WARNING: Failed to load {candidate}: {e}", file=sys.stderr)
    return None


def get_default_config() -> dict:
    """Return default configuration."""
    return {
        "graph": {
            "max_vertices": 512,
        },
        "search": {
            "node_budget": 2_000_000,
        },
        "expander": {
            "subset_cap": 6,
            "partition_attempts": 50,
        },
        "linkage": {
            "request_cap": 20_000,
        },
        "fp": {
            "certified_max_m": 3,
            "certified_max_forest": 24,
        },
        "verify": {
            "chromatic_cap": 16,
            "ramsey_full_max": 8,
            "ramsey_pruned_max": 10,
        },
        "pipeline": {
            "d": 2,
            "r": 3,
            "y": 1,
            "u": 2,
            "coefficient": 0,
            "q": 5,
            "w": 4,
            "family_cap": 3,
            "split_fraction": 0.125,
        },
        "suite": {
            "trees": 10000,
            "tree_max_n": 100000,
            "hall_instances": 2000,
            "fp_instances": 200,
            "burr_instances": 50,
            "burr_max_n": 6,
            "expand_instances": 500,
            "join_instances": 100,
            "pipeline_instances": 20,
            "seed": 1,
        },
        "output": {
            "timing": False,
        },
    }


def deep_merge(base: dict, override: dict) -> dict:
    """Deep merge two dictionaries."""
    result = base.copy()
    for key, value in override.items():
        if key in result and isinstance(result[key], dict) and isinstance(value, dict):
            result[key] = deep_merge(result[key], value)
        else:
            result[key] = value
    return result


def parse_scalar(text: str):
    """Parse a config value the way YAML would (ints, floats, bools, strings)."""
    text = text.strip()
    if yaml is None:
        return text
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError:
        return text


def apply_overrides(config: dict, pairs: "list[tuple[str, str]]") -> dict:
    """Merge dotted key=value pairs into config (``pipeline.r=5``)."""
    for key, raw in pairs:
        node: dict = {}
        cursor = node
        parts = key.strip().split(".")
        for part in parts[:-1]:
            cursor = cursor.setdefault(part, {})
        cursor[parts[-1]] = parse_scalar(raw)
        config = deep_merge(config, node)
    return config


def load_kv_file(path: Path) -> "list[tuple[str, str]]":
    """Read a simple key=value config file. Blank lines and # comments are skipped."""
    pairs = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {stripped!r}")
        key, value = stripped.split("=", 1)
        pairs.append((key.strip(), value.strip()))
    return pairs


def get_node_budget() -> int:
    """Decision-node budget shared by exhaustive searches."""
    return int(load_config()["search"]["node_budget"])


def get_max_vertices() -> int:
    return int(load_config()["graph"]["max_vertices"])


def get_subset_cap() -> int:
    """Largest subset size the expansion checks enumerate."""
    return int(load_config()["expander"]["subset_cap"])


def get_partition_attempts() -> int:
    return int(load_config()["expander"]["partition_attempts"])


def get_request_cap() -> int:
    """Largest number of linkage requests check_linked_system enumerates."""
    return int(load_config()["linkage"]["request_cap"])


def get_fp_limits() -> tuple[int, int]:
    """Return (certified_max_m, certified_max_forest) for the tree-embedding induction."""
    fp = load_config()["fp"]
    return int(fp["certified_max_m"]), int(fp["certified_max_forest"])


def get_chromatic_cap() -> int:
    return int(load_config()["verify"]["chromatic_cap"])


def get_ramsey_limits() -> tuple[int, int]:
    """Return (full_max, pruned_max) host sizes for the coloring search."""
    v = load_config()["verify"]
    return int(v["ramsey_full_max"]), int(v["ramsey_pruned_max"])


def get_pipeline_defaults() -> dict:
    return dict(load_config()["pipeline"])


def get_suite_config() -> dict:
    return dict(load_config()["suite"])


def timing_enabled() -> bool:
    return bool(load_config()["output"].get("timing", False))


if __name__ == "__main__":
    print(json.dumps(load_config(), indent=2, default=str))
