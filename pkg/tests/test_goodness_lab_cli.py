"""Tests for the goodness_lab.py command line tool.

Pattern: subprocess runner against a temporary project root, so each run
sees the built-in configuration plus whatever the test writes there.
"""

import csv
import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parent.parent
CLI = REPO_ROOT / "core" / "tools" / "goodness_lab.py"

SMALL_SUITE = ["--checks", "hall-oracle,centroid,bare-paths",
               "--set", "suite.hall_instances=6", "--set", "suite.trees=4", "--set", "suite.tree_max_n=60"]


def run_cli(root: Path, *args: str) -> subprocess.CompletedProcess:
    env = dict(os.environ, GOODNESS_LAB_DIR=str(root))
    env.pop("GOODNESS_LAB_BUDGET", None)
    return subprocess.run([sys.executable, str(CLI), *args], capture_output=True, text=True,
                          cwd=str(root), env=env, timeout=300)


def document(proc: subprocess.CompletedProcess) -> dict:
    return json.loads(proc.stdout)


# --- verdicts ---

class TestVerdicts:
    def test_goodness_of_path_against_triangle(self, tmp_path):
        proc = run_cli(tmp_path, "goodness", "--tree", "path:3", "--h", "clique:3")
        assert proc.returncode == 0, proc.stderr
        doc = document(proc)
        assert doc["schema"] == "goodness-lab/goodness/1"
        assert doc["goodness"]["verdict"] == "Good"
        assert doc["goodness"]["R"] == 5
        assert doc["leaf_condition"]["chi"] == 3

    def test_burr_coloring_verified(self, tmp_path):
        out_csv = tmp_path / "rows.csv"
        proc = run_cli(tmp_path, "burr", "--g-size", "4", "--chi", "3", "--sigma", "1",
                       "--verify", "path:4", "clique:3", "--csv", str(out_csv))
        assert proc.returncode == 0, proc.stderr
        doc = document(proc)
        assert doc["bound"] == 7
        assert doc["verify"]["kind"] == "neither"
        rows = list(csv.reader(out_csv.open()))
        assert rows == [["schema", "command", "status", "value", "detail"],
                        ["goodness-lab/csv/1", "burr", "ok", "Neither", "bound 7"]]

    def test_decompose_star(self, tmp_path):
        proc = run_cli(tmp_path, "decompose", "--tree", "star:21", "--r", "3")
        assert proc.returncode == 0, proc.stderr
        dec = document(proc)["decomposition"]
        assert dec["kind"] == "leaves"
        assert len(dec["leaves"]) == 20
        assert dec["need"] == 2

    def test_json_copy_matches_stdout(self, tmp_path):
        target = tmp_path / "out" / "centroid.json"
        proc = run_cli(tmp_path, "centroid", "--tree", "path:7", "--json", str(target))
        assert proc.returncode == 0, proc.stderr
        assert json.loads(target.read_text()) == document(proc)
        assert document(proc)["split"]["centroid"] == 3


# --- exit codes ---

class TestExitCodes:
    def test_no_command(self, tmp_path):
        assert run_cli(tmp_path).returncode == 1

    def test_unknown_command(self, tmp_path):
        proc = run_cli(tmp_path, "frobnicate")
        assert proc.returncode == 1
        assert "Unknown command" in proc.stderr

    def test_missing_option_is_usage_error(self, tmp_path):
        assert run_cli(tmp_path, "decompose", "--tree", "star:5").returncode == 1

    def test_bad_shorthand(self, tmp_path):
        proc = run_cli(tmp_path, "centroid", "--tree", "blob:5")
        assert proc.returncode == 1
        assert "unknown tree shorthand" in proc.stderr

    def test_expansion_failure_is_a_witness(self, tmp_path):
        proc = run_cli(tmp_path, "check-expand", "--graph", "empty:6", "--w", "0,1,2,3", "--d", "1")
        assert proc.returncode == 2
        assert document(proc)["report"]["condition"] == 1

    def test_hall_deficiency_is_a_witness(self, tmp_path):
        demand = tmp_path / "demand.json"
        demand.write_text(json.dumps({"A": [0], "B": [1], "edges": [[0, 1]], "demands": {"0": 2}}))
        proc = run_cli(tmp_path, "hall", "--demand", str(demand))
        assert proc.returncode == 2
        assert document(proc)["status"] == "witness"

    def test_budget_exhaustion_is_unknown(self, tmp_path):
        proc = run_cli(tmp_path, "ramsey", "--tree", "path:4", "--h", "clique:3", "--budget", "3")
        assert proc.returncode == 3
        doc = document(proc)
        assert doc["status"] == "unknown"
        assert doc["bracket"][1] is None

    def test_bad_override(self, tmp_path):
        assert run_cli(tmp_path, "centroid", "--tree", "path:3", "--set", "novalue").returncode == 1


# --- embeddings ---

class TestEmbed:
    def test_pipeline_many_leaves(self, tmp_path):
        proc = run_cli(tmp_path, "embed", "pipeline", "--graph", "clique:13", "--tree", "star:7",
                       "--sizes", "1,1,1")
        assert proc.returncode == 0, proc.stderr
        doc = document(proc)
        assert doc["pipeline"]["kind"] == "embedding"
        assert doc["pipeline"]["trace"][0]["stage"] == "many-leaves"

    def test_pipeline_witness_in_empty_host(self, tmp_path):
        proc = run_cli(tmp_path, "embed", "pipeline", "--graph", "empty:13", "--tree", "star:7",
                       "--sizes", "1,1,1")
        assert proc.returncode == 2
        assert len(document(proc)["witness"]["parts"]) == 3

    def test_fp_reports_a_missing_embedding(self, tmp_path):
        proc = run_cli(tmp_path, "embed", "fp", "--graph", "path:2", "--tree", "path:3",
                       "--roots", "0", "--m", "1", "--mode", "heuristic")
        assert proc.returncode == 1
        doc = document(proc)
        assert doc["status"] == "fail"
        assert "no embedding" in doc["reason"]

    def test_bipartite_avoiding_needs_sizes(self, tmp_path):
        proc = run_cli(tmp_path, "embed", "c1", "--graph", "clique:30", "--tree", "path:5")
        assert proc.returncode == 1
        assert "--m1" in proc.stderr

    def test_bipartite_avoiding(self, tmp_path):
        proc = run_cli(tmp_path, "embed", "c1", "--graph", "clique:30", "--tree", "path:5",
                       "--m1", "1", "--m2", "1", "--coefficient", "0")
        assert proc.returncode == 0, proc.stderr
        assert len(document(proc)["embedding"]["images"]) == 5


# --- suite ---

class TestSuite:
    def test_small_battery_passes(self, tmp_path):
        proc = run_cli(tmp_path, "suite", *SMALL_SUITE)
        assert proc.returncode == 0, proc.stderr
        report = document(proc)["report"]
        assert report["ok"] is True
        assert report["timing"] is None
        assert [c["check"] for c in report["checks"]] == ["hall-oracle", "centroid", "bare-paths"]

    def test_runs_are_byte_identical(self, tmp_path):
        first = run_cli(tmp_path, "suite", *SMALL_SUITE)
        second = run_cli(tmp_path, "suite", *SMALL_SUITE, "--threads", "2")
        assert first.stdout == second.stdout

    def test_unknown_check(self, tmp_path):
        assert run_cli(tmp_path, "suite", "--checks", "nope").returncode == 1
