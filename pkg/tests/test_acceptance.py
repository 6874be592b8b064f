"""Acceptance suite: one test per criterion, each printing a single pass/fail line."""

import os
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from beclab.acceptance import TITLES, CRITERIA

TIMEOUT = {1: 1.0, 2: 30.0, 3: 10.0, 5: 60.0, 8: 300.0, 9: 600.0}


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, report_line):
    res = CRITERIA[number]()
    report_line(res.line())
    failed = [key for key, ok in res.checks.items() if not ok]
    assert not failed, f"criterion {number} failed checks {failed}; metrics: {res.metrics}"
    if number in TIMEOUT:
        assert res.runtime < TIMEOUT[number]


def _cli():
    exe = shutil.which("bec-lab")
    return [exe] if exe else [sys.executable, "-m", "beclab.cli"]


def _csv_tree(root: Path):
    return {p.relative_to(root).as_posix(): p.read_bytes() for p in sorted(root.rglob("*.csv"))}


def test_criterion_12_determinism(tmp_path, report_line):
    codes, trees = [], []
    for run in ("first", "second"):
        out = tmp_path / run
        env = dict(os.environ, BECLAB_JOBS="2")
        proc = subprocess.run(_cli() + ["acceptance", "--out", str(out)], capture_output=True, env=env,
                              timeout=1800)
        codes.append(proc.returncode)
        trees.append(_csv_tree(out))
    identical = bool(trees[0]) and trees[0] == trees[1]
    checks = {"byte_identical_csv_trees": identical, "exit_code_0": codes == [0, 0]}
    failed = [k for k, ok in checks.items() if not ok]
    tail = f" (failed: {', '.join(failed)}; exit codes {codes})" if failed else ""
    report_line(f"criterion 12 {'PASS' if not failed else 'FAIL'}  {TITLES[12]}{tail}")
    assert identical, "CSV trees differ between two identical acceptance runs"
    assert codes == [0, 0], f"acceptance exit codes {codes}"
