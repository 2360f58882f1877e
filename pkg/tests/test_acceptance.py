"""Acceptance criteria, one test each, with a summary line per criterion."""

import subprocess
import sys
import time

import pytest

from conftest import ACCEPTANCE_LINES
from interpres.acceptance import SUITES, CriterionResult

SELFTEST_LIMIT = 180.0


@pytest.mark.parametrize("number", sorted(SUITES))
def test_criterion(number):
    result = SUITES[number](seed=0)
    line = result.line()
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert result.ok, line


def test_criterion_10_selftest_end_to_end():
    start = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "interpres", "selftest"],
                          capture_output=True, text=True, timeout=SELFTEST_LIMIT * 2)
    elapsed = time.perf_counter() - start
    lines = [ln for ln in proc.stdout.splitlines() if ln.startswith("[")]
    passed = proc.returncode == 0 and len(lines) == len(SUITES) and \
        all(ln.startswith("[PASS]") for ln in lines)
    result = CriterionResult(10, "selftest end to end", passed,
                             f"exit {proc.returncode}, {len(lines)} suite lines", elapsed,
                             SELFTEST_LIMIT)
    ACCEPTANCE_LINES.append(result.line())
    print(result.line())
    assert result.ok, proc.stdout + proc.stderr
