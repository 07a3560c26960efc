"""Acceptance suite: one test per criterion, each printing its pass/fail line.

The lines are also collected and printed as a table at the end of the pytest
run. ``python3 tests/test_acceptance.py`` prints the table without pytest.
"""

import pytest

from ncindex.acceptance import CRITERIA, format_table, run_criterion

RESULTS = {}


@pytest.mark.parametrize("number", sorted(CRITERIA), ids=lambda n: f"criterion_{n:02d}")
def test_criterion(number):
    res = run_criterion(number)
    RESULTS[number] = res
    print(res.line())
    assert res.passed, f"{res.line()}\n{res.metrics}"


def test_winding_fault_fails_only_the_winding_criterion(monkeypatch):
    monkeypatch.setenv("NCINDEX_FAULT", "winding-sign")
    failed = [n for n in (1, 4, 5, 6, 7, 8, 10) if not run_criterion(n).passed]
    assert failed == [6]


if __name__ == "__main__":
    results = []
    for n in sorted(CRITERIA):
        r = run_criterion(n)
        results.append(r)
        print(r.line(), flush=True)
    print(format_table(results).splitlines()[-1])
