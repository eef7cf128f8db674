import re
from pathlib import Path

import pytest

from carnot.algebra import all_builtins, builtin

ROOT = Path(__file__).resolve().parent.parent
ALGEBRAS = ROOT / "algebras"
GOLDEN = Path(__file__).resolve().parent / "golden"

_criteria: dict[int, list[tuple[str, str]]] = {}


@pytest.fixture(scope="session")
def builtins_small():
    return all_builtins(max_m=2)


@pytest.fixture(scope="session")
def heis1():
    return builtin("heisenberg", 1)


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)", report.nodeid)
    if not m:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _criteria.setdefault(int(m.group(1)), []).append((m.group(2), report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        parts = _criteria[number]
        failed = [name for name, outcome in parts if outcome != "passed"]
        verdict = "FAIL" if failed else "PASS"
        detail = f" (failing: {', '.join(failed)})" if failed else ""
        terminalreporter.write_line(f"criterion {number}: {verdict} [{len(parts)} checks]{detail}")
