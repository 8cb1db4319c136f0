from __future__ import annotations

from collections import OrderedDict
from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data"
SYNTHETIC = DATA / "synthetic"
REAL = DATA / "real"

# criterion id -> [title, outcomes]
_CRITERIA: "OrderedDict[str, list]" = OrderedDict()


@pytest.fixture(scope="session")
def synthetic_dir() -> Path:
    return SYNTHETIC


@pytest.fixture(scope="session")
def real_dir() -> Path:
    return REAL


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("acceptance")
        if mark is not None and mark.args:
            cid, title = mark.args[0], mark.args[1]
            _CRITERIA.setdefault(cid, [title, []])


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None or not mark.args:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        _CRITERIA[mark.args[0]][1].append((item.name, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not any(outcomes for _, outcomes in _CRITERIA.values()):
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for cid, (title, outcomes) in _CRITERIA.items():
        if not outcomes:
            continue
        ok = all(o == "passed" for _, o in outcomes)
        status = "PASS" if ok else "FAIL"
        failed = [name for name, o in outcomes if o != "passed"]
        extra = f"  (failing: {', '.join(failed)})" if failed else ""
        tr.write_line(f"{status}  criterion {cid}: {title}{extra}")
