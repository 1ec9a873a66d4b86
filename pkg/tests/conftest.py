import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

CRITERIA = {
    1: "Hermite 3-node rule: nodes, weights, runtime",
    2: "Hermite 4-node rule and weighing polynomial (6 - x^2)/12",
    3: "Aliasing rows k=1..6, symbolic and on the nodes for n=5..8",
    4: "Five integer points: basis reproduced, runtime",
    5: "Five-point design with irrational nodes: basis and degree 2, s = (2,4,3)",
    6: "Zero-mean condition and the degree-7 zero-mean polynomial",
    7: "Five-point fraction: indicator expansions and weights",
    8: "Property suite: Gaussian exactness, BM oracle, round trips, weights sum",
}

_results: dict = {}
_start = [0.0]
SUITE_BUDGET = 60.0


def pytest_sessionstart(session):
    _start[0] = time.perf_counter()


def pytest_runtest_logreport(report):
    marker = getattr(report, "acceptance", None)
    if marker is None:
        return
    if report.when == "call" or report.outcome == "failed":
        ok = _results.get(marker, True)
        _results[marker] = ok and report.outcome == "passed"


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    m = item.get_closest_marker("acceptance")
    if m is not None:
        report.acceptance = m.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    elapsed = time.perf_counter() - _start[0]
    if 8 in _results and elapsed > SUITE_BUDGET:
        _results[8] = False
    terminalreporter.section("acceptance criteria")
    terminalreporter.write_line(f"suite wall time {elapsed:.1f} s (budget {SUITE_BUDGET:.0f} s)")
    for n in sorted(_results):
        status = "PASS" if _results[n] else "FAIL"
        terminalreporter.write_line(f"ACCEPTANCE C{n} {status}  {CRITERIA.get(n, '')}")
