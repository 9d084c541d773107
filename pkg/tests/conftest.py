import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_criteria: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, label, limit): acceptance criterion with a time limit in seconds")
    config.addinivalue_line("markers", "slow: long-running test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_call(item):
    mark = item.get_closest_marker("criterion")
    t0 = time.perf_counter()
    outcome = yield
    if mark is None:
        return
    number, label, limit = mark.args
    elapsed = time.perf_counter() - t0
    entry = _criteria.setdefault(number, {"label": label, "limit": limit, "ok": True, "time": 0.0})
    entry["time"] += elapsed
    if outcome.excinfo is not None:
        entry["ok"] = False


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        e = _criteria[number]
        ok = e["ok"] and e["time"] < e["limit"]
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(
            f"criterion {number:2d} {status}  {e['label']}  ({e['time']:.2f} s, limit {e['limit']} s)"
        )
