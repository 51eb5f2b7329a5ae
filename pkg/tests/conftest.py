import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_criteria: dict[str, tuple[str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    key = marker.args[0]
    title = marker.args[1] if len(marker.args) > 1 else item.name
    if report.failed or (report.when == "call" and report.passed):
        prev = _criteria.get(key, (title, "PASS"))[1]
        status = "FAIL" if report.failed or prev == "FAIL" else "PASS"
        _criteria[key] = (title, status)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_criteria, key=lambda k: int(k)):
        title, status = _criteria[key]
        terminalreporter.write_line(f"criterion {key}: {status}  {title}")
